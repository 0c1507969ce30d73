// Copyright 2026 The backstep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BACKSTEP__PARALLEL_HPP_
#define BACKSTEP__PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace backstep
{

/// Calls body(i) for i in [0, count) on up to `workers` threads (the caller's thread included).
/// Indices are handed out in increasing order. The first exception thrown by a body is rethrown
/// after all threads have joined.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)> & body);

}  // namespace backstep

#endif  // BACKSTEP__PARALLEL_HPP_
