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

#ifndef BACKSTEP__ERRORS_HPP_
#define BACKSTEP__ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <utility>

namespace backstep
{

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Dimension or grid mismatch between arguments.
class UsageError : public Error
{
public:
  using Error::Error;
};

/// Invalid scenario configuration. `key()` names the offending key when known.
class ConfigError : public Error
{
public:
  explicit ConfigError(const std::string & message, std::string key = {})
  : Error(message), key_(std::move(key)) {}

  const std::string & key() const noexcept { return key_; }

private:
  std::string key_;
};

/// Non-finite or runaway value: candidate finite-time escape of the plant or of the predictor.
/// `location()` is the time (plant) or spatial coordinate (predictor) where it was detected.
class BlowUpError : public Error
{
public:
  BlowUpError(const std::string & message, double location)
  : Error(message), location_(location) {}

  double location() const noexcept { return location_; }

private:
  double location_;
};

/// Numerical failure that is not an escape, e.g. an ill-conditioned transition matrix.
class NumericError : public Error
{
public:
  using Error::Error;
};

/// Control history queried after its latest sample. Always an internal bug.
class FutureQueryError : public Error
{
public:
  using Error::Error;
};

}  // namespace backstep

#endif  // BACKSTEP__ERRORS_HPP_
