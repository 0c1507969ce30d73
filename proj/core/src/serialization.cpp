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

#include "backstep/serialization.hpp"

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <utility>

namespace backstep
{
namespace
{

nlohmann::json number(double v)
{
  if (!std::isfinite(v)) {
    return nullptr;
  }
  return v;
}

void add_profile(
  std::vector<std::pair<std::string, const GridProfile *>> & cols, const std::string & name,
  const GridProfile & p)
{
  if (!p.empty()) {
    cols.emplace_back(name, &p);
  }
}

}  // namespace

std::string version()
{
  return BACKSTEP_VERSION_STRING;
}

std::string csv_field(const std::string & text)
{
  if (text.find_first_of(",\"\r\n") == std::string::npos) {
    return text;
  }
  std::string out = "\"";
  for (const char c : text) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  out += '"';
  return out;
}

std::string format_number(double v)
{
  return fmt::format("{}", v);
}

void write_trajectory_csv(std::ostream & out, const SimulationResult & result)
{
  const long n = result.trajectory.empty() ? 0 : result.trajectory.front().state.size();
  out << "t";
  for (long i = 0; i < n; ++i) {
    out << ",x" << (i + 1);
  }
  out << ",U,dhat\n";
  for (const TrajectorySample & s : result.trajectory) {
    out << format_number(s.t);
    for (long i = 0; i < n; ++i) {
      out << ',' << format_number(s.state(i));
    }
    out << ',' << format_number(s.control) << ',' << format_number(s.dhat) << '\n';
  }
}

void write_snapshot_csv(std::ostream & out, const SystemSnapshot & s)
{
  std::vector<std::pair<std::string, const GridProfile *>> cols;
  add_profile(cols, "u", s.u);
  add_profile(cols, "uhat", s.uhat);
  add_profile(cols, "utilde", s.utilde);
  add_profile(cols, "u_x", s.u_x);
  add_profile(cols, "uhat_x", s.uhat_x);
  add_profile(cols, "utilde_x", s.utilde_x);
  add_profile(cols, "utilde_xx", s.utilde_xx);
  add_profile(cols, "what", s.what);
  add_profile(cols, "what_x", s.what_x);
  add_profile(cols, "what_xx", s.what_xx);
  add_profile(cols, "what_xxx", s.what_xxx);
  add_profile(cols, "phat", s.phat);
  add_profile(cols, "phat_x", s.phat_x);
  const KernelSet & k = s.kernels;
  add_profile(cols, "p1", k.p1);
  add_profile(cols, "p2", k.p2);
  add_profile(cols, "p3", k.p3);
  add_profile(cols, "p4", k.p4);
  add_profile(cols, "q1", k.q1);
  add_profile(cols, "q2", k.q2);
  add_profile(cols, "q3", k.q3);
  add_profile(cols, "q4", k.q4);
  add_profile(cols, "q5", k.q5);
  add_profile(cols, "q6", k.q6);
  add_profile(cols, "uhat_t", k.uhat_t);
  add_profile(cols, "uhat_xt", k.uhat_xt);
  add_profile(cols, "phat_t", k.phat_t);

  out << "x";
  for (const auto & [name, p] : cols) {
    if (p->arity() == 1) {
      out << ',' << name;
    } else {
      for (int c = 0; c < p->arity(); ++c) {
        out << ',' << name << '_' << (c + 1);
      }
    }
  }
  const int phi_dim = s.phi.dim();
  for (int r = 0; r < phi_dim; ++r) {
    for (int c = 0; c < phi_dim; ++c) {
      out << ",phi_" << (r + 1) << (c + 1);
    }
  }
  out << '\n';
  for (int i = 0; i < s.u.nodes(); ++i) {
    out << format_number(s.u.node(i));
    for (const auto & [name, p] : cols) {
      for (int c = 0; c < p->arity(); ++c) {
        out << ',' << format_number((*p)(i, c));
      }
    }
    for (int r = 0; r < phi_dim; ++r) {
      for (int c = 0; c < phi_dim; ++c) {
        out << ',' << format_number(s.phi.at(i)(r, c));
      }
    }
    out << '\n';
  }
}

nlohmann::json snapshot_summary_json(const SystemSnapshot & s)
{
  nlohmann::json j;
  j["step"] = s.step;
  j["t"] = number(s.t);
  j["state"] = std::vector<double>(s.state.data(), s.state.data() + s.state.size());
  j["control"] = number(s.control);
  j["delay"] = number(s.delay);
  j["dhat"] = {{"value", number(s.dhat.value)}, {"rate", number(s.dhat.rate)},
    {"accel", number(s.dhat.accel)}};
  j["boundary"] = {{"what_1", number(s.boundary_what())},
    {"utilde_1", number(s.boundary_utilde())}};
  const KernelSet & k = s.kernels;
  j["kernels"] = {
    {"q1_t", number(k.q1_t)},
    {"q7", number(k.q7)},
    {"f_utilde", std::vector<double>(k.f_utilde.data(), k.f_utilde.data() + k.f_utilde.size())},
    {"f_du", std::vector<double>(k.f_du.data(), k.f_du.data() + k.f_du.size())},
  };
  nlohmann::json fdp = nlohmann::json::array();
  for (int r = 0; r < k.f_dp.rows(); ++r) {
    std::vector<double> row;
    for (int c = 0; c < k.f_dp.cols(); ++c) {
      row.push_back(k.f_dp(r, c));
    }
    fdp.push_back(row);
  }
  j["kernels"]["f_dp"] = fdp;
  j["transition_max_condition"] = number(s.phi.empty() ? 1.0 : s.phi.max_condition());
  return j;
}

nlohmann::json config_json(const ScenarioConfig & config)
{
  nlohmann::json j = nlohmann::json::object();
  for (const auto & [k, v] : config_entries(config)) {
    j[k] = v;
  }
  return j;
}

nlohmann::json report_json(const ResidualReport & report)
{
  nlohmann::json j;
  j["config"] = config_json(report.config);
  j["window_start"] = number(report.window_start);
  j["complete"] = report.complete;
  j["passed"] = report.passed;
  j["options"] = {
    {"min_order", report.options.min_order},
    {"interior_cap", report.options.interior_cap},
    {"boundary_cap", report.options.boundary_cap},
    {"exact_cap", report.options.exact_cap},
    {"exact_floor", report.options.exact_floor},
  };
  nlohmann::json rungs = nlohmann::json::array();
  for (const RungResult & r : report.rungs) {
    nlohmann::json jr;
    jr["grid"] = r.grid;
    jr["dt"] = number(r.dt);
    jr["delta"] = number(r.delta);
    jr["status"] = to_string(r.status);
    jr["message"] = r.message;
    jr["triplets"] = r.triplets;
    jr["wall_seconds"] = number(r.wall_seconds);
    jr["max_control_residual"] = number(r.max_control_residual);
    nlohmann::json res = nlohmann::json::object();
    for (const auto & [name, v] : r.residuals) {
      res[name] = {{"max", number(v.max_abs)}, {"l2", number(v.l2)}};
    }
    jr["residuals"] = res;
    rungs.push_back(jr);
  }
  j["rungs"] = rungs;
  nlohmann::json eqs = nlohmann::json::array();
  for (const EquationSummary & e : report.equations) {
    nlohmann::json je;
    je["name"] = e.name;
    je["kind"] = to_string(e.kind);
    std::vector<nlohmann::json> maxes;
    std::vector<nlohmann::json> l2s;
    for (std::size_t i = 0; i < e.max_norms.size(); ++i) {
      maxes.push_back(number(e.max_norms[i]));
      l2s.push_back(number(e.l2_norms[i]));
    }
    je["max_norms"] = maxes;
    je["l2_norms"] = l2s;
    je["order"] = e.exact ? nlohmann::json("exact") : number(e.order);
    je["exact"] = e.exact;
    je["monotone"] = e.monotone;
    je["cap"] = number(e.cap);
    je["passed"] = e.passed;
    eqs.push_back(je);
  }
  j["equations"] = eqs;
  return j;
}

void write_convergence_csv(std::ostream & out, const ResidualReport & report)
{
  out << "rung,M,dt,delta";
  for (const auto & [name, kind] : residual_catalog()) {
    out << ',' << name;
  }
  out << '\n';
  for (std::size_t i = 0; i < report.rungs.size(); ++i) {
    const RungResult & r = report.rungs[i];
    out << i << ',' << r.grid << ',' << format_number(r.dt) << ',' << format_number(r.delta);
    for (const auto & [name, kind] : residual_catalog()) {
      const auto it = r.residuals.find(name);
      out << ',' << (it == r.residuals.end() ? std::string() : format_number(it->second.max_abs));
    }
    out << '\n';
  }
}

void write_report_table(std::ostream & out, const ResidualReport & report)
{
  out << fmt::format("residual analysis window: t >= {:.6g}\n", report.window_start);
  out << fmt::format("{:<16}{:<16}", "equation", "kind");
  for (const RungResult & r : report.rungs) {
    out << fmt::format("{:>14}", fmt::format("M={}", r.grid));
  }
  out << fmt::format("{:>10}{:>10}{:>8}\n", "order", "monotone", "pass");
  for (const EquationSummary & e : report.equations) {
    out << fmt::format("{:<16}{:<16}", e.name, to_string(e.kind));
    for (const double v : e.max_norms) {
      out << fmt::format("{:>14.4e}", v);
    }
    const std::string order = e.exact ? "exact" : fmt::format("{:.3f}", e.order);
    out << fmt::format(
      "{:>10}{:>10}{:>8}\n", order, e.monotone ? "yes" : "no", e.passed ? "PASS" : "FAIL");
  }
  if (!report.complete) {
    out << "study incomplete:";
    for (const RungResult & r : report.rungs) {
      out << fmt::format(" M={} {} {}", r.grid, to_string(r.status), r.message);
    }
    out << '\n';
  }
  out << (report.passed ? "verification passed\n" : "verification FAILED\n");
}

nlohmann::json manifest_json(const RunManifest & m)
{
  nlohmann::json j;
  j["command"] = m.command;
  j["version"] = version();
  j["config"] = config_json(m.config);
  j["started_utc"] = m.started_utc;
  j["finished_utc"] = m.finished_utc;
  j["wall_seconds"] = number(m.wall_seconds);
  j["exit_code"] = m.exit_code;
  nlohmann::json runs = nlohmann::json::array();
  for (const ManifestEntry & e : m.runs) {
    runs.push_back({{"label", e.label}, {"status", e.status}, {"message", e.message},
      {"failure_time", number(e.failure_time)}});
  }
  j["runs"] = runs;
  j["files"] = m.files;
  return j;
}

std::string utc_timestamp()
{
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace backstep
