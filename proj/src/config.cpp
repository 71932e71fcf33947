// Copyright 2026 The evasim Authors
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

#include "evasim/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "evasim/errors.hpp"

namespace evasim {

SimConfig RunConfig::sim_config() const {
  SimConfig c = sim;
  c.seed = seed;
  return c;
}

void RunConfig::validate() const {
  if (!(D > 0.0)) throw InvalidInput("D must be positive");
  if (!(lane_width > 0.0)) throw InvalidInput("lane_width must be positive");
  if (jobs < 0) throw InvalidInput("jobs must be >= 0");
  for (double t : cr_horizons) {
    const double r = t / 0.5;
    if (!(t > 0.0) || r != static_cast<double>(static_cast<long long>(r))) {
      throw InvalidInput("cr horizons must be positive multiples of 0.5 s");
    }
  }
  sim.validate();
  sim.guidance.for_stage(Stage::kCollision, 0, 1).validate();
  sim.guidance.for_stage(Stage::kEvasion, 0, 1).validate();
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
    return v.substr(1, v.size() - 2);
  }
  return v;
}

/// Drops a trailing '#' comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

struct Value {
  std::string raw;
  int line = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidInput("config line " + std::to_string(line) + ": " + what);
  }

  double as_double() const {
    double v = 0.0;
    const char* end = raw.data() + raw.size();
    const auto [ptr, ec] = std::from_chars(raw.data(), end, v);
    if (raw.empty() || ec != std::errc() || ptr != end) fail("expected a number, got '" + raw + "'");
    return v;
  }

  long long as_int() const {
    long long v = 0;
    const char* end = raw.data() + raw.size();
    const auto [ptr, ec] = std::from_chars(raw.data(), end, v);
    if (raw.empty() || ec != std::errc() || ptr != end) fail("expected an integer, got '" + raw + "'");
    return v;
  }

  std::uint64_t as_u64() const {
    std::uint64_t v = 0;
    const char* end = raw.data() + raw.size();
    const auto [ptr, ec] = std::from_chars(raw.data(), end, v);
    if (raw.empty() || ec != std::errc() || ptr != end) fail("expected a non-negative integer");
    return v;
  }

  int as_small_int() const {
    const long long v = as_int();
    if (v < -1000000000LL || v > 1000000000LL) fail("integer out of range");
    return static_cast<int>(v);
  }

  std::vector<double> as_list() const {
    if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']') fail("expected a [list]");
    std::vector<double> out;
    std::stringstream ss(raw.substr(1, raw.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) {
        if (out.empty() && ss.eof()) break;
        fail("empty list element");
      }
      out.push_back(Value{item, line}.as_double());
    }
    return out;
  }

  std::string as_string() const { return unquote(raw); }
};

using Setter = std::function<void(RunConfig&, const Value&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {".seed", [](RunConfig& c, const Value& v) { c.seed = v.as_u64(); }},
      {".D", [](RunConfig& c, const Value& v) { c.D = v.as_double(); }},
      {".lane_width", [](RunConfig& c, const Value& v) { c.lane_width = v.as_double(); }},
      {".jobs", [](RunConfig& c, const Value& v) { c.jobs = v.as_small_int(); }},
      {".output_dir", [](RunConfig& c, const Value& v) { c.output_dir = v.as_string(); }},
      {"sim.total_steps", [](RunConfig& c, const Value& v) { c.sim.total_steps = v.as_small_int(); }},
      {"sim.apply_steps", [](RunConfig& c, const Value& v) { c.sim.apply_steps = v.as_small_int(); }},
      {"sim.offroad_steps",
       [](RunConfig& c, const Value& v) { c.sim.offroad_steps = v.as_small_int(); }},
      {"prior.horizon", [](RunConfig& c, const Value& v) { c.sim.prior.horizon = v.as_small_int(); }},
      {"prior.dt", [](RunConfig& c, const Value& v) { c.sim.prior.dt = v.as_double(); }},
      {"prior.population",
       [](RunConfig& c, const Value& v) { c.sim.prior.population = v.as_small_int(); }},
      {"prior.refine_iters",
       [](RunConfig& c, const Value& v) { c.sim.prior.refine_iters = v.as_small_int(); }},
      {"prior.step_size", [](RunConfig& c, const Value& v) { c.sim.prior.step_size = v.as_double(); }},
      {"prior.noise_schedule",
       [](RunConfig& c, const Value& v) { c.sim.prior.noise_schedule = v.as_list(); }},
      {"prior.accel_max",
       [](RunConfig& c, const Value& v) { c.sim.prior.limits.accel_max = v.as_double(); }},
      {"prior.yaw_rate_max",
       [](RunConfig& c, const Value& v) { c.sim.prior.limits.yaw_rate_max = v.as_double(); }},
      {"prior.speed_max",
       [](RunConfig& c, const Value& v) { c.sim.prior.limits.speed_max = v.as_double(); }},
      {"prior.accel_sigma",
       [](RunConfig& c, const Value& v) { c.sim.prior.accel_sigma = v.as_double(); }},
      {"prior.yaw_rate_sigma",
       [](RunConfig& c, const Value& v) { c.sim.prior.yaw_rate_sigma = v.as_double(); }},
      {"guidance.lambda_decay",
       [](RunConfig& c, const Value& v) { c.sim.guidance.lambda_decay = v.as_double(); }},
      {"guidance.v_th", [](RunConfig& c, const Value& v) { c.sim.guidance.v_th = v.as_double(); }},
      {"guidance.grid_rows",
       [](RunConfig& c, const Value& v) { c.sim.guidance.grid.rows = v.as_small_int(); }},
      {"guidance.grid_cols",
       [](RunConfig& c, const Value& v) { c.sim.guidance.grid.cols = v.as_small_int(); }},
      {"collision_stage.alpha",
       [](RunConfig& c, const Value& v) { c.sim.guidance.collision.alpha = v.as_double(); }},
      {"collision_stage.beta",
       [](RunConfig& c, const Value& v) { c.sim.guidance.collision.beta = v.as_double(); }},
      {"collision_stage.gamma",
       [](RunConfig& c, const Value& v) { c.sim.guidance.collision.gamma = v.as_double(); }},
      {"evasion_stage.beta",
       [](RunConfig& c, const Value& v) { c.sim.guidance.evasion.beta = v.as_double(); }},
      {"evasion_stage.gamma",
       [](RunConfig& c, const Value& v) { c.sim.guidance.evasion.gamma = v.as_double(); }},
      {"metrics.planner",
       [](RunConfig& c, const Value& v) { c.planner = planner_from_string(v.as_string()); }},
      {"metrics.cr_horizons", [](RunConfig& c, const Value& v) { c.cr_horizons = v.as_list(); }},
      {"metrics.realism_reference",
       [](RunConfig& c, const Value& v) { c.realism_reference = v.as_string(); }},
  };
  return table;
}

std::string num(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, ptr);
  if (s.find_first_of(".eE") == std::string::npos && s.find("inf") == std::string::npos &&
      s.find("nan") == std::string::npos) {
    s += ".0";
  }
  return s;
}

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += num(v[i]);
  }
  return s + "]";
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw InvalidInput("config line " + std::to_string(lineno) + ": malformed section");
      }
      section = trim(line.substr(1, line.size() - 2));
      const std::string prefix = section + ".";
      const bool known = std::any_of(setters().begin(), setters().end(), [&](const auto& kv) {
        return kv.first.compare(0, prefix.size(), prefix) == 0;
      });
      if (!known) {
        throw InvalidInput("config line " + std::to_string(lineno) + ": unknown section '" +
                           section + "'");
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidInput("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = section + "." + trim(line.substr(0, eq));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw InvalidInput("config line " + std::to_string(lineno) + ": unknown key '" +
                         (section.empty() ? key.substr(1) : key) + "'");
    }
    it->second(cfg, Value{trim(line.substr(eq + 1)), lineno});
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    throw InvalidInput("cannot read config '" + path + "'");
  }
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const RunConfig& c) {
  const SimConfig& s = c.sim;
  std::ostringstream o;
  o << "seed = " << c.seed << "\n"
    << "D = " << num(c.D) << "\n"
    << "lane_width = " << num(c.lane_width) << "\n"
    << "jobs = " << c.jobs << "\n"
    << "output_dir = \"" << c.output_dir << "\"\n\n"
    << "[sim]\n"
    << "total_steps = " << s.total_steps << "\n"
    << "apply_steps = " << s.apply_steps << "\n"
    << "offroad_steps = " << s.offroad_steps << "\n\n"
    << "[prior]\n"
    << "horizon = " << s.prior.horizon << "\n"
    << "dt = " << num(s.prior.dt) << "\n"
    << "population = " << s.prior.population << "\n"
    << "refine_iters = " << s.prior.refine_iters << "\n"
    << "step_size = " << num(s.prior.step_size) << "\n"
    << "noise_schedule = " << list(s.prior.noise_schedule) << "\n"
    << "accel_max = " << num(s.prior.limits.accel_max) << "\n"
    << "yaw_rate_max = " << num(s.prior.limits.yaw_rate_max) << "\n"
    << "speed_max = " << num(s.prior.limits.speed_max) << "\n"
    << "accel_sigma = " << num(s.prior.accel_sigma) << "\n"
    << "yaw_rate_sigma = " << num(s.prior.yaw_rate_sigma) << "\n\n"
    << "[guidance]\n"
    << "lambda_decay = " << num(s.guidance.lambda_decay) << "\n"
    << "v_th = " << num(s.guidance.v_th) << "\n"
    << "grid_rows = " << s.guidance.grid.rows << "\n"
    << "grid_cols = " << s.guidance.grid.cols << "\n\n"
    << "[collision_stage]\n"
    << "alpha = " << num(s.guidance.collision.alpha) << "\n"
    << "beta = " << num(s.guidance.collision.beta) << "\n"
    << "gamma = " << num(s.guidance.collision.gamma) << "\n\n"
    << "[evasion_stage]\n"
    << "beta = " << num(s.guidance.evasion.beta) << "\n"
    << "gamma = " << num(s.guidance.evasion.gamma) << "\n\n"
    << "[metrics]\n"
    << "planner = \"" << to_string(c.planner) << "\"\n"
    << "cr_horizons = " << list(c.cr_horizons) << "\n"
    << "realism_reference = \"" << c.realism_reference << "\"\n";
  return o.str();
}

}  // namespace evasim
