#include "sp2lab/run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace sp2lab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size() || !std::isfinite(x)) throw ConfigError(key + ": not a number: '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw ConfigError(key + ": not an integer: '" + v + "'");
  return x;
}

int to_small_int(const std::string& key, const std::string& v) {
  const long long x = to_int(key, v);
  if (x < -1000000000LL || x > 1000000000LL) throw ConfigError(key + ": out of range");
  return static_cast<int>(x);
}

}  // namespace

void set_key(RunConfig& c, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "nu1") c.params.nu1 = to_double(key, v);
  else if (key == "nu2") c.params.nu2 = to_double(key, v);
  else if (key == "l1u" || key == "l1d") {
    Scale s;
    try {
      s = parse_scale(v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key + ": " + e.what());
    }
    (key == "l1u" ? c.params.l1u : c.params.l1d) = s;
  } else if (key == "theta_steps") c.theta_steps = to_small_int(key, v);
  else if (key == "t_steps") c.t_steps = to_small_int(key, v);
  else if (key == "restarts") c.restarts = to_small_int(key, v);
  else if (key == "planes_per_point") c.planes_per_point = to_small_int(key, v);
  else if (key == "seed") {
    if (!v.empty() && v[0] == '-') throw ConfigError("seed: must be nonnegative");
    std::size_t pos = 0;
    unsigned long long x = 0;
    try {
      x = std::stoull(v, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != v.size()) throw ConfigError("seed: not an integer: '" + v + "'");
    c.seed = x;
  } else if (key == "fd_step") c.fd_step = to_double(key, v);
  else if (key == "flat_threshold") c.flat_threshold = to_double(key, v);
  else if (key == "threads") c.threads = to_small_int(key, v);
  else if (key == "out") {
    if (v.empty()) throw ConfigError("out: empty path");
    c.out = v;
  } else
    throw ConfigError("unknown key '" + key + "'");
}

void RunConfig::validate() const {
  for (double nu : {params.nu1, params.nu2})
    if (!(nu > 0) || nu >= kNuMax + 1e-12) throw ConfigError("nu1, nu2 must be in (0, 1/sqrt(2))");
  for (const Scale* s : {&params.l1u, &params.l1d})
    if (!s->infinite && !(s->value > 0)) throw ConfigError("l1u, l1d must be positive or inf");
  if (theta_steps < 2 || t_steps < 2) throw ConfigError("theta_steps, t_steps must be >= 2");
  if (restarts < 1) throw ConfigError("restarts must be >= 1");
  if (planes_per_point < 0) throw ConfigError("planes_per_point must be >= 0");
  if (!(fd_step > 0) || !(flat_threshold > 0)) throw ConfigError("fd_step, flat_threshold must be positive");
  if (threads < 0) throw ConfigError("threads must be >= 0");
}

ScanConfig RunConfig::scan_config() const {
  ScanConfig s;
  s.theta_steps = theta_steps;
  s.t_steps = t_steps;
  s.restarts = restarts;
  s.seed = seed;
  s.threads = threads;
  return s;
}

VerifyOptions RunConfig::verify_options() const {
  VerifyOptions o;
  o.params = params;
  o.seed = seed;
  o.scan = scan_config();
  o.fd.step = fd_step;
  o.flat_threshold = flat_threshold;
  o.planes_per_point = planes_per_point;
  return o;
}

RunConfig parse_run_config(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    set_key(base, trim(s.substr(0, eq)), s.substr(eq + 1));
  }
  return base;
}

RunConfig load_run_config(const std::string& path, RunConfig base) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_run_config(ss.str(), base);
}

std::string serialize(const RunConfig& c) {
  std::ostringstream os;
  os << "nu1 = " << fmt(c.params.nu1) << "\n"
     << "nu2 = " << fmt(c.params.nu2) << "\n"
     << "l1u = " << to_string(c.params.l1u) << "\n"
     << "l1d = " << to_string(c.params.l1d) << "\n"
     << "theta_steps = " << c.theta_steps << "\n"
     << "t_steps = " << c.t_steps << "\n"
     << "restarts = " << c.restarts << "\n"
     << "planes_per_point = " << c.planes_per_point << "\n"
     << "seed = " << c.seed << "\n"
     << "fd_step = " << fmt(c.fd_step) << "\n"
     << "flat_threshold = " << fmt(c.flat_threshold) << "\n"
     << "threads = " << c.threads << "\n"
     << "out = " << c.out << "\n";
  return os.str();
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  auto same = [](const Scale& x, const Scale& y) { return x.infinite == y.infinite && (x.infinite || x.value == y.value); };
  return a.params.nu1 == b.params.nu1 && a.params.nu2 == b.params.nu2 && same(a.params.l1u, b.params.l1u) &&
         same(a.params.l1d, b.params.l1d) && a.theta_steps == b.theta_steps && a.t_steps == b.t_steps &&
         a.restarts == b.restarts && a.planes_per_point == b.planes_per_point && a.seed == b.seed &&
         a.fd_step == b.fd_step && a.flat_threshold == b.flat_threshold && a.threads == b.threads && a.out == b.out;
}

}  // namespace sp2lab
