#include "fbcnoma/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "fbcnoma/errors.hpp"

namespace fbcnoma {

namespace {

const std::set<std::string>& required_keys() {
  static const std::set<std::string> keys{
      "users.theta1",          "users.theta2",
      "users.epsilon1",        "users.epsilon2",
      "users.mean_power_dbm1", "users.mean_power_dbm2",
      "channel.m",             "channel.mean_snr_db1",
      "channel.mean_snr_db2",  "channel.noise_dbm",
      "fbc.blocklength",       "fbc.n_threshold",
      "power_model.eta",       "power_model.circuit_power_dbm",
      "power_model.cap_dbm",   "numerics.quadrature_nodes",
      "numerics.relative_tolerance", "numerics.seed"};
  return keys;
}

const std::map<std::string, std::string>& optional_keys() {
  static const std::map<std::string, std::string> keys{
      {"numerics.grid_points", "50"}};
  return keys;
}

bool known_key(const std::string& key) {
  return required_keys().count(key) > 0 || optional_keys().count(key) > 0;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ValidationError("scenario key '" + key + "': '" + text + "' is not a number");
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw ValidationError("scenario key '" + key + "': '" + text + "' is not a finite number");
  }
  return v;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ValidationError("scenario key '" + key + "': " + what);
}

void validate(const Scenario& s) {
  for (const auto& key : required_keys()) {
    if (!s.values.count(key)) throw ValidationError("scenario is missing required key '" + key + "'");
  }
  for (const auto& [key, text] : s.values) {
    if (!known_key(key)) throw ValidationError("unknown scenario key '" + key + "'");
    parse_number(key, text);
  }
  for (const char* k : {"users.theta1", "users.theta2"}) {
    require(s.get(k) > 0.0, k, "must be positive");
  }
  for (const char* k : {"users.epsilon1", "users.epsilon2"}) {
    require(s.get(k) > 0.0 && s.get(k) < 1.0, k, "must lie in (0, 1)");
  }
  require(s.get("channel.m") >= 0.5, "channel.m", "must be at least 0.5");
  const double n = s.get("fbc.blocklength");
  require(n >= 1.0 && n == std::floor(n), "fbc.blocklength", "must be a positive integer");
  const double nth = s.get("fbc.n_threshold");
  require(nth >= 1.0 && nth == std::floor(nth), "fbc.n_threshold", "must be a positive integer");
  require(s.get("power_model.eta") > 0.0, "power_model.eta", "must be positive");
  const double nodes = s.get("numerics.quadrature_nodes");
  require(nodes >= 16 && nodes == std::floor(nodes) && nodes <= 512,
          "numerics.quadrature_nodes", "must be an integer in [16, 512]");
  const double tol = s.get("numerics.relative_tolerance");
  require(tol > 0.0 && tol <= 1e-3, "numerics.relative_tolerance", "must lie in (0, 1e-3]");
  const double seed = s.get("numerics.seed");
  require(seed >= 0.0 && seed == std::floor(seed) && seed < 9.007199254740992e15,
          "numerics.seed", "must be a nonnegative integer");
  const double grid = s.get("numerics.grid_points");
  require(grid >= 2 && grid == std::floor(grid) && grid <= 100000,
          "numerics.grid_points", "must be an integer in [2, 100000]");
}

}  // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

double Scenario::get(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) {
    auto opt = optional_keys().find(key);
    if (opt == optional_keys().end()) throw ValidationError("scenario is missing key '" + key + "'");
    return parse_number(key, opt->second);
  }
  return parse_number(key, it->second);
}

std::uint64_t Scenario::seed() const {
  return static_cast<std::uint64_t>(get("numerics.seed"));
}

int Scenario::grid_points() const { return static_cast<int>(get("numerics.grid_points")); }

QosSpec Scenario::qos(int user) const {
  const std::string u = std::to_string(user);
  QosSpec q;
  q.theta = get("users.theta" + u);
  q.epsilon = get("users.epsilon" + u);
  q.blocklength = get("fbc.blocklength");
  q.n_threshold = get("fbc.n_threshold");
  return q;
}

FadingSpec Scenario::fading(int user) const {
  return FadingSpec{get("channel.m"), db_to_linear(get("channel.mean_snr_db" + std::to_string(user)))};
}

double Scenario::mean_power_watts(int user) const {
  return dbm_to_watts(get("users.mean_power_dbm" + std::to_string(user)));
}

double Scenario::noise_watts() const { return dbm_to_watts(get("channel.noise_dbm")); }

PowerModel Scenario::power_model() const {
  PowerModel pm;
  pm.eta = get("power_model.eta");
  pm.circuit_power = dbm_to_watts(get("power_model.circuit_power_dbm"));
  pm.mean_power_cap = dbm_to_watts(get("power_model.cap_dbm"));
  return pm;
}

QuadratureSpec Scenario::quadrature() const {
  QuadratureSpec q;
  q.node_count = static_cast<int>(get("numerics.quadrature_nodes"));
  q.relative_tolerance = get("numerics.relative_tolerance");
  return q;
}

std::string Scenario::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (const auto& [key, text] : values) {
    for (char c : key + "=" + text + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Scenario parse_scenario(std::string_view text) {
  Scenario s;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash_pos = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash_pos));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ValidationError("scenario line " + std::to_string(line_no) + ": malformed section header");
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("scenario line " + std::to_string(line_no) + ": expected key = value");
    }
    if (section.empty()) {
      throw ValidationError("scenario line " + std::to_string(line_no) + ": key outside any section");
    }
    const std::string key = section + "." + trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!known_key(key)) throw ValidationError("unknown scenario key '" + key + "'");
    if (!s.values.emplace(key, value).second) {
      throw ValidationError("duplicate scenario key '" + key + "'");
    }
  }
  validate(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

void apply_override(Scenario& s, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ValidationError("override '" + std::string(assignment) + "' must look like section.key=value");
  }
  const std::string key = trim(assignment.substr(0, eq));
  if (!known_key(key)) throw ValidationError("unknown scenario key '" + key + "'");
  s.values[key] = trim(assignment.substr(eq + 1));
  validate(s);
}

std::string default_scenario_text() {
  return R"([users]
theta1 = 1e-3
theta2 = 1e-6
epsilon1 = 1e-3
epsilon2 = 1e-3
mean_power_dbm1 = 20
mean_power_dbm2 = 20

[channel]
m = 1
mean_snr_db1 = 20
mean_snr_db2 = 20
noise_dbm = -90

[fbc]
blocklength = 1000
n_threshold = 100

[power_model]
eta = 1.4
circuit_power_dbm = 40
cap_dbm = 60

[numerics]
quadrature_nodes = 24
relative_tolerance = 1e-10
seed = 20240611
grid_points = 50
)";
}

}  // namespace fbcnoma
