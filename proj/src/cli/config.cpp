#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "inavm/cli.hpp"
#include "inavm/earth.hpp"

namespace inavm::cli {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, x);
  if (r.ec != std::errc() || r.ptr != end || !std::isfinite(x)) {
    throw CliError("config: '" + key + "' expects a number, got '" + v + "'");
  }
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  int x = 0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, x);
  if (r.ec != std::errc() || r.ptr != end) throw CliError("config: '" + key + "' expects an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw CliError("config: '" + key + "' expects true/false, got '" + v + "'");
}

Vec3 to_vec3(const std::string& key, const std::string& v) {
  std::stringstream ss(v);
  std::string part;
  Vec3 out;
  int i = 0;
  while (std::getline(ss, part, ',')) {
    if (i == 3) break;
    out[i++] = to_double(key, trim(part));
  }
  if (i != 3 || std::getline(ss, part, ',')) throw CliError("config: '" + key + "' expects three comma-separated numbers");
  return out;
}

using Setter = std::function<void(const std::string&, const std::string&)>;

void dispatch(const KeyValues& kv, const std::map<std::string, Setter>& table, const char* what) {
  for (const auto& [k, v] : kv) {
    const auto it = table.find(k);
    if (it == table.end()) throw CliError(std::string("config: unknown ") + what + " key '" + k + "'");
    it->second(k, v);
  }
}

}  // namespace

Algorithm parse_algorithm(const std::string& name) {
  if (name == "matrix") return Algorithm::matrix;
  if (name == "naive") return Algorithm::naive;
  if (name == "twosample") return Algorithm::twosample;
  throw CliError("unknown algorithm '" + name + "' (matrix, naive, twosample)");
}

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::matrix: return "matrix";
    case Algorithm::naive: return "naive";
    case Algorithm::twosample: return "twosample";
  }
  return "?";
}

KeyValues read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError("cannot open config file '" + path + "'");
  KeyValues kv;
  std::string line;
  for (int no = 1; std::getline(in, line); ++no) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw CliError(path + ":" + std::to_string(no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw CliError(path + ":" + std::to_string(no) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::pair<std::string, std::string> parse_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || trim(text.substr(0, eq)).empty()) {
    throw CliError("override '" + text + "' is not key=value");
  }
  return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

void RunConfig::validate() const {
  if (!(sample_rate_hz > 0.0)) throw CliError("config: sample_rate_hz must be positive");
  if (samples_per_interval < 1) throw CliError("config: samples_per_interval must be >= 1");
  if (bench_repetitions < 1) throw CliError("config: bench_repetitions must be >= 1");
  if (algorithm == Algorithm::twosample && samples_per_interval % 2 != 0) {
    throw CliError("config: twosample needs an even samples_per_interval");
  }
  try {
    iteration().validate();
  } catch (const std::invalid_argument& e) {
    throw CliError(std::string("config: ") + e.what());
  }
}

IterationConfig RunConfig::iteration() const {
  IterationConfig c;
  c.m_q = m_q;
  c.m_v = m_v;
  c.m_p = m_p;
  c.max_iters = max_iters;
  c.tol = tol;
  c.renormalize = renormalize;
  c.earth_rotation = earth_rotation;
  c.gravity = gravity;
  return c;
}

NavState RunConfig::initial_state() const {
  const earth::GeodeticPos g{lon_deg * kDeg, lat_deg * kDeg, height_m};
  NavState s;
  s.q = scenario::attitude_from_euler(g, yaw_deg * kDeg, pitch_deg * kDeg, roll_deg * kDeg);
  s.v_e = earth::cne(g) * velocity_n;
  s.p_e = earth::lla2ecef(g);
  return s;
}

void apply(RunConfig& c, const KeyValues& kv) {
  const std::map<std::string, Setter> table = {
      {"sample_rate_hz", [&](auto& k, auto& v) { c.sample_rate_hz = to_double(k, v); }},
      {"samples_per_interval", [&](auto& k, auto& v) { c.samples_per_interval = to_int(k, v); }},
      {"m_q", [&](auto& k, auto& v) { c.m_q = to_int(k, v); }},
      {"m_v", [&](auto& k, auto& v) { c.m_v = to_int(k, v); }},
      {"m_p", [&](auto& k, auto& v) { c.m_p = to_int(k, v); }},
      {"max_iters", [&](auto& k, auto& v) { c.max_iters = to_int(k, v); }},
      {"tol", [&](auto& k, auto& v) { c.tol = to_double(k, v); }},
      {"algorithm", [&](auto&, auto& v) { c.algorithm = parse_algorithm(v); }},
      {"lon_deg", [&](auto& k, auto& v) { c.lon_deg = to_double(k, v); }},
      {"lat_deg", [&](auto& k, auto& v) { c.lat_deg = to_double(k, v); }},
      {"height_m", [&](auto& k, auto& v) { c.height_m = to_double(k, v); }},
      {"velocity_n", [&](auto& k, auto& v) { c.velocity_n = to_vec3(k, v); }},
      {"yaw_deg", [&](auto& k, auto& v) { c.yaw_deg = to_double(k, v); }},
      {"pitch_deg", [&](auto& k, auto& v) { c.pitch_deg = to_double(k, v); }},
      {"roll_deg", [&](auto& k, auto& v) { c.roll_deg = to_double(k, v); }},
      {"renormalize", [&](auto& k, auto& v) { c.renormalize = to_bool(k, v); }},
      {"earth_rotation", [&](auto& k, auto& v) { c.earth_rotation = to_bool(k, v); }},
      {"gravity", [&](auto& k, auto& v) { c.gravity = to_bool(k, v); }},
      {"bench_repetitions", [&](auto& k, auto& v) { c.bench_repetitions = to_int(k, v); }},
  };
  dispatch(kv, table, "run");
}

void apply(scenario::ScenarioSpec& s, const KeyValues& kv) {
  const std::map<std::string, Setter> table = {
      {"kind", [&](auto&, auto& v) {
         try {
           s.kind = scenario::parse_kind(v);
         } catch (const std::invalid_argument& e) {
           throw CliError(std::string("config: ") + e.what());
         }
       }},
      {"cone_half_angle_deg", [&](auto& k, auto& v) { s.cone_half_angle = to_double(k, v) * kDeg; }},
      {"cone_freq_hz", [&](auto& k, auto& v) { s.cone_freq_hz = to_double(k, v); }},
      {"spin_axis", [&](auto& k, auto& v) { s.spin_axis = to_vec3(k, v); }},
      {"spin_rate", [&](auto& k, auto& v) { s.spin_rate = to_double(k, v); }},
      {"lon_deg", [&](auto& k, auto& v) { s.origin.lon = to_double(k, v) * kDeg; }},
      {"lat_deg", [&](auto& k, auto& v) { s.origin.lat = to_double(k, v) * kDeg; }},
      {"height_m", [&](auto& k, auto& v) { s.origin.h = to_double(k, v); }},
      {"velocity_n", [&](auto& k, auto& v) { s.cruise_velocity_n = to_vec3(k, v); }},
      {"accel_amplitude", [&](auto& k, auto& v) { s.accel_amplitude = to_double(k, v); }},
      {"accel_freq_hz", [&](auto& k, auto& v) { s.accel_freq_hz = to_double(k, v); }},
      {"yaw_deg", [&](auto& k, auto& v) { s.yaw = to_double(k, v) * kDeg; }},
      {"pitch_deg", [&](auto& k, auto& v) { s.pitch = to_double(k, v) * kDeg; }},
      {"roll_deg", [&](auto& k, auto& v) { s.roll = to_double(k, v) * kDeg; }},
      {"duration", [&](auto& k, auto& v) { s.duration = to_double(k, v); }},
      {"sample_rate_hz", [&](auto& k, auto& v) { s.sample_rate = to_double(k, v); }},
      {"include_earth_rate", [&](auto& k, auto& v) { s.include_earth_rate = to_bool(k, v); }},
  };
  dispatch(kv, table, "scenario");
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw CliError(std::string("config: ") + e.what());
  }
}

}  // namespace inavm::cli
