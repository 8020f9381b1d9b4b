#ifndef INAVM_CLI_HPP
#define INAVM_CLI_HPP

// Building blocks of the navcli tool: configuration files, CSV formats and the
// simulate / run / evaluate / bench commands.
//
// Formats (header line first, numbers with 17 significant digits):
//   IMU    t_end,dthx,dthy,dthz,dvx,dvy,dvz          increments over (t_prev, t_end]
//   truth  t,qs,qx,qy,qz,vx,vy,vz,px,py,pz           ECEF, q body -> ECEF
//   nav    t,qs,qx,qy,qz,vx,vy,vz,px,py,pz,iters,e_q,e_v,e_p
//   error  t,angle,vn,vu,ve,pos_we,pos_ns,pos_h      North-Up-East, position as (east, north, up)

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "inavm/navigator.hpp"
#include "inavm/scenario.hpp"

namespace inavm::cli {

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Algorithm { matrix, naive, twosample };
Algorithm parse_algorithm(const std::string& name);
std::string algorithm_name(Algorithm a);

// key = value pairs from a config file; '#' starts a comment.
using KeyValues = std::map<std::string, std::string>;
KeyValues read_config_file(const std::string& path);
/// Parses "key=value"; throws CliError otherwise.
std::pair<std::string, std::string> parse_override(const std::string& text);

struct RunConfig {
  double sample_rate_hz = 100.0;
  int samples_per_interval = 8;
  int m_q = 9;
  int m_v = 9;
  int m_p = 9;
  int max_iters = 9;
  double tol = 1e-16;
  Algorithm algorithm = Algorithm::matrix;
  // Initial state, used when no truth file supplies one.
  double lon_deg = 0.0;
  double lat_deg = 45.0;
  double height_m = 100.0;
  Vec3 velocity_n = Vec3::Zero();  // North-Up-East
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
  double roll_deg = 0.0;
  bool renormalize = true;
  bool earth_rotation = true;
  bool gravity = true;
  int bench_repetitions = 5;

  void validate() const;
  IterationConfig iteration() const;
  NavState initial_state() const;
};

/// Applies keys to cfg; unknown keys and malformed values throw CliError.
void apply(RunConfig& cfg, const KeyValues& kv);
/// Scenario keys; same rules.
void apply(scenario::ScenarioSpec& spec, const KeyValues& kv);

struct ImuStream {
  std::vector<double> t_end;
  std::vector<Vec3> dtheta;
  std::vector<Vec3> dv;
  std::size_t size() const { return t_end.size(); }
};

struct NavRow {
  NavState state;
  int iters = 0;
  double e_q = 0.0;
  double e_v = 0.0;
  double e_p = 0.0;
};

struct ErrorRecord {
  double t = 0.0;
  double angle = 0.0;          // principal angle, rad
  Vec3 vel_n = Vec3::Zero();   // North, Up, East
  Vec3 pos_h = Vec3::Zero();   // west-east, north-south, height
};

std::string format_number(double x);

void write_imu_csv(std::ostream& os, const ImuStream& imu);
ImuStream read_imu_csv(std::istream& is, const std::string& name);
void write_truth_csv(std::ostream& os, const std::vector<NavState>& rows);
std::vector<NavState> read_truth_csv(std::istream& is, const std::string& name);
void write_nav_csv(std::ostream& os, const std::vector<NavRow>& rows);
std::vector<NavRow> read_nav_csv(std::istream& is, const std::string& name);
void write_error_csv(std::ostream& os, const std::vector<ErrorRecord>& rows);

ImuStream read_imu_file(const std::string& path);
std::vector<NavState> read_truth_file(const std::string& path);
std::vector<NavRow> read_nav_file(const std::string& path);

/// Scenario increments and truth states on the sample grid (truth includes t = 0).
void simulate(const scenario::ScenarioSpec& spec, ImuStream& imu, std::vector<NavState>& truth);

/// Runs the selected algorithm over the stream; one row per interval end.
std::vector<NavRow> run(const RunConfig& cfg, const ImuStream& imu, const NavState& initial);

ErrorRecord compare(const NavState& est, const NavState& truth);

struct ChannelStats {
  double max = 0.0;
  double rms = 0.0;
};

struct ErrorSummary {
  std::size_t count = 0;
  ChannelStats angle;
  ChannelStats vel[3];
  ChannelStats pos[3];
  double max_horizontal = 0.0;
};

/// Pairs nav rows with truth rows by timestamp (|dt| <= 1e-9 s, else CliError).
std::vector<ErrorRecord> evaluate(const std::vector<NavRow>& nav, const std::vector<NavState>& truth);
ErrorSummary summarize(const std::vector<ErrorRecord>& errors);
void print_summary(std::ostream& os, const std::string& label, const ErrorSummary& s);

struct BenchReport {
  double matrix_s = 0.0;
  double naive_s = 0.0;
  double twosample_s = 0.0;
  int repetitions = 0;
  double matrix_over_naive() const { return matrix_s / naive_s; }
  double matrix_over_twosample() const { return matrix_s / twosample_s; }
};

/// Median wall time per algorithm over the whole stream, one warm-up run excluded.
BenchReport bench(const RunConfig& cfg, const ImuStream& imu, const NavState& initial);
void print_bench(std::ostream& os, const BenchReport& r);

}  // namespace inavm::cli

#endif  // INAVM_CLI_HPP
