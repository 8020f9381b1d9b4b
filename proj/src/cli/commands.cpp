#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "inavm/cli.hpp"
#include "inavm/earth.hpp"
#include "inavm/reference.hpp"

namespace inavm::cli {

namespace {

constexpr double kTimeTol = 1e-9;

std::vector<ImuBatch> make_batches(const RunConfig& cfg, const ImuStream& imu) {
  const int n = cfg.samples_per_interval;
  const double dt = 1.0 / cfg.sample_rate_hz;
  if (imu.size() == 0) throw CliError("IMU stream is empty");
  if (imu.size() % static_cast<std::size_t>(n) != 0) {
    throw CliError("IMU stream has " + std::to_string(imu.size()) + " rows, not a multiple of samples_per_interval " +
                   std::to_string(n) + " (last complete interval ends at line " +
                   std::to_string(imu.size() / n * n + 1) + ")");
  }
  for (std::size_t k = 1; k < imu.size(); ++k) {
    if (std::abs(imu.t_end[k] - imu.t_end[k - 1] - dt) > kTimeTol) {
      throw CliError("IMU line " + std::to_string(k + 2) + ": sample spacing differs from 1/sample_rate_hz");
    }
  }
  std::vector<ImuBatch> out(imu.size() / n);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].dt = dt;
    out[i].dtheta.assign(imu.dtheta.begin() + i * n, imu.dtheta.begin() + (i + 1) * n);
    out[i].dv.assign(imu.dv.begin() + i * n, imu.dv.begin() + (i + 1) * n);
  }
  return out;
}

ref::TwoSampleOptions two_sample_options(const RunConfig& cfg) {
  return {cfg.earth_rotation, cfg.gravity, cfg.renormalize};
}

// Runs one algorithm over prepared batches; `emit` receives each interval end.
template <typename Emit>
void propagate(const RunConfig& cfg, const std::vector<ImuBatch>& batches, NavState state, Emit emit) {
  const IterationConfig it = cfg.iteration();
  const int n = cfg.samples_per_interval;
  switch (cfg.algorithm) {
    case Algorithm::matrix: {
      const Navigator nav(it, n);
      for (std::size_t i = 0; i < batches.size(); ++i) {
        StepResult r = nav.step(state, batches[i]);
        state = r.state;
        emit(i, state, r.solution);
      }
      break;
    }
    case Algorithm::naive: {
      const ref::NaiveNavigator nav(it, n);
      for (std::size_t i = 0; i < batches.size(); ++i) {
        StepResult r = nav.step(state, batches[i]);
        state = r.state;
        emit(i, state, r.solution);
      }
      break;
    }
    case Algorithm::twosample: {
      const ref::TwoSampleOptions opt = two_sample_options(cfg);
      const IntervalSolution none;
      for (std::size_t i = 0; i < batches.size(); ++i) {
        state = ref::two_sample_step(state, batches[i], opt);
        emit(i, state, none);
      }
      break;
    }
  }
}

ChannelStats stats(const std::vector<double>& xs) {
  ChannelStats s;
  double sq = 0.0;
  for (double x : xs) {
    s.max = std::max(s.max, std::abs(x));
    sq += x * x;
  }
  if (!xs.empty()) s.rms = std::sqrt(sq / static_cast<double>(xs.size()));
  return s;
}

}  // namespace

void simulate(const scenario::ScenarioSpec& spec, ImuStream& imu, std::vector<NavState>& truth) {
  const scenario::TruthSampler sampler(spec);
  const double dt = 1.0 / spec.sample_rate;
  const auto n = static_cast<int>(std::floor(spec.duration * spec.sample_rate + 1e-9));
  if (n < 1) throw CliError("simulate: duration shorter than one sample");
  const ImuBatch all = scenario::sample_increments(sampler, 0.0, n, dt);
  imu.t_end.resize(n);
  for (int k = 0; k < n; ++k) imu.t_end[k] = (k + 1) * dt;
  imu.dtheta = all.dtheta;
  imu.dv = all.dv;
  truth.resize(n + 1);
  for (int k = 0; k <= n; ++k) truth[k] = sampler.state(k * dt);
}

std::vector<NavRow> run(const RunConfig& cfg, const ImuStream& imu, const NavState& initial) {
  cfg.validate();
  const std::vector<ImuBatch> batches = make_batches(cfg, imu);
  const int n = cfg.samples_per_interval;
  NavState start = initial;
  start.t = imu.t_end.front() - 1.0 / cfg.sample_rate_hz;
  std::vector<NavRow> rows;
  rows.reserve(batches.size());
  try {
    propagate(cfg, batches, start, [&](std::size_t i, NavState& s, const IntervalSolution& sol) {
      // interval end taken from the stream, so the epoch does not accumulate rounding
      s.t = imu.t_end[(i + 1) * n - 1];
      NavRow row;
      row.state = s;
      row.iters = std::max(sol.attitude.iterations, sol.velpos.iterations);
      row.e_q = sol.e_q;
      row.e_v = sol.e_v;
      row.e_p = sol.e_p;
      rows.push_back(row);
    });
  } catch (const std::invalid_argument& e) {
    throw CliError(std::string("run: ") + e.what());
  }
  return rows;
}

ErrorRecord compare(const NavState& est, const NavState& truth) {
  ErrorRecord e;
  e.t = est.t;
  e.angle = principal_angle(truth.q, est.q);
  const Mat3 c = earth::cne(earth::ecef2lla(truth.p_e));
  e.vel_n = c.transpose() * (est.v_e - truth.v_e);
  const Vec3 dp = c.transpose() * (est.p_e - truth.p_e);
  e.pos_h = Vec3(dp[2], dp[0], dp[1]);
  return e;
}

std::vector<ErrorRecord> evaluate(const std::vector<NavRow>& nav, const std::vector<NavState>& truth) {
  std::vector<ErrorRecord> out;
  out.reserve(nav.size());
  for (std::size_t i = 0; i < nav.size(); ++i) {
    const double t = nav[i].state.t;
    const auto it = std::lower_bound(truth.begin(), truth.end(), t - kTimeTol,
                                     [](const NavState& s, double x) { return s.t < x; });
    if (it == truth.end() || std::abs(it->t - t) > kTimeTol) {
      throw CliError("evaluate: nav row " + std::to_string(i + 1) + " (t = " + format_number(t) +
                     ") has no truth row within 1e-9 s");
    }
    out.push_back(compare(nav[i].state, *it));
  }
  return out;
}

ErrorSummary summarize(const std::vector<ErrorRecord>& errors) {
  ErrorSummary s;
  s.count = errors.size();
  std::vector<double> a;
  std::vector<double> v[3], p[3];
  for (const ErrorRecord& e : errors) {
    a.push_back(e.angle);
    for (int c = 0; c < 3; ++c) {
      v[c].push_back(e.vel_n[c]);
      p[c].push_back(e.pos_h[c]);
    }
    s.max_horizontal = std::max(s.max_horizontal, std::hypot(e.pos_h[0], e.pos_h[1]));
  }
  s.angle = stats(a);
  for (int c = 0; c < 3; ++c) {
    s.vel[c] = stats(v[c]);
    s.pos[c] = stats(p[c]);
  }
  return s;
}

void print_summary(std::ostream& os, const std::string& label, const ErrorSummary& s) {
  const char* vel_names[3] = {"vel_north", "vel_up", "vel_east"};
  const char* pos_names[3] = {"pos_west_east", "pos_north_south", "pos_height"};
  os << label << ": " << s.count << " epochs\n";
  os << "  principal_angle  max " << format_number(s.angle.max) << "  rms " << format_number(s.angle.rms) << '\n';
  for (int c = 0; c < 3; ++c) {
    os << "  " << vel_names[c] << "  max " << format_number(s.vel[c].max) << "  rms " << format_number(s.vel[c].rms)
       << '\n';
  }
  for (int c = 0; c < 3; ++c) {
    os << "  " << pos_names[c] << "  max " << format_number(s.pos[c].max) << "  rms " << format_number(s.pos[c].rms)
       << '\n';
  }
  os << "  max_horizontal " << format_number(s.max_horizontal) << '\n';
}

BenchReport bench(const RunConfig& cfg, const ImuStream& imu, const NavState& initial) {
  cfg.validate();
  const std::vector<ImuBatch> batches = make_batches(cfg, imu);
  BenchReport report;
  report.repetitions = cfg.bench_repetitions;
  auto time_one = [&](Algorithm a) {
    RunConfig c = cfg;
    c.algorithm = a;
    double sink = 0.0;
    auto once = [&] {
      const auto t0 = std::chrono::steady_clock::now();
      propagate(c, batches, initial, [&](std::size_t, const NavState& s, const IntervalSolution&) { sink += s.t; });
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    once();  // warm-up
    std::vector<double> times;
    for (int r = 0; r < cfg.bench_repetitions; ++r) times.push_back(once());
    std::sort(times.begin(), times.end());
    const std::size_t m = times.size();
    const double median = m % 2 ? times[m / 2] : 0.5 * (times[m / 2 - 1] + times[m / 2]);
    if (!std::isfinite(sink)) throw CliError("bench: non-finite result");
    return median;
  };
  report.matrix_s = time_one(Algorithm::matrix);
  report.naive_s = time_one(Algorithm::naive);
  report.twosample_s = time_one(Algorithm::twosample);
  return report;
}

void print_bench(std::ostream& os, const BenchReport& r) {
  os << "median wall time over " << r.repetitions << " repetitions (warm-up excluded)\n";
  os << "  matrix     " << format_number(r.matrix_s) << " s\n";
  os << "  naive      " << format_number(r.naive_s) << " s\n";
  os << "  twosample  " << format_number(r.twosample_s) << " s\n";
  os << "  matrix/naive      " << format_number(r.matrix_over_naive()) << '\n';
  os << "  matrix/twosample  " << format_number(r.matrix_over_twosample()) << '\n';
}

}  // namespace inavm::cli
