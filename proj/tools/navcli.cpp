#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "inavm/cli.hpp"

namespace cli = inavm::cli;

namespace {

struct Options {
  std::string config;
  std::vector<std::string> overrides;
  std::string imu;
  std::string truth;
  std::string out;
  std::string nav;
  std::string baseline;
  std::string algorithm;
};

cli::KeyValues gather(const Options& o) {
  cli::KeyValues kv;
  if (!o.config.empty()) kv = cli::read_config_file(o.config);
  for (const std::string& s : o.overrides) {
    auto [k, v] = cli::parse_override(s);
    kv[k] = v;
  }
  if (!o.algorithm.empty()) kv["algorithm"] = o.algorithm;
  return kv;
}

cli::RunConfig run_config(const Options& o) {
  cli::RunConfig cfg;
  cli::apply(cfg, gather(o));
  cfg.validate();
  return cfg;
}

template <typename Fn>
void write_file(const std::string& path, Fn fn) {
  std::ofstream os(path);
  if (!os) throw cli::CliError("cannot open '" + path + "' for writing");
  fn(os);
  os.flush();
  if (!os) throw cli::CliError("write to '" + path + "' failed");
}

// Initial state: the truth row at the first interval start when a truth file is
// given, the configured state otherwise.
inavm::NavState initial_state(const Options& o, const cli::RunConfig& cfg, const cli::ImuStream& imu) {
  if (o.truth.empty()) return cfg.initial_state();
  const std::vector<inavm::NavState> truth = cli::read_truth_file(o.truth);
  if (imu.size() == 0) throw cli::CliError("IMU stream is empty");
  const double t0 = imu.t_end.front() - 1.0 / cfg.sample_rate_hz;
  for (const inavm::NavState& s : truth) {
    if (std::abs(s.t - t0) <= 1e-9) return s;
  }
  throw cli::CliError("truth file '" + o.truth + "' has no row at the stream start t = " + cli::format_number(t0));
}

void cmd_simulate(const Options& o) {
  if (o.imu.empty() || o.truth.empty()) throw cli::CliError("simulate needs --imu and --truth output paths");
  inavm::scenario::ScenarioSpec spec;
  cli::apply(spec, gather(o));
  cli::ImuStream imu;
  std::vector<inavm::NavState> truth;
  cli::simulate(spec, imu, truth);
  write_file(o.imu, [&](std::ostream& os) { cli::write_imu_csv(os, imu); });
  write_file(o.truth, [&](std::ostream& os) { cli::write_truth_csv(os, truth); });
  std::cout << "wrote " << imu.size() << " IMU rows to " << o.imu << " and " << truth.size() << " truth rows to "
            << o.truth << '\n';
}

void cmd_run(const Options& o) {
  if (o.imu.empty() || o.out.empty()) throw cli::CliError("run needs --imu and --out");
  const cli::RunConfig cfg = run_config(o);
  const cli::ImuStream imu = cli::read_imu_file(o.imu);
  const inavm::NavState init = initial_state(o, cfg, imu);
  const std::vector<cli::NavRow> rows = cli::run(cfg, imu, init);
  write_file(o.out, [&](std::ostream& os) { cli::write_nav_csv(os, rows); });
  std::cout << cli::algorithm_name(cfg.algorithm) << ": wrote " << rows.size() << " nav rows to " << o.out << '\n';
}

void cmd_evaluate(const Options& o) {
  if (o.nav.empty() || o.truth.empty()) throw cli::CliError("evaluate needs --nav and --truth");
  const std::vector<inavm::NavState> truth = cli::read_truth_file(o.truth);
  const std::vector<cli::ErrorRecord> errors = cli::evaluate(cli::read_nav_file(o.nav), truth);
  if (!o.out.empty()) write_file(o.out, [&](std::ostream& os) { cli::write_error_csv(os, errors); });
  const cli::ErrorSummary s = cli::summarize(errors);
  cli::print_summary(std::cout, o.nav, s);
  if (o.baseline.empty()) return;
  const cli::ErrorSummary b = cli::summarize(cli::evaluate(cli::read_nav_file(o.baseline), truth));
  cli::print_summary(std::cout, o.baseline, b);
  std::cout << "error ratio baseline/nav: principal_angle " << cli::format_number(b.angle.max / s.angle.max)
            << "  max_horizontal " << cli::format_number(b.max_horizontal / s.max_horizontal) << '\n';
}

void cmd_bench(const Options& o) {
  if (o.imu.empty()) throw cli::CliError("bench needs --imu");
  const cli::RunConfig cfg = run_config(o);
  const cli::ImuStream imu = cli::read_imu_file(o.imu);
  const inavm::NavState init = initial_state(o, cfg, imu);
  cli::print_bench(std::cout, cli::bench(cfg, imu, init));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chebyshev-Picard strapdown navigation: simulate, run, evaluate, bench"};
  app.require_subcommand(1);
  Options o;

  auto add_config = [&](CLI::App* c) {
    c->add_option("--config", o.config, "key=value config file");
    c->add_option("--set", o.overrides, "override a config key (key=value), repeatable");
  };

  CLI::App* sim = app.add_subcommand("simulate", "write scenario IMU and truth CSVs");
  add_config(sim);
  sim->add_option("--imu", o.imu, "IMU CSV to write");
  sim->add_option("--truth", o.truth, "truth CSV to write");

  CLI::App* run = app.add_subcommand("run", "propagate an IMU CSV");
  add_config(run);
  run->add_option("--imu", o.imu, "IMU CSV input");
  run->add_option("--truth", o.truth, "truth CSV supplying the initial state");
  run->add_option("--out", o.out, "nav CSV to write");
  run->add_option("--algorithm", o.algorithm, "matrix, naive or twosample");

  CLI::App* ev = app.add_subcommand("evaluate", "compare a nav CSV with truth");
  ev->add_option("--nav", o.nav, "nav CSV");
  ev->add_option("--truth", o.truth, "truth CSV");
  ev->add_option("--out", o.out, "error CSV to write");
  ev->add_option("--baseline", o.baseline, "second nav CSV; prints baseline/nav error ratios");

  CLI::App* be = app.add_subcommand("bench", "time all three algorithms on one IMU CSV");
  add_config(be);
  be->add_option("--imu", o.imu, "IMU CSV input");
  be->add_option("--truth", o.truth, "truth CSV supplying the initial state");

  CLI11_PARSE(app, argc, argv);
  try {
    if (sim->parsed()) cmd_simulate(o);
    else if (run->parsed()) cmd_run(o);
    else if (ev->parsed()) cmd_evaluate(o);
    else if (be->parsed()) cmd_bench(o);
  } catch (const std::exception& e) {
    std::cerr << "navcli: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
