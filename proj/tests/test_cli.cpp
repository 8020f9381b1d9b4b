#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>

#include "inavm/cli.hpp"
#include "inavm/earth.hpp"
#include "support.hpp"

namespace inavm::cli {
namespace {

namespace fs = std::filesystem;

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const CliError& e) {
    return e.what();
  }
  return "";
}

void simulate_short(double duration, ImuStream& imu, std::vector<NavState>& truth) {
  scenario::ScenarioSpec s;
  s.kind = scenario::Kind::coning_plus_translation;
  s.duration = duration;
  simulate(s, imu, truth);
}

TEST(Config, OverridesAndValidation) {
  RunConfig c;
  apply(c, {{"samples_per_interval", "16"}, {"algorithm", "naive"}, {"velocity_n", "1, 2,3"}, {"gravity", "off"}});
  EXPECT_EQ(c.samples_per_interval, 16);
  EXPECT_EQ(c.algorithm, Algorithm::naive);
  EXPECT_EQ(c.velocity_n, Vec3(1, 2, 3));
  EXPECT_FALSE(c.gravity);
  EXPECT_THROW(apply(c, {{"bogus", "1"}}), CliError);
  EXPECT_THROW(apply(c, {{"m_q", "9.5"}}), CliError);
  EXPECT_THROW(apply(c, {{"tol", "abc"}}), CliError);
  EXPECT_THROW(apply(c, {{"velocity_n", "1,2"}}), CliError);
  RunConfig bad;
  bad.algorithm = Algorithm::twosample;
  bad.samples_per_interval = 7;
  EXPECT_THROW(bad.validate(), CliError);
  bad = RunConfig{};
  bad.m_v = 8;
  EXPECT_THROW(bad.validate(), CliError);
  EXPECT_NO_THROW(RunConfig{}.validate());
}

TEST(Config, ParseOverride) {
  EXPECT_EQ(parse_override(" m_q = 12 "), std::make_pair(std::string("m_q"), std::string("12")));
  EXPECT_THROW(parse_override("m_q"), CliError);
  EXPECT_THROW(parse_override("=3"), CliError);
}

TEST(Config, FileWithComments) {
  const fs::path p = fs::temp_directory_path() / "inavm_test_config.cfg";
  {
    std::ofstream out(p);
    out << "# comment\n\nkind = static  # trailing\nduration=12.5\n";
  }
  const KeyValues kv = read_config_file(p.string());
  EXPECT_EQ(kv.at("kind"), "static");
  EXPECT_EQ(kv.at("duration"), "12.5");
  scenario::ScenarioSpec s;
  apply(s, kv);
  EXPECT_EQ(s.kind, scenario::Kind::stationary);
  EXPECT_EQ(s.duration, 12.5);
  {
    std::ofstream out(p);
    out << "kind = static\nnonsense\n";
  }
  EXPECT_NE(error_of([&] { read_config_file(p.string()); }).find(":2:"), std::string::npos);
  fs::remove(p);
}

TEST(Csv, NavRoundTripIsExact) {
  testing::Gen g(91);
  std::vector<NavRow> rows(50);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].state = {g.uniform(0, 1e4), g.unit_quat(), g.vec(300), g.vec(7e6)};
    rows[i].iters = g.integer(1, 9);
    rows[i].e_q = std::ldexp(g.uniform(0, 1), -60);
    rows[i].e_v = g.uniform(0, 1e-10);
    rows[i].e_p = 0.1 + 0.2;
  }
  std::stringstream ss;
  write_nav_csv(ss, rows);
  const auto back = read_nav_csv(ss, "mem");
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].state.t, rows[i].state.t);
    EXPECT_EQ(back[i].state.q.vec4(), rows[i].state.q.vec4());
    EXPECT_EQ(back[i].state.v_e, rows[i].state.v_e);
    EXPECT_EQ(back[i].state.p_e, rows[i].state.p_e);
    EXPECT_EQ(back[i].iters, rows[i].iters);
    EXPECT_EQ(back[i].e_q, rows[i].e_q);
    EXPECT_EQ(back[i].e_p, rows[i].e_p);
  }
}

TEST(Csv, ImuAndTruthRoundTrip) {
  ImuStream imu;
  std::vector<NavState> truth;
  simulate_short(0.5, imu, truth);
  std::stringstream a, b;
  write_imu_csv(a, imu);
  write_truth_csv(b, truth);
  const ImuStream imu2 = read_imu_csv(a, "imu");
  const auto truth2 = read_truth_csv(b, "truth");
  ASSERT_EQ(imu2.size(), imu.size());
  for (std::size_t k = 0; k < imu.size(); ++k) {
    EXPECT_EQ(imu2.t_end[k], imu.t_end[k]);
    EXPECT_EQ(imu2.dtheta[k], imu.dtheta[k]);
    EXPECT_EQ(imu2.dv[k], imu.dv[k]);
  }
  ASSERT_EQ(truth2.size(), truth.size());
  EXPECT_EQ(truth2.back().p_e, truth.back().p_e);
}

TEST(Csv, MalformedInputNamesTheLine) {
  const char* header = "t_end,dthx,dthy,dthz,dvx,dvy,dvz\n";
  auto read = [](const std::string& text) {
    std::stringstream ss(text);
    return read_imu_csv(ss, "imu.csv");
  };
  EXPECT_NE(error_of([&] { read(""); }).find("imu.csv:1:"), std::string::npos);
  EXPECT_NE(error_of([&] { read("t,a\n"); }).find("imu.csv:1:"), std::string::npos);
  EXPECT_NE(error_of([&] { read(std::string(header) + "0.01,0,0,0,0,0,0\n0.02,0,0,x,0,0,0\n"); }).find("imu.csv:3:"),
            std::string::npos);
  EXPECT_NE(error_of([&] { read(std::string(header) + "0.01,0,0,0,0,0\n"); }).find("imu.csv:2:"), std::string::npos);
  EXPECT_NE(error_of([&] { read(std::string(header) + "0.02,0,0,0,0,0,0\n0.01,0,0,0,0,0,0\n"); }).find("imu.csv:3:"),
            std::string::npos);
}

TEST(Simulate, CountsAndDeterminism) {
  scenario::ScenarioSpec s;
  s.kind = scenario::Kind::stationary;
  s.duration = 10.0;
  ImuStream a, b;
  std::vector<NavState> ta, tb;
  simulate(s, a, ta);
  simulate(s, b, tb);
  EXPECT_EQ(a.size(), 1000u);
  EXPECT_EQ(ta.size(), 1001u);
  std::stringstream sa, sb;
  write_imu_csv(sa, a);
  write_imu_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  const NavState s0 = scenario::TruthSampler(s).state(0.0);
  EXPECT_EQ(ta.front().t, 0.0);
  EXPECT_EQ(ta.front().p_e, s0.p_e);
  EXPECT_EQ(ta.front().q.vec4(), s0.q.vec4());
}

TEST(Run, BatchesAndAlgorithms) {
  ImuStream imu;
  std::vector<NavState> truth;
  simulate_short(8.0, imu, truth);
  ASSERT_EQ(imu.size(), 800u);
  RunConfig cfg;
  const auto m = run(cfg, imu, truth.front());
  ASSERT_EQ(m.size(), 100u);
  EXPECT_NEAR(m.front().state.t, 0.08, 1e-12);
  EXPECT_NEAR(m.back().state.t, 8.0, 1e-12);
  for (const NavRow& r : m) {
    EXPECT_GE(r.iters, 1);
    EXPECT_LE(r.iters, 9);
  }
  cfg.algorithm = Algorithm::naive;
  const auto n = run(cfg, imu, truth.front());
  ASSERT_EQ(n.size(), 100u);
  double dp = 0.0, dq = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    dp = std::max(dp, (m[i].state.p_e - n[i].state.p_e).cwiseAbs().maxCoeff());
    dq = std::max(dq, principal_angle(m[i].state.q, n[i].state.q));
  }
  EXPECT_LT(dp, 1e-10);
  EXPECT_LT(dq, 1e-12);
  cfg.algorithm = Algorithm::twosample;
  const auto t = run(cfg, imu, truth.front());
  ASSERT_EQ(t.size(), 100u);
  EXPECT_EQ(t.back().state.t, m.back().state.t);
}

TEST(Run, RejectsPartialInterval) {
  ImuStream imu;
  std::vector<NavState> truth;
  simulate_short(0.5, imu, truth);
  RunConfig cfg;
  cfg.samples_per_interval = 7;
  const std::string msg = error_of([&] { run(cfg, imu, truth.front()); });
  EXPECT_NE(msg.find("not a multiple"), std::string::npos);
  EXPECT_NE(msg.find("line 50"), std::string::npos);
  ImuStream empty;
  EXPECT_THROW(run(RunConfig{}, empty, truth.front()), CliError);
}

TEST(Run, RejectsIrregularSpacing) {
  ImuStream imu;
  std::vector<NavState> truth;
  simulate_short(0.16, imu, truth);
  imu.t_end[5] += 1e-4;
  const std::string msg = error_of([&] { run(RunConfig{}, imu, truth.front()); });
  EXPECT_NE(msg.find("IMU line"), std::string::npos);
}

NavRow row_of(const NavState& s) {
  NavRow r;
  r.state = s;
  return r;
}

TEST(Evaluate, Examples) {
  const earth::GeodeticPos g{0.0, 0.0, 0.0};
  testing::Gen gen(92);
  NavState truth{1.0, gen.unit_quat(), Vec3(1, 2, 3), earth::lla2ecef(g)};
  ErrorRecord e = compare(truth, truth);
  EXPECT_EQ(e.angle, 0.0);
  EXPECT_EQ(e.vel_n.norm(), 0.0);
  EXPECT_EQ(e.pos_h.norm(), 0.0);

  NavState est = truth;
  est.p_e.x() += 1.0;
  e = compare(est, truth);
  EXPECT_NEAR(e.pos_h[2], 1.0, 1e-9);
  EXPECT_NEAR(e.pos_h[0], 0.0, 1e-9);
  EXPECT_NEAR(e.pos_h[1], 0.0, 1e-9);

  for (int k = 0; k < 20; ++k) {
    est = truth;
    est.q = truth.q * from_rotation_vector(1e-6 * gen.unit_vec());
    EXPECT_NEAR(compare(est, truth).angle, 1e-6, 1e-12);
  }
}

TEST(Evaluate, FrameConsistency) {
  testing::Gen gen(93);
  for (int k = 0; k < 20; ++k) {
    const Quaternion r = gen.unit_quat();
    const NavState truth{0.0, gen.unit_quat(), gen.vec(100), earth::lla2ecef(gen.geodetic())};
    NavState est = truth;
    est.q = truth.q * from_rotation_vector(gen.vec(1e-3));
    NavState rt = truth, re = est;
    rt.q = r * truth.q;
    re.q = r * est.q;
    EXPECT_NEAR(compare(re, rt).angle, compare(est, truth).angle, 1e-15);
  }
}

TEST(Evaluate, MatchesTimestampsAndSummarizes) {
  ImuStream imu;
  std::vector<NavState> truth;
  simulate_short(0.8, imu, truth);
  std::vector<NavRow> nav;
  for (int i = 1; i <= 10; ++i) nav.push_back(row_of(truth[8 * i]));
  nav[3].state.p_e.z() += 2.0;
  const auto errors = evaluate(nav, truth);
  ASSERT_EQ(errors.size(), 10u);
  const ErrorSummary s = summarize(errors);
  EXPECT_EQ(s.count, 10u);
  EXPECT_EQ(s.angle.max, 0.0);
  EXPECT_GT(s.max_horizontal, 0.0);
  EXPECT_NEAR(std::hypot(s.pos[0].max, s.pos[1].max), s.max_horizontal, 1e-9);
  nav[4].state.t += 1e-6;
  EXPECT_NE(error_of([&] { evaluate(nav, truth); }).find("no truth row"), std::string::npos);
}

TEST(Bench, RatiosPositiveFinite) {
  ImuStream imu;
  std::vector<NavState> truth;
  simulate_short(1.6, imu, truth);
  RunConfig cfg;
  const BenchReport r = bench(cfg, imu, truth.front());
  EXPECT_EQ(r.repetitions, cfg.bench_repetitions);
  for (double x : {r.matrix_over_naive(), r.matrix_over_twosample()}) {
    EXPECT_GT(x, 0.0);
    EXPECT_TRUE(std::isfinite(x));
  }
  EXPECT_LT(r.matrix_over_naive(), 1.0);
}

class NavcliTool : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("inavm_navcli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int sh(const std::string& args) {
    const std::string cmd = "cd '" + dir_.string() + "' && '" NAVCLI_PATH "' " + args + " >out.txt 2>err.txt";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  }
  std::string slurp(const std::string& name) {
    std::ifstream in(dir_ / name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

TEST_F(NavcliTool, EndToEnd) {
  ASSERT_EQ(sh("simulate --set duration=4 --set kind=coning_plus_translation --imu imu.csv --truth truth.csv"), 0)
      << slurp("err.txt");
  const std::string imu1 = slurp("imu.csv");
  ASSERT_EQ(sh("simulate --set duration=4 --set kind=coning_plus_translation --imu imu.csv --truth truth.csv"), 0);
  EXPECT_EQ(slurp("imu.csv"), imu1);
  ASSERT_EQ(sh("run --imu imu.csv --truth truth.csv --out nav.csv"), 0) << slurp("err.txt");
  ASSERT_EQ(sh("run --imu imu.csv --truth truth.csv --out two.csv --algorithm twosample"), 0) << slurp("err.txt");
  ASSERT_EQ(read_nav_file((dir_ / "nav.csv").string()).size(), 50u);
  ASSERT_EQ(sh("evaluate --nav nav.csv --truth truth.csv --out err.csv --baseline two.csv"), 0) << slurp("err.txt");
  EXPECT_NE(slurp("out.txt").find("max_horizontal"), std::string::npos);
  EXPECT_NE(slurp("out.txt").find("error ratio"), std::string::npos);
  EXPECT_NE(sh("run --imu imu.csv --truth truth.csv --out x.csv --set samples_per_interval=7"), 0);
  EXPECT_NE(slurp("err.txt").find("navcli:"), std::string::npos);
  EXPECT_NE(sh("run --imu missing.csv --out x.csv"), 0);
  EXPECT_NE(sh("frobnicate"), 0);
}

}  // namespace
}  // namespace inavm::cli
