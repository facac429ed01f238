#include <random>

#include "doctest.h"
#include "sp2lab/report.hpp"
#include "sp2lab/run_config.hpp"

using namespace sp2lab;

TEST_CASE("run config round trip") {
  CHECK(parse_run_config(serialize(RunConfig{})) == RunConfig{});
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0.01, 0.7);
  for (int s = 0; s < 50; ++s) {
    RunConfig c;
    c.params.nu1 = U(rng);
    c.params.nu2 = U(rng);
    c.params.l1u = s % 3 == 0 ? Scale::inf() : Scale::of(U(rng) * 10);
    c.params.l1d = s % 5 == 0 ? Scale::inf() : Scale::of(U(rng) / 7);
    c.theta_steps = 2 + s;
    c.t_steps = 3 + s % 7;
    c.restarts = 1 + s;
    c.planes_per_point = s;
    c.seed = rng();
    c.fd_step = U(rng) * 1e-3;
    c.flat_threshold = U(rng) * 1e-9;
    c.threads = s % 4;
    c.out = "out dir/" + std::to_string(s);
    CHECK(parse_run_config(serialize(c)) == c);
    CHECK(serialize(parse_run_config(serialize(c))) == serialize(c));
  }
}

TEST_CASE("run config parsing") {
  const RunConfig c = parse_run_config("# comment\n\nnu1 = 0.4\n  l1d=inf  \nseed = 7\n");
  CHECK(c.params.nu1 == 0.4);
  CHECK(c.params.nu2 == 0.5);
  CHECK(c.params.l1d.infinite);
  CHECK(c.seed == 7);
  CHECK_THROWS_AS(parse_run_config("colour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("nu1 0.4\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("nu1 = 0.4x\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("theta_steps = 2.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("seed = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("l1u = 0\n"), ConfigError);
  CHECK_THROWS_AS(load_run_config("/nonexistent/config.txt"), ConfigError);
}

TEST_CASE("run config validation") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  c.params.nu1 = kNuMax;
  CHECK_NOTHROW(c.validate());
  c.params.nu1 = kNuMax + 2e-12;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.theta_steps = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.fd_step = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.flat_threshold = -1e-8;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.fd_step = 2e-3;
  c.flat_threshold = 3e-9;
  c.planes_per_point = 9;
  const VerifyOptions o = c.verify_options();
  CHECK(o.fd.step == 2e-3);
  CHECK(o.flat_threshold == 3e-9);
  CHECK(o.planes_per_point == 9);
}

TEST_CASE("json writer prints 17 significant digits") {
  Json j;
  j["a"] = 0.1;
  j["b"] = 1e-300;
  j["c"] = std::numeric_limits<double>::infinity();
  j["d"] = Json::array({1.0, 2, "x"});
  j["e"] = Json::object();
  const std::string s = dump_json(j, 0);
  CHECK(s == "{\"a\":0.10000000000000001,\"b\":1e-300,\"c\":null,\"d\":[1, 2, \"x\"],\"e\":{}}\n");
  // every double survives the text form
  std::mt19937_64 rng(2);
  std::normal_distribution<double> N(0, 1e3);
  for (int i = 0; i < 200; ++i) {
    const double v = N(rng);
    Json k;
    k["v"] = v;
    CHECK(Json::parse(dump_json(k))["v"].get<double>() == v);
  }
}

TEST_CASE("report layouts") {
  ScanReport R;
  R.params = MetricParams{};
  ScanPoint p;
  p.theta = 0.5;
  p.t = 0.25;
  p.min_sec = 0.125;
  p.u.setZero();
  p.v.setZero();
  p.u[0] = 1;
  p.v[1] = 1;
  R.points.push_back(p);
  const std::string csv = samples_csv(R);
  CHECK(csv.rfind("theta,t,min_sec,fd_sec,u0,u1,u2,u3,u4,u5,u6,v0,v1,v2,v3,v4,v5,v6,classification,on_zero_locus\n", 0) == 0);
  CHECK(csv.find("0.5,0.25,0.125,0,1,0,0,0,0,0,0,0,1,0,0,0,0,0,Positive,false\n") != std::string::npos);
  const Json j = scan_report_json(R, RunConfig{});
  CHECK(j["points"].size() == 1);
  CHECK(j["metric"] == "full");
  const Json h = homology_json(homology_E(2, 0));
  CHECK(h["H"][3] == "Z/2");
  CHECK(h["pi3"] == "Z/2");
  SuiteResult S{"x", {{"x.a", true, 0.5, 1.0, 3, "", ""}, {"x.b", false, 2.0, 1.0, 1, "", "here"}}};
  CHECK_FALSE(S.pass());
  const Json v = verify_json({S}, RunConfig{});
  CHECK(v["status"] == "fail");
  CHECK(v["suites"][0]["checks"]["x.a"]["status"] == "pass");
  CHECK(v["suites"][0]["checks"]["x.a"]["counterexample"].is_null());
  CHECK(v["suites"][0]["checks"]["x.b"]["counterexample"] == "here");
}
