#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "imcf/io.hpp"
#include "imcf/min_hull.hpp"
#include "imcf/models.hpp"
#include "imcf/scenario.hpp"

using namespace imcf;
using std::numbers::pi;

TEST(Numbers, RoundTripAndSpecialValues) {
  for (double x : {0.0, 1.0, -2.5, pi, 1e-300, 6.02214076e23, 0.1 + 0.2}) {
    EXPECT_EQ(io::parse_number(io::format_number(x)), x);
  }
  EXPECT_EQ(io::format_number(kInfinity), "inf");
  EXPECT_EQ(io::format_number(-kInfinity), "-inf");
  EXPECT_EQ(io::format_number(std::nan("")), "nan");
  EXPECT_EQ(io::parse_number("inf"), kInfinity);
  EXPECT_THROW((void)io::parse_number("1.5x"), ConfigError);
  EXPECT_EQ(io::number(kInfinity), io::json("inf"));
  EXPECT_EQ(io::number_from(io::json("-inf")), -kInfinity);
}

TEST(TwoColumnCsv, HeaderCommentsAndSeparators) {
  std::istringstream in("r,f\n# comment\n0, 0\n\n1\t1.5\n2;3 # trailing\n");
  const auto [x, y] = io::read_two_columns(in);
  EXPECT_EQ(x, (std::vector<double>{0.0, 1.0, 2.0}));
  EXPECT_EQ(y, (std::vector<double>{0.0, 1.5, 3.0}));

  std::istringstream bad_row("0,0\n1,2,3\n");
  EXPECT_THROW((void)io::read_two_columns(bad_row), ConfigError);
  std::istringstream late_text("0,0\nx,y\n");
  EXPECT_THROW((void)io::read_two_columns(late_text), ConfigError);
  std::istringstream empty("r,f\n");
  EXPECT_THROW((void)io::read_two_columns(empty), ConfigError);
}

TEST(TwoColumnCsv, WarpAndProfileLoaders) {
  std::istringstream warp("r,f\n0,0\n1,1\n2,2\n4,4\n");
  const auto w = io::load_warp_csv(warp);
  EXPECT_TRUE(w.is_sampled());
  EXPECT_DOUBLE_EQ(w.value(1.5), 1.5);
  EXPECT_DOUBLE_EQ(w.value(3.0), 3.0);

  std::istringstream prof("v,Ip\n1,1\n2,1.5\n4,2\n");
  const auto p = io::load_profile_csv(prof);
  EXPECT_EQ(p.form(), ProfileForm::tabulated);
  EXPECT_DOUBLE_EQ(p(3.0), 1.75);
  EXPECT_THROW((void)io::load_profile_csv("/nonexistent/profile.csv"), ConfigError);
}

TEST(ComplexJson, RoundTripPreservesCutValues) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = oracle::random_planar(rng, 3, 4);
    const auto back = io::complex_from_json(io::json::parse(io::to_json(c).dump()));
    ASSERT_EQ(back.size(), c.size());
    EXPECT_EQ(back.kind(), ComplexKind::planar);
    for (int s = 0; s < 10; ++s) {
      const auto e = oracle::random_subset(rng, c.size(), 0.5);
      EXPECT_EQ(perimeter(back, e), perimeter(c, e));
      EXPECT_EQ(back.volume(e), c.volume(e));
      EXPECT_EQ(minimize_J(back, back.all(), e & c.ball(1.5), c.all()),
                minimize_J(c, c.all(), e & c.ball(1.5), c.all()));
    }
  }
}

TEST(ComplexJson, RadialExteriorFacesAndErrors) {
  const auto m = models::make("dip", 3, 6.0, 0.01);
  const auto c = CellComplex::radial(m, radial_nodes(0.0, 4.0, 8));
  const auto j = io::to_json(c);
  EXPECT_EQ(j["kind"], "radial");
  EXPECT_EQ(j["interfaces"].front()["b"], "exterior");
  const auto back = io::complex_from_json(j);
  EXPECT_EQ(back.ball(2.0), c.ball(2.0));

  auto broken = j;
  broken["kind"] = "hexagonal";
  EXPECT_THROW((void)io::complex_from_json(broken), ConfigError);
  broken = j;
  broken.erase("cells");
  EXPECT_THROW((void)io::complex_from_json(broken), ConfigError);
}

TEST(RegionJson, HullExport) {
  const auto m = models::make("dip", 3, 6.0, 0.01);
  const auto c = CellComplex::radial(m, radial_nodes(0.0, 4.0, 16));
  const auto hull = maximal_volume_solution(c, c.ball(1.0), c.all());
  const auto j = io::to_json(c, hull);
  EXPECT_EQ(j["size"], 16);
  EXPECT_EQ(j["cells"].size(), 8u);
  EXPECT_DOUBLE_EQ(j["perimeter"].get<double>(), m.sphere_area(2.0));
  EXPECT_EQ(io::region_from_json(j), hull);
  EXPECT_THROW((void)io::region_from_json(io::json{{"size", 2}, {"cells", {5}}}), ConfigError);
}

TEST(CertificationJson, PerTimeVerdicts) {
  const auto m = models::make("euclidean", 3, 4.0, 0.01);
  const auto d = discretize_solution(solve(m, 1.0), radial_nodes(0.0, 3.0, 300));
  const std::vector<double> times{0.5, 1.0};
  const auto rep = certify_weak_solution(d.complex, d.u, times, d.complex.window(1.1, 2.5));
  const auto j = io::to_json(rep);
  EXPECT_EQ(j["pass"], rep.pass);
  ASSERT_EQ(j["entries"].size(), 2u);
  EXPECT_EQ(j["entries"][1]["t"], 1.0);
  EXPECT_TRUE(j["entries"][0].contains("violation"));
}

TEST(SolutionArtifacts, CsvAndJumpManifest) {
  const auto sol = solve(models::make("dip", 3, 6.0, 0.5), 1.0);
  std::ostringstream csv;
  io::write_solution_csv(csv, sol);
  std::istringstream back(csv.str());
  const auto [r, u] = io::read_two_columns(back);
  ASSERT_EQ(r.size(), sol.radii().size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_EQ(r[i], sol.radii()[i]);
    EXPECT_EQ(u[i], sol.values()[i]);
  }
  const auto j = io::jump_manifest(sol);
  ASSERT_EQ(j["jumps"].size(), 1u);
  EXPECT_EQ(j["jumps"][0]["t"], 0.0);
  EXPECT_NEAR(j["jumps"][0]["rho_t"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(j["jumps"][0]["rho_t_plus"].get<double>(), 2.0, 1e-12);
  EXPECT_EQ(j["proper"], true);
  EXPECT_EQ(j["T_max"], "inf");
}

TEST(BoundArtifacts, CsvRowsAndSummary) {
  const auto m = models::make("euclidean", 3, 40.0, 0.01);
  const auto sol = solve(m, 1.0);
  const std::vector<double> times{0.0, 1.0, 2.0, 3.0};
  const auto reps = verify_containment(sol, IsoProfile::power(4.836, 0.6667), 4.0 * pi, times);
  std::ostringstream csv;
  io::write_bound_csv(csv, reps);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "t,rho_t,R1,R_main,contained,margin");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    EXPECT_NE(line.find(",1,"), std::string::npos) << line;
  }
  EXPECT_EQ(rows, 4);
  const auto j = io::bound_summary(reps);
  EXPECT_EQ(j["all_contained"], true);
  EXPECT_EQ(j["hypotheses_ok"], true);
  EXPECT_GT(j["min_margin"].get<double>(), 0.0);
}

TEST(StabilizationJson, FieldsPerK) {
  const auto m = models::make("euclidean", 3, 40.0, 0.01);
  const std::vector<double> ks{4.0, 8.0, 16.0};
  const auto p = IsoProfile::power(std::cbrt(36.0 * pi), 2.0 / 3.0);
  const auto rep = stabilization_check(m, 1.0, p, std::exp(0.5) * 4.0 * pi, ks);
  const auto j = io::to_json(rep);
  ASSERT_EQ(j["entries"].size(), 3u);
  for (const auto& e : j["entries"]) {
    for (const char* key : {"k", "T_k", "T_tilde", "agrees_with_prev", "certified"}) EXPECT_TRUE(e.contains(key));
  }
  EXPECT_EQ(j["k1"], 16.0);
  EXPECT_EQ(j["entries"][2]["certified"], true);
  EXPECT_EQ(j["entries"][0]["certified"], false);
  EXPECT_EQ(j.dump(), io::to_json(stabilization_check(m, 1.0, p, std::exp(0.5) * 4.0 * pi, ks)).dump());
}

TEST(Scenario, DefaultsAndRoundTrip) {
  const auto s = parse_scenario(io::json::object());
  EXPECT_EQ(s.manifold.model, "euclidean");
  EXPECT_EQ(s.profile.kind, "candidate");
  EXPECT_EQ(s.seed, 0u);
  const auto j = to_json(s);
  const auto again = parse_scenario(j);
  EXPECT_EQ(to_json(again).dump(), j.dump());
}

TEST(Scenario, SectionsParse) {
  const auto doc = io::json::parse(R"({
    "manifold": {"model": "dip", "n": 4, "r_max": 30, "spacing": 0.02},
    "profile": {"kind": "piecewise", "small": {"c": 1, "alpha": 0.5}, "large": {"c": 2, "alpha": 0.1},
                "v_switch": 3},
    "grid": {"cells": 200, "refine": 1},
    "pipeline": {"r0": 0.5, "times": [0, 1], "k_list": [3, 6], "A": "inf", "windows": [[0.6, 2]]},
    "tolerances": {"certification": 1e-5},
    "seed": 17})");
  const auto s = parse_scenario(doc);
  EXPECT_EQ(s.manifold.n, 4);
  EXPECT_EQ(s.profile.large.alpha, 0.1);
  EXPECT_EQ(s.cells(), 400u);
  EXPECT_EQ(s.spacing(), 0.01);
  EXPECT_EQ(s.pipeline.A, kInfinity);
  EXPECT_EQ(s.pipeline.windows.size(), 1u);
  EXPECT_EQ(s.tolerances.certification, 1e-5);
  EXPECT_EQ(s.seed, 17u);
  const auto m = build_manifold(s);
  EXPECT_EQ(m.dimension(), 4);
  EXPECT_EQ(build_profile(s, m).form(), ProfileForm::piecewise_power);
}

TEST(Scenario, ValidationErrors) {
  const char* bad[] = {
      R"({"manifold": {"modle": "dip"}})",
      R"({"manifold": {"model": "torus"}})",
      R"({"manifold": {"n": 1}})",
      R"({"profile": {"kind": "cubic"}})",
      R"({"profile": {"kind": "tabulated"}})",
      R"({"pipeline": {"r0": 50}})",
      R"({"pipeline": {"times": [-1]}})",
      R"({"pipeline": {"k_list": [0.5]}})",
      R"({"pipeline": {"windows": [[2, 1]]}})",
      R"({"tolerances": {"cone_delta": 0.5}})",
      R"({"grid": {"cells": "many"}})",
      R"({"extra": 1})",
      R"([1, 2])",
  };
  for (const char* text : bad) EXPECT_THROW((void)parse_scenario(io::json::parse(text)), ConfigError) << text;
  std::istringstream not_json("{manifold:");
  EXPECT_THROW((void)parse_scenario(not_json), ConfigError);
}

TEST(Scenario, ProfileSpecStrings) {
  ProfileConfig p;
  apply_profile_spec("power:c=4.836,a=0.6667", p);
  EXPECT_EQ(p.kind, "power");
  EXPECT_EQ(p.c, 4.836);
  EXPECT_EQ(p.alpha, 0.6667);
  apply_profile_spec("piecewise:c1=1,a1=0.5,c2=2,a2=0,v=3", p);
  EXPECT_EQ(p.large.c, 2.0);
  EXPECT_EQ(p.v_switch, 3.0);
  apply_profile_spec("tabulated:/tmp/ip.csv", p);
  EXPECT_EQ(p.csv, "/tmp/ip.csv");
  apply_profile_spec("sharp", p);
  EXPECT_EQ(p.kind, "sharp");
  EXPECT_THROW(apply_profile_spec("power:c=1", p), ConfigError);
  EXPECT_THROW(apply_profile_spec("power:c=1,a=0.5,z=2", p), ConfigError);
  EXPECT_THROW(apply_profile_spec("power:c", p), ConfigError);
  EXPECT_THROW(apply_profile_spec("gaussian", p), ConfigError);
}

TEST(Scenario, SharpConstantAndAreaBound) {
  EXPECT_NEAR(sharp_constant(3), std::cbrt(36.0 * pi), 1e-12);
  EXPECT_NEAR(sharp_constant(2), 2.0 * std::sqrt(pi), 1e-12);
  Scenario s;
  const auto m = build_manifold(s);
  EXPECT_NEAR(area_bound(s, m), std::numbers::e * 4.0 * pi, 1e-12);
  s.pipeline.A = 50.0;
  EXPECT_EQ(area_bound(s, m), 50.0);
  const auto span = default_candidate_span(100.0);
  EXPECT_EQ(span.front(), 0.0);
  EXPECT_EQ(span.back(), 100.0);
  EXPECT_TRUE(std::is_sorted(span.begin(), span.end()));
}
