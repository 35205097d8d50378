#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "imcf/conic_exhaustion.hpp"
#include "imcf/models.hpp"

using namespace imcf;
using std::numbers::pi;

namespace {

IsoProfile euclidean_profile() { return IsoProfile::power(std::cbrt(36.0 * pi), 2.0 / 3.0); }

IsoProfile candidate(const WarpedManifold& m) {
  std::vector<double> span{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.5, 8.0, 10.0, 13.0, 16.0};
  for (double r = 20.0; r < m.r_max(); r *= 1.25) span.push_back(r);
  span.push_back(m.r_max());
  return symmetric_candidate_profile(m, span);
}

}  // namespace

TEST(Cutoff, StepShapeAndDerivative) {
  for (double x : {0.0, 0.25, 0.5}) EXPECT_EQ(detail::eta(x), 1.0);
  for (double x : {0.75, 1.0, 3.0}) EXPECT_EQ(detail::eta(x), 0.0);
  double prev = 1.0;
  for (double x = 0.5; x <= 0.75; x += 0.01) {
    EXPECT_LE(detail::eta(x), prev);
    prev = detail::eta(x);
    const double h = 1e-6;
    const double fd = (detail::eta(x + h) - detail::eta(x - h)) / (2.0 * h);
    EXPECT_NEAR(detail::deta(x), fd, 1e-5);
  }
}

TEST(BuildCone, EuclideanBase) {
  const auto m = models::make("euclidean", 3, 20.0, 0.01);
  const auto cm = build_cone(m, 4.0);
  EXPECT_GE(cm.C(), 1.0);
  EXPECT_EQ(cm.delta(), 0.125);
  for (double r : {0.5, 1.0, 3.9, 4.0}) EXPECT_DOUBLE_EQ(cm.warp_k(r), r);
  for (int j = 1; j <= 1000; ++j) {
    const double r = 4.0 + 0.125 * j / 1000.0;
    EXPECT_GT(cm.warp_k(r), r);
  }
  // Linear beyond the collar, continuous at both ends of it.
  const double slope = std::sqrt(cm.C()) * (4.125) / 0.125;
  for (double r : {4.2, 5.0, 9.0}) EXPECT_NEAR(cm.warp_k(r), slope * (r - 4.0), 1e-12 * slope * r);
  EXPECT_NEAR(cm.warp_k(4.0 + 1e-9), 4.0, 1e-8);
  EXPECT_NEAR(cm.warp_k(4.125 - 1e-12), cm.warp_k(4.125), 1e-9);
  EXPECT_GE(cm.manifold().r_max(), 10.0);
}

TEST(BuildCone, CollarDerivativeMatchesDifferences) {
  const auto m = models::make("log_cylinder", 3, 20.0, 0.01);
  const auto cm = build_cone(m, 6.0);
  const auto& w = cm.manifold().warp();
  for (double s = 0.01; s < 0.125; s += 0.01) {
    const double r = 6.0 + s, h = 1e-7;
    EXPECT_NEAR(w.derivative(r), (w.value(r + h) - w.value(r - h)) / (2.0 * h), 1e-5 * (1.0 + std::abs(w.derivative(r))));
  }
}

TEST(BuildCone, CylinderBase) {
  const auto m = models::make("cylinder", 3, 20.0, 0.01);
  const auto cm = build_cone(m, 5.0);
  for (double r : {0.0, 2.0, 5.0}) EXPECT_EQ(cm.warp_k(r), 1.0);
  for (int j = 1; j <= 1000; ++j) EXPECT_GT(cm.warp_k(5.0 + 0.125 * j / 1000.0), 1.0);
  EXPECT_GT(cm.warp_k(7.0), cm.warp_k(6.0));
}

TEST(BuildCone, DipIdentificationRegion) {
  const auto m = models::make("dip", 3, 20.0, 0.01);
  const auto cm = build_cone(m, 3.0);
  for (double r = 0.0; r <= 3.0; r += 0.05) EXPECT_EQ(cm.warp_k(r), m.f(r));
}

// Sphere areas under f_k dominate those under f in the collar, strictly,
// at every grid node of the conic model.
TEST(BuildCone, CollarAreaComparison) {
  const auto m = models::make("two_dips", 3, 20.0, 0.01);
  const auto cm = build_cone(m, 4.5);
  int nodes = 0;
  for (double r : cm.manifold().grid()) {
    if (r <= 4.5 || r >= 4.625) continue;
    EXPECT_GT(cm.manifold().sphere_area(r), m.sphere_area(r));
    ++nodes;
  }
  EXPECT_GE(nodes, 500);
}

TEST(BuildCone, Errors) {
  const auto m = models::make("euclidean", 3, 10.0, 0.01);
  EXPECT_THROW((void)build_cone(m, 9.5), DomainError);
  EXPECT_THROW((void)build_cone(m, 4.0, {.delta = 0.2}), DomainError);
  // The warp collapses at the collar end, so no bounded C lifts the blend.
  const WarpedManifold thin(3, Warp::sampled({0.0, 5.0, 5.125, 20.0}, {1.0, 1.0, 1e-4, 1.0}), 20.0, 0.01);
  EXPECT_THROW((void)build_cone(thin, 5.0), ConstructionError);
}

TEST(SolveOnCone, EuclideanMatchesClosedForm) {
  const auto m = models::make("euclidean", 3, 20.0, 0.01);
  const auto u = solve_on_cone(build_cone(m, 4.0), 1.0);
  EXPECT_TRUE(properness_check(u));
  for (double r : {1.0, 2.0, 3.5, 4.0}) EXPECT_NEAR(u.u(r), 2.0 * std::log(r), 1e-12);
  EXPECT_NEAR(first_escape_time(u, 4.0), 2.0 * std::log(4.0), 1e-12);
  EXPECT_THROW((void)solve_on_cone(build_cone(m, 4.0), 4.5), DomainError);
}

TEST(SolveOnCone, CylinderJumpsToTheCollar) {
  const auto m = models::make("cylinder", 3, 20.0, 0.01);
  const auto cm = build_cone(m, 5.0);
  const auto u = solve_on_cone(cm, 1.0);
  EXPECT_TRUE(properness_check(u));
  for (double r : {1.0, 3.0, 5.0}) EXPECT_EQ(u.u(r), 0.0);
  EXPECT_GT(u.u(6.0), 0.0);
  EXPECT_GT(u.u(8.0), u.u(6.0));
  EXPECT_EQ(first_escape_time(u, 5.0), 0.0);
  const double jump = u.sublevel(0.0).rho_plus;
  EXPECT_GE(jump, 5.0);
  EXPECT_LE(jump, 5.0 + cm.delta());
}

TEST(SolveOnCone, DipAgreesWithBaseBelowK) {
  const auto m = models::make("dip", 3, 20.0, 0.01);
  const auto base = solve(m, 1.0);
  const auto u = solve_on_cone(build_cone(m, 5.0), 1.0);
  const double T = first_escape_time(u, 5.0);
  EXPECT_GT(T, 0.0);
  EXPECT_EQ(u.sublevel(0.0).rho_plus, base.sublevel(0.0).rho_plus);
  for (double r : m.grid()) {
    if (r < 1.0 || r > 5.0) continue;
    if (u.u(r) < T) {
      EXPECT_NEAR(u.u(r), base.u(r), 1e-12) << r;
    }
  }
}

TEST(FirstEscapeTime, PositiveAndMonotoneInK) {
  for (const char* name : {"euclidean", "log_cylinder", "dip", "two_dips"}) {
    const auto m = models::make(name, 3, 30.0, 0.01);
    double prev = -1.0;
    for (double k : {3.0, 4.0, 6.0, 8.0, 12.0}) {
      const double T = first_escape_time(solve_on_cone(build_cone(m, k), 1.0), k);
      EXPECT_GT(T, 0.0) << name << " k=" << k;
      EXPECT_GE(T, prev) << name << " k=" << k;
      prev = T;
    }
  }
}

TEST(JumpingControl, EuclideanConsistentProfile) {
  const auto m = models::make("euclidean", 3, 20.0, 0.01);
  const auto cm = build_cone(m, 8.0);
  const auto u = solve_on_cone(cm, 1.0);
  const double r = std::exp(0.5);
  const auto v = jumping_control_check(cm, u, euclidean_profile(), 1.0, r);
  ASSERT_TRUE(v.hypotheses_ok) << v.note;
  EXPECT_TRUE(v.premise);
  EXPECT_TRUE(v.holds);
  EXPECT_NEAR(v.rho_plus, v.rho_t, 1e-9);
  EXPECT_NEAR(v.R, r + 1.0 + 2.0 * r, 1e-9);
}

TEST(JumpingControl, DipAtTimeZero) {
  const auto m = models::make("dip", 3, 40.0, 0.01);
  const auto cm = build_cone(m, 16.0);
  const auto u = solve_on_cone(cm, 1.0);
  const auto v = jumping_control_check(cm, u, candidate(m), 0.0, 1.0);
  ASSERT_TRUE(v.hypotheses_ok) << v.note;
  EXPECT_TRUE(v.premise);
  EXPECT_NEAR(v.rho_plus, 2.0, 1e-12);
  EXPECT_TRUE(v.holds);
}

TEST(JumpingControl, InflatedAreaFailsHypotheses) {
  const auto m = models::make("dip", 3, 40.0, 0.01);
  const auto cm = build_cone(m, 16.0);
  const auto u = solve_on_cone(cm, 1.0);
  const auto p = candidate(m);
  const auto v = jumping_control_check(cm, u, p, 0.0, 1.0, 2.0 * p.liminf_surrogate());
  EXPECT_FALSE(v.hypotheses_ok);
  EXPECT_FALSE(v.holds);
  EXPECT_FALSE(v.note.empty());
  const auto small_k = jumping_control_check(build_cone(m, 3.0), solve_on_cone(build_cone(m, 3.0), 1.0), p, 0.0, 1.0);
  EXPECT_FALSE(small_k.hypotheses_ok);
}

// Sharp profile: R_2(1/2) = 5 + (4 + e^{1/2}) e^{1/4} ~ 12.3, so k1 = 16.
TEST(Stabilization, EuclideanSharpProfile) {
  const auto m = models::make("euclidean", 3, 40.0, 0.01);
  const std::vector<double> ks{4.0, 8.0, 16.0, 24.0};
  const auto rep = stabilization_check(m, 1.0, euclidean_profile(), std::exp(0.5) * 4.0 * pi, ks);
  ASSERT_TRUE(rep.hypotheses_ok) << rep.note;
  EXPECT_NEAR(rep.T_tilde, 0.5, 1e-12);
  EXPECT_NEAR(rep.R2, 5.0 + (4.0 + std::exp(0.5)) * std::exp(0.25), 1e-9);
  ASSERT_TRUE(rep.k1_found);
  EXPECT_EQ(rep.k1, 16.0);
  EXPECT_TRUE(rep.all_reach);
  EXPECT_EQ(rep.worst_disagreement, 0.0);
  EXPECT_TRUE(rep.certified) << rep.certification_violation;
  EXPECT_TRUE(rep.pass);
  for (const auto& e : rep.entries) EXPECT_TRUE(e.reaches_T_tilde);
}

TEST(Stabilization, DipStraddlingK1) {
  const auto m = models::make("dip", 3, 60.0, 0.01);
  const std::vector<double> ks{4.0, 8.0, 16.0, 32.0, 48.0};
  const auto rep = stabilization_check(m, 1.0, candidate(m), std::exp(1.0) * m.sphere_area(1.0), ks);
  ASSERT_TRUE(rep.hypotheses_ok) << rep.note;
  ASSERT_TRUE(rep.k1_found);
  EXPECT_GT(rep.k1, rep.R2);
  EXPECT_FALSE(rep.entries.front().above_k1);
  EXPECT_TRUE(rep.entries.back().above_k1);
  EXPECT_TRUE(rep.pass) << rep.note;
  EXPECT_LE(rep.worst_disagreement, 1e-8);
}

TEST(Stabilization, ReportsMissingK1AndFailedHypotheses) {
  const auto m = models::make("dip", 3, 60.0, 0.01);
  const std::vector<double> ks{3.0, 5.0, 9.0};
  const auto rep = stabilization_check(m, 1.0, candidate(m), std::exp(1.0) * m.sphere_area(1.0), ks);
  EXPECT_TRUE(rep.hypotheses_ok);
  EXPECT_FALSE(rep.k1_found);
  EXPECT_FALSE(rep.pass);
  EXPECT_EQ(rep.entries.size(), 3u);

  const auto cyl = models::make("cylinder", 3, 60.0, 0.01);
  const auto bad = stabilization_check(cyl, 1.0, candidate(cyl), 0.9 * cyl.sphere_area(1.0), ks);
  EXPECT_FALSE(bad.hypotheses_ok);
  EXPECT_FALSE(bad.pass);
  EXPECT_FALSE(bad.note.empty());
}

TEST(LimitSolution, RecoversDirectSolve) {
  const std::vector<double> ls{1.0, 2.0};
  const std::vector<double> ks{8.0, 16.0, 32.0, 48.0, 64.0};
  StabilizationOptions opt;
  opt.certify = false;
  for (const char* name : {"euclidean", "log_cylinder", "dip"}) {
    const auto m = models::make(name, 3, 80.0, 0.01);
    const auto res = limit_solution(m, 1.0, candidate(m), ls, ks, opt);
    EXPECT_TRUE(res.pass) << name;
    EXPECT_LE(res.diff_vs_direct, 1e-8) << name;
    EXPECT_LE(res.worst_pair_diff, 1e-8) << name;
    EXPECT_GT(res.radii.size(), 10u);
    EXPECT_EQ(res.radii.front(), 1.0);
  }
}

TEST(LimitSolution, DipKeepsItsJump) {
  const auto m = models::make("dip", 3, 80.0, 0.01);
  const std::vector<double> ls{1.0};
  const std::vector<double> ks{32.0, 48.0};
  const auto res = limit_solution(m, 1.0, candidate(m), ls, ks);
  ASSERT_TRUE(res.pass);
  for (std::size_t i = 0; i < res.radii.size(); ++i) {
    if (res.radii[i] <= 2.0) {
      EXPECT_EQ(res.values[i], 0.0);
    }
  }
  EXPECT_TRUE(res.reports.front().certified);
}
