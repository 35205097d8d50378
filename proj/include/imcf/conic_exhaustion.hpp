#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "imcf/bounds_checker.hpp"
#include "imcf/cell_complex.hpp"
#include "imcf/discrete_variational.hpp"
#include "imcf/error.hpp"
#include "imcf/iso_profile.hpp"
#include "imcf/min_hull.hpp"
#include "imcf/symmetric_imcf.hpp"
#include "imcf/warped_geometry.hpp"

namespace imcf {

namespace detail {

inline double psi(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
inline double dpsi(double x) { return x > 0.0 ? std::exp(-1.0 / x) / (x * x) : 0.0; }

/// Smooth step: 1 on [0, 1/2], 0 on [3/4, inf).
inline double eta(double x) {
  if (x <= 0.5) return 1.0;
  if (x >= 0.75) return 0.0;
  const double a = psi(0.75 - x), b = psi(x - 0.5);
  return a / (a + b);
}

inline double deta(double x) {
  if (x <= 0.5 || x >= 0.75) return 0.0;
  const double a = psi(0.75 - x), b = psi(x - 0.5);
  const double da = -dpsi(0.75 - x), db = dpsi(x - 0.5);
  return (da * b - a * db) / ((a + b) * (a + b));
}

}  // namespace detail

struct ConeOptions {
  double delta = 0.125;              ///< collar width, at most 1/8
  std::size_t collar_checks = 1000;  ///< points where f_k > f is verified
  std::size_t collar_nodes = 512;    ///< collar breakpoints handed to the grid
  double C_cap = 1e6;
};

/// Base warp f replaced beyond k by a collar blend and a linear cone. With
/// s = r - k and sigma = s / delta:
///   f_k^2 = (1 + sigma^2) eta(sigma) f^2 + C (1 - eta(sigma)) sigma^2 f(k + delta)^2
/// on [k, k + delta], and f_k = sqrt(C) sigma f(k + delta) beyond.
class ConicModel {
 public:
  const WarpedManifold& base() const { return *base_; }
  const WarpedManifold& manifold() const { return *cone_; }
  double k() const { return k_; }
  double delta() const { return delta_; }
  double C() const { return C_; }

  double warp_k(double r) const { return cone_->f(r); }

  friend ConicModel build_cone(const WarpedManifold& m, double k, ConeOptions opt);

 private:
  std::shared_ptr<const WarpedManifold> base_;
  std::shared_ptr<const WarpedManifold> cone_;
  double k_ = 0.0;
  double delta_ = 0.0;
  double C_ = 0.0;
};

inline ConicModel build_cone(const WarpedManifold& m, double k, ConeOptions opt = {}) {
  const double delta = opt.delta;
  if (!(delta > 0.0 && delta <= 0.125)) throw DomainError("build_cone: need 0 < delta <= 1/8");
  if (!(k > 0.0 && k < m.r_max() - 1.0)) throw DomainError("build_cone: need 0 < k < r_max - 1");
  auto base = std::make_shared<const WarpedManifold>(m);
  const Warp& w = base->warp();
  const double F = w.value(k + delta);

  // Lambdas hold the base manifold by shared_ptr so the cone outlives cm.
  auto blend_sq = [=](double r, double C) {
    const double sigma = (r - k) / delta;
    const double f = base->warp().value(r);
    const double e = detail::eta(sigma);
    return (1.0 + sigma * sigma) * e * f * f + C * (1.0 - e) * sigma * sigma * F * F;
  };

  double C = 1.0;
  for (;; C *= 2.0) {
    if (C > opt.C_cap) {
      throw ConstructionError("build_cone: no C <= " + std::to_string(opt.C_cap) +
                              " keeps f_k above f on the collar");
    }
    bool ok = true;
    for (std::size_t j = 1; j <= opt.collar_checks && ok; ++j) {
      const double r = k + delta * static_cast<double>(j) / static_cast<double>(opt.collar_checks);
      ok = std::sqrt(blend_sq(r, C)) > w.value(r);
    }
    if (ok) break;
  }

  // Base segments between its breakpoints below k; the side is chosen so
  // one-sided derivatives at kinks stay correct.
  std::vector<double> starts{0.0};
  for (double b : w.breakpoints()) {
    if (b < k) starts.push_back(b);
  }
  std::vector<WarpSegment> segs;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const double lo = starts[i];
    const double hi = i + 1 < starts.size() ? starts[i + 1] : k;
    const double mid = 0.5 * (lo + hi);
    segs.push_back({lo, [base](double r) { return base->warp().value(r); },
                    [base, mid](double r) { return base->warp().derivative(r, r > mid ? Side::left : Side::right); }});
  }
  const double sqC = std::sqrt(C);
  segs.push_back({k, [=](double r) { return std::sqrt(blend_sq(r, C)); },
                  [=](double r) {
                    const double sigma = (r - k) / delta;
                    const double f = base->warp().value(r), df = base->warp().derivative(r, Side::right);
                    const double e = detail::eta(sigma), de = detail::deta(sigma);
                    const double g = (2.0 * sigma * e + (1.0 + sigma * sigma) * de) / delta * f * f +
                                     (1.0 + sigma * sigma) * e * 2.0 * f * df +
                                     C * ((1.0 - e) * 2.0 * sigma - de * sigma * sigma) / delta * F * F;
                    return g / (2.0 * std::sqrt(blend_sq(r, C)));
                  }});
  segs.push_back({k + delta, [=](double r) { return sqC * F * (r - k) / delta; },
                  [=](double) { return sqC * F / delta; }});
  std::vector<double> collar;
  for (std::size_t j = 1; j < opt.collar_nodes; ++j) {
    collar.push_back(k + delta * static_cast<double>(j) / static_cast<double>(opt.collar_nodes));
  }
  Warp wk(w.name() + "_cone", std::move(segs), std::move(collar));
  const double r_max = std::max(m.r_max(), 2.0 * (k + 1.0));

  ConicModel cm;
  cm.base_ = base;
  cm.cone_ = std::make_shared<const WarpedManifold>(m.dimension(), std::move(wk), r_max, m.spacing());
  cm.k_ = k;
  cm.delta_ = delta;
  cm.C_ = C;
  return cm;
}

/// The proper solution u_k on the conic model.
inline SymmetricSolution solve_on_cone(const ConicModel& cm, double r0, SolveOptions opt = {}) {
  if (!(r0 < cm.k())) throw DomainError("solve_on_cone: need r0 < k");
  SymmetricSolution sol(cm.manifold(), r0, opt);
  if (!sol.proper()) throw ConstructionError("solve_on_cone: solution on the conic model is not proper");
  return sol;
}

/// T_k = sup{t >= 0 : E_t(u_k) inside B(k)}. Since u_k is continuous and
/// nondecreasing in r this is u_k(k); E_{T_k} inside B(k) is asserted.
inline double first_escape_time(const SymmetricSolution& u_k, double k) {
  if (k < u_k.r0()) throw DomainError("first_escape_time: k below r0");
  const double T = u_k.u(k);
  if (u_k.sublevel(T).rho > k * (1.0 + 1e-12) + 1e-12) {
    throw ConstructionError("first_escape_time: E_{T_k} leaves B(k)");
  }
  return T;
}

struct JumpControlVerdict {
  double R = kInfinity;
  double rho_t = 0.0;
  double rho_plus = 0.0;
  bool hypotheses_ok = false;  ///< finite R, t <= log(A / a0) and k > R
  bool premise = false;        ///< E_t inside B(r)
  bool holds = false;          ///< premise implies E_t^+ inside B(R)
  std::string note;
};

/// If E_t(u_k) lies in B(r) then E_t^+(u_k) lies in B(R) with
/// R = r + 1 + 2 int_0^{Isp^{-1}(e^t a0)} dv/Ip. a0 <= 0 means |dB(r0)|.
inline JumpControlVerdict jumping_control_check(const ConicModel& cm, const SymmetricSolution& u_k,
                                                const IsoProfile& p, double t, double r, double a0 = -1.0,
                                                double A = kInfinity) {
  JumpControlVerdict v;
  if (a0 <= 0.0) a0 = cm.manifold().sphere_area(u_k.r0());
  const auto s = u_k.sublevel(t);
  v.rho_t = s.rho;
  v.rho_plus = s.rho_plus;
  v.premise = v.rho_t <= r;
  try {
    if (t > std::log(A / a0)) throw NonDegeneracyExceeded("t beyond log(A/a0)");
    v.R = barrier_radius(p, r, std::exp(t) * a0);
  } catch (const Error& e) {
    v.note = e.what();
    return v;
  }
  if (!(cm.k() > v.R)) {
    v.note = "k = " + std::to_string(cm.k()) + " does not exceed R = " + std::to_string(v.R);
    return v;
  }
  v.hypotheses_ok = true;
  v.holds = !v.premise || v.rho_plus <= v.R;
  return v;
}

struct StabilizationOptions {
  ConeOptions cone;
  SolveOptions solve;
  double agreement_tol = 1e-8;
  bool certify = true;
  double cert_spacing = 5e-4;  ///< radial cell width of the certification complex
  double cert_tol = 1e-6;
  std::size_t cert_times = 4;
};

struct StabilizationEntry {
  double k = 0.0;
  double C = 0.0;
  double T_k = 0.0;
  bool above_k1 = false;
  bool reaches_T_tilde = false;    ///< T_k >= T~
  double sup_diff_prev = 0.0;      ///< against the previous k, on {u < T~}
  bool agrees_with_prev = true;
  bool maximum_principle = false;  ///< rho^+ at T_k within k + delta
};

struct StabilizationReport {
  bool hypotheses_ok = false;
  std::string note;
  double a0 = 0.0;
  double A = 0.0;
  double T_tilde = 0.0;
  double R2 = kInfinity;  ///< R_2(T~)
  bool k1_found = false;
  double k1 = 0.0;
  std::vector<StabilizationEntry> entries;
  bool all_reach = false;      ///< T_k >= T~ for every k >= k1
  bool agreement = false;      ///< pairwise agreement among k >= k1
  double worst_disagreement = 0.0;
  bool certified = false;
  double certification_violation = 0.0;
  std::optional<SymmetricSolution> k1_solution;
  bool pass = false;
};

namespace detail {

// sup |min(u, T) - min(v, T)| over base grid nodes in [r0, r_hi] where
// either value lies below T.
inline double truncated_sup_diff(const WarpedManifold& m, const SymmetricSolution& u,
                                 const SymmetricSolution& v, double T, double r_hi) {
  double worst = 0.0;
  for (double r : m.grid()) {
    if (r < u.r0() || r > r_hi) continue;
    const double a = u.u(r), b = v.u(r);
    if (a < T || b < T) worst = std::max(worst, std::abs(std::min(a, T) - std::min(b, T)));
  }
  return worst;
}

// Certifies min(u, T) (and T beyond the solution's reach) as a weak solution
// on M over a window [r0 + margin, rho_T + 1/2].
inline CertificationReport certify_truncated(const WarpedManifold& m, const SymmetricSolution& u, double T,
                                             double k, const StabilizationOptions& opt) {
  const double r0 = u.r0();
  const double rho = u.sublevel(T).rho;
  const double hi = std::min({rho + 0.5, k, m.r_max()});
  const auto cells = static_cast<std::size_t>(std::ceil(hi / opt.cert_spacing));
  const std::vector<double> extra{r0};
  const auto radii = radial_nodes(0.0, hi, cells, extra);
  std::vector<double> nodes(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) nodes[i] = radii[i] >= r0 ? std::min(u.u(radii[i]), T) : -1.0;
  std::vector<double> cell_u(radii.size() - 1), density(radii.size() - 1, 0.0);
  for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
    cell_u[i] = radii[i + 1] <= r0 ? -1.0 : nodes[i + 1];
    if (radii[i] >= r0) density[i] = std::abs(nodes[i + 1] - nodes[i]) / (radii[i + 1] - radii[i]);
  }
  const auto c = CellComplex::radial(m, radii).with_density(std::move(density));
  const double lo = r0 + 0.1 * std::max(rho - r0, 0.5);
  std::vector<double> times;
  for (std::size_t j = 1; j <= opt.cert_times; ++j) {
    times.push_back(T * static_cast<double>(j) / static_cast<double>(opt.cert_times));
  }
  return certify_weak_solution(c, cell_u, times, c.window(lo, hi), opt.cert_tol);
}

}  // namespace detail

/// Builds u_k for each k, checks T_k >= T~ = log(A / a0) above the
/// surrogate k1 (smallest listed k exceeding R_2(T~)), pairwise agreement
/// on {u_k < T~}, and certifies min(u_{k1}, T~) on a compact window.
inline StabilizationReport stabilization_check(const WarpedManifold& m, double r0, const IsoProfile& p, double A,
                                               std::span<const double> k_list, StabilizationOptions opt = {}) {
  StabilizationReport rep;
  rep.a0 = m.sphere_area(r0);
  rep.A = A;
  rep.T_tilde = std::log(A / rep.a0);
  const auto diag = check_nondegeneracy(p, A);
  if (!diag.passes()) {
    rep.note = diag.exceeds_A ? "head integral of 1/Ip diverges" : "liminf Ip surrogate does not exceed A";
    return rep;
  }
  if (!(rep.T_tilde > 0.0)) {
    rep.note = "A does not exceed |dE_0|";
    return rep;
  }
  try {
    rep.R2 = exhaustion_radius(p, r0, rep.a0, rep.T_tilde, 2);
  } catch (const Error& e) {
    rep.note = e.what();
    return rep;
  }
  rep.hypotheses_ok = true;

  std::vector<double> ks(k_list.begin(), k_list.end());
  std::sort(ks.begin(), ks.end());
  for (double k : ks) {
    if (k > rep.R2) {
      rep.k1_found = true;
      rep.k1 = k;
      break;
    }
  }

  std::vector<SymmetricSolution> sols;
  std::vector<ConicModel> cones;
  for (double k : ks) {
    cones.push_back(build_cone(m, k, opt.cone));
    sols.push_back(solve_on_cone(cones.back(), r0, opt.solve));
    StabilizationEntry e;
    e.k = k;
    e.C = cones.back().C();
    e.T_k = first_escape_time(sols.back(), k);
    e.above_k1 = rep.k1_found && k >= rep.k1;
    e.reaches_T_tilde = e.T_k >= rep.T_tilde;
    e.maximum_principle = sols.back().sublevel(e.T_k).rho_plus <= k + cones.back().delta();
    if (sols.size() > 1) {
      const auto& prev = sols[sols.size() - 2];
      e.sup_diff_prev = detail::truncated_sup_diff(m, prev, sols.back(), rep.T_tilde,
                                                   std::min(ks[sols.size() - 2], m.r_max()));
      e.agrees_with_prev = e.sup_diff_prev <= opt.agreement_tol;
    }
    rep.entries.push_back(e);
  }
  if (!rep.k1_found) {
    rep.note = "no listed k exceeds R_2(T~) = " + std::to_string(rep.R2);
    return rep;
  }

  rep.all_reach = true;
  rep.agreement = true;
  bool max_principle = true;
  std::size_t i1 = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (!rep.entries[i].above_k1) continue;
    if (rep.entries[i].k == rep.k1) i1 = i;
    rep.all_reach = rep.all_reach && rep.entries[i].reaches_T_tilde;
    max_principle = max_principle && rep.entries[i].maximum_principle;
    for (std::size_t j = 0; j < i; ++j) {
      if (!rep.entries[j].above_k1) continue;
      const double d = detail::truncated_sup_diff(m, sols[j], sols[i], rep.T_tilde, std::min(ks[j], m.r_max()));
      rep.worst_disagreement = std::max(rep.worst_disagreement, d);
    }
  }
  rep.agreement = rep.worst_disagreement <= opt.agreement_tol;
  rep.k1_solution = sols[i1];
  if (opt.certify) {
    const auto cert = detail::certify_truncated(m, sols[i1], rep.T_tilde, rep.k1, opt);
    rep.certified = cert.pass;
    rep.certification_violation = cert.worst_violation;
  }
  if (!max_principle) rep.note = "E_t^+ reached past k + delta at T_k";
  rep.pass = rep.all_reach && rep.agreement && max_principle && (rep.certified || !opt.certify);
  return rep;
}

struct LimitResult {
  std::vector<double> radii;   ///< base grid nodes in [r0, rho_{l_max})
  std::vector<double> values;  ///< limit u at those radii
  double max_level = 0.0;      ///< largest l; the tabulation covers {u < l}
  double worst_pair_diff = 0.0;  ///< max over l < l' of |u^l - u^{l'}| on E_l(u^l)
  bool consistent = false;
  double diff_vs_direct = 0.0;  ///< sup against solve(M, r0) on the tabulation
  bool matches_direct = false;
  std::vector<StabilizationReport> reports;
  bool pass = false;
};

/// Exhaustion limit: for each l the truncated solution u^l with A = e^l a0,
/// glued on E_l(u^l), and compared with the direct symmetric solution.
inline LimitResult limit_solution(const WarpedManifold& m, double r0, const IsoProfile& p,
                                  std::span<const double> l_list, std::span<const double> k_list,
                                  StabilizationOptions opt = {}) {
  std::vector<double> ls(l_list.begin(), l_list.end());
  std::sort(ls.begin(), ls.end());
  if (ls.empty() || !(ls.front() > 0.0)) throw DomainError("limit_solution: levels must be positive");
  const double a0 = m.sphere_area(r0);
  LimitResult res;
  std::vector<SymmetricSolution> ul;
  for (double l : ls) {
    auto rep = stabilization_check(m, r0, p, std::exp(l) * a0, k_list, opt);
    if (!rep.hypotheses_ok) throw NonDegeneracyExceeded("limit_solution: l = " + std::to_string(l) + ": " + rep.note);
    if (!rep.k1_found) throw DomainError("limit_solution: l = " + std::to_string(l) + ": " + rep.note);
    ul.push_back(*rep.k1_solution);
    res.reports.push_back(std::move(rep));
  }
  res.max_level = ls.back();
  for (std::size_t i = 0; i < ls.size(); ++i) {
    for (std::size_t j = i + 1; j < ls.size(); ++j) {
      for (double r : m.grid()) {
        if (r < r0 || r > res.reports[i].k1) continue;
        const double a = ul[i].u(r);
        if (a < ls[i]) res.worst_pair_diff = std::max(res.worst_pair_diff, std::abs(a - ul[j].u(r)));
      }
    }
  }
  res.consistent = res.worst_pair_diff <= opt.agreement_tol;

  const SymmetricSolution direct(m, r0, opt.solve);
  for (double r : m.grid()) {
    if (r < r0) continue;
    bool found = false;
    for (std::size_t i = 0; i < ls.size() && !found; ++i) {
      if (r > res.reports[i].k1) continue;
      const double a = ul[i].u(r);
      if (a < ls[i]) {
        res.radii.push_back(r);
        res.values.push_back(a);
        found = true;
      }
    }
    if (!found) break;
  }
  for (std::size_t i = 0; i < res.radii.size(); ++i) {
    res.diff_vs_direct = std::max(res.diff_vs_direct, std::abs(res.values[i] - direct.u(res.radii[i])));
  }
  res.matches_direct = res.diff_vs_direct <= opt.agreement_tol;
  bool all = true;
  for (const auto& rep : res.reports) all = all && rep.pass;
  res.pass = all && res.consistent && res.matches_direct && !res.radii.empty();
  return res;
}

}  // namespace imcf
