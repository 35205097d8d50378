#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "imcf/error.hpp"
#include "imcf/iso_profile.hpp"
#include "imcf/min_hull.hpp"
#include "imcf/quadrature.hpp"
#include "imcf/symmetric_imcf.hpp"

namespace imcf {

inline const char* kOutsideDimensionRange = "outside 3 <= n <= 7, where the existence bound is established";

/// Empty inside 3 <= n <= 7, where the existence bound is stated.
inline std::string dimension_note(int n) { return (n >= 3 && n <= 7) ? "" : kOutsideDimensionRange; }

/// R_i(t) = r0 + 2i + (2i + e^t) int_0^{Isp^{-1}(e^t a0)} dv/Ip for i in {1, 2}.
inline double exhaustion_radius(const IsoProfile& p, double r0, double a0, double t, int i) {
  if (i != 1 && i != 2) throw DomainError("exhaustion_radius: i must be 1 or 2");
  if (!(a0 > 0.0)) throw DomainError("exhaustion_radius: a0 must be positive");
  const double et = std::exp(t);
  const double phi = reciprocal_integral(p, StrongProfile(p).inverse(et * a0));
  return r0 + 2.0 * i + (2.0 * i + et) * phi;
}

struct MainBound {
  double R = 0.0;
  double T_tilde = kInfinity;  ///< log(A / a0)
  bool has_asymptotic = false;
  double coefficient = 0.0;  ///< K in R ~ K e^{t / alpha} for Ip = c v^alpha
  double exponent = 0.0;     ///< 1 / alpha
};

/// Diameter bound for E_t valid for 0 <= t <= log(A / a0):
/// R = r0 + 2 + (2 + e^t) int_0^{Isp^{-1}(e^t a0)} dv/Ip.
inline MainBound main_bound(const IsoProfile& p, double r0, double a0, double t, double A = kInfinity) {
  if (!(a0 > 0.0)) throw DomainError("main_bound: a0 must be positive");
  if (t < 0.0) throw DomainError("main_bound: negative time");
  MainBound b;
  b.T_tilde = std::log(A / a0);
  if (t > b.T_tilde * (1.0 + 1e-12) + 1e-15) {
    throw NonDegeneracyExceeded("main_bound: t = " + std::to_string(t) + " beyond log(A/a0) = " +
                                std::to_string(b.T_tilde));
  }
  const StrongProfile sp(p);
  const double et = std::exp(t);
  // At t = log(A / a0) exactly, rounding may land e^t a0 a hair above A.
  const double area = std::isfinite(A) ? std::min(et * a0, A) : et * a0;
  b.R = r0 + 2.0 + (2.0 + et) * reciprocal_integral(p, sp.inverse(area));
  if (p.form() == ProfileForm::power && p.head().alpha > 0.0 && p.head().alpha < 1.0) {
    const double c = p.head().c, alpha = p.head().alpha;
    b.has_asymptotic = true;
    b.exponent = 1.0 / alpha;
    b.coefficient = std::pow(a0 / c, (1.0 - alpha) / alpha) / (c * (1.0 - alpha));
  }
  return b;
}

struct BoundReport {
  double t = 0.0;
  double R_main = kInfinity;
  double R1 = kInfinity;
  double R2 = kInfinity;
  double R_barrier = kInfinity;  ///< jumping-control radius for E_t inside B(rho_t)
  double rho_t = kInfinity;      ///< outer radius of E_t = {u < t}
  double rho_plus = kInfinity;   ///< outer radius of E_t^+ = {u <= t}
  bool hypotheses_ok = false;
  bool contained = false;  ///< rho_t <= R1
  double margin = 0.0;     ///< R1 - rho_t
  std::string note;        ///< dimension tag or failure reason
};

/// Compares the sublevel radii of a solution against R_1(t) at each time.
/// Failures of the bound hypotheses are recorded in the report.
inline std::vector<BoundReport> verify_containment(const SymmetricSolution& sol, const IsoProfile& p,
                                                   double a0, std::span<const double> times,
                                                   double A = kInfinity) {
  std::vector<BoundReport> out;
  const double r0 = sol.r0();
  const std::string dim = dimension_note(sol.manifold().dimension());
  for (double t : times) {
    BoundReport rep;
    rep.t = t;
    rep.note = dim;
    try {
      const auto s = sol.sublevel(t);
      rep.rho_t = s.rho;
      rep.rho_plus = s.rho_plus;
    } catch (const Error& e) {
      rep.note = e.what();
      out.push_back(rep);
      continue;
    }
    try {
      rep.R_main = main_bound(p, r0, a0, t, A).R;
      rep.R1 = exhaustion_radius(p, r0, a0, t, 1);
      rep.R2 = exhaustion_radius(p, r0, a0, t, 2);
      rep.R_barrier = barrier_radius(p, rep.rho_t, std::exp(t) * a0);
      rep.hypotheses_ok = true;
    } catch (const Error& e) {
      rep.note = e.what();
      out.push_back(rep);
      continue;
    }
    rep.contained = rep.rho_t <= rep.R1;
    rep.margin = rep.R1 - rep.rho_t;
    out.push_back(rep);
  }
  return out;
}

/// Exact solution of V' = -Ip(V) / factor with V(0) = V0, through the
/// inverse of Phi(v) = int_0^v dv'/Ip: V(rho) = Phi^{-1}(Phi(V0) - rho / factor).
class OdeComparison {
 public:
  OdeComparison(IsoProfile p, double V0, double factor) : p_(std::move(p)), v0_(V0), factor_(factor) {
    if (!(V0 > 0.0)) throw DomainError("ode_comparison: V0 must be positive");
    if (!(factor >= 1.0)) throw DomainError("ode_comparison: factor must be at least 1");
    phi0_ = reciprocal_integral(p_, V0);
    if (!std::isfinite(phi0_)) throw IntegralDiverges("ode_comparison: head integral diverges");
  }

  /// Radius at which the comparison volume reaches 0.
  double extinction() const { return factor_ * phi0_; }

  double operator()(double rho) const {
    if (rho < 0.0) throw DomainError("ode_comparison: negative radius");
    const double target = phi0_ - rho / factor_;
    if (target <= 0.0) return 0.0;
    if (rho == 0.0) return v0_;
    return quad::bisect([&](double v) { return reciprocal_integral(p_, v) - target; }, 0.0, v0_);
  }

 private:
  IsoProfile p_;
  double v0_;
  double factor_;
  double phi0_ = 0.0;
};

inline OdeComparison ode_comparison(const IsoProfile& p, double V0, double factor) {
  return OdeComparison(p, V0, factor);
}

struct ExcessTerms {
  double A = 0.0;  ///< |dE_t outside B(rho)|
  double S = 0.0;  ///< |E_t on dB(rho)|
  double slack = 0.0;  ///< e^t S - A
};

/// e^t S(t, rho) - A(t, rho) for the symmetric sublevel set E_t.
inline ExcessTerms excess_inequality_check(const SymmetricSolution& sol, double t, double rho) {
  if (!(t > 0.0 && t < sol.T_max())) throw DomainError("excess_inequality_check: need 0 < t < T_max");
  if (rho < sol.r0()) throw DomainError("excess_inequality_check: rho below r0");
  const auto& m = sol.manifold();
  const double rho_t = sol.sublevel(t).rho;
  ExcessTerms e;
  if (rho < rho_t) {
    e.A = m.sphere_area(rho_t);
    e.S = m.sphere_area(rho);
  }
  e.slack = std::exp(t) * e.S - e.A;
  return e;
}

}  // namespace imcf
