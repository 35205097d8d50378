#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "imcf/cell_complex.hpp"
#include "imcf/discrete_variational.hpp"
#include "imcf/error.hpp"
#include "imcf/iso_profile.hpp"
#include "imcf/symmetric_imcf.hpp"
#include "imcf/warped_geometry.hpp"

namespace imcf {

/// Least-perimeter set among omega <= E <= outer; minimal-volume representative.
inline RegionSet least_area_outside(const CellComplex& c, const RegionSet& omega, const RegionSet& outer) {
  return detail::solve_cut(c, c.all(), omega, outer, false, Extremal::minimal);
}

/// The maximal-volume least-perimeter set among omega <= E <= outer. It
/// contains every other minimizer.
inline RegionSet maximal_volume_solution(const CellComplex& c, const RegionSet& omega,
                                         const RegionSet& outer) {
  return detail::solve_cut(c, c.all(), omega, outer, false, Extremal::maximal);
}

/// R = r + 1 + 2 int_0^{Isp^{-1}(a)} dv/Ip.
inline double barrier_radius(const IsoProfile& p, double r, double a) {
  if (a < 0.0) throw DomainError("barrier_radius: negative area");
  if (a == 0.0) return r + 1.0;
  const StrongProfile sp(p);
  return r + 1.0 + 2.0 * reciprocal_integral(p, sp.inverse(a));
}

struct HullResult {
  RegionSet hull;
  double R = 0.0;  ///< barrier radius; the hull lies in B(R)
};

/// Strictly outward minimizing hull of omega, computed as the maximal-volume
/// least-area set inside B(R + 1) and checked to lie in B(R).
inline HullResult minimizing_hull(const CellComplex& c, const RegionSet& omega, const IsoProfile& p,
                                  double A, double r) {
  const double a = perimeter(c, omega);
  if (a > A) throw DomainError("minimizing_hull: perimeter of omega exceeds A");
  if (!omega.subset_of(c.ball(r))) throw DomainError("minimizing_hull: omega not inside B(r)");
  const auto diag = check_nondegeneracy(p, A);
  if (!diag.exceeds_A) {
    throw NonDegeneracyExceeded("minimizing_hull: liminf Ip surrogate " +
                                std::to_string(diag.liminf_surrogate) + " does not exceed A");
  }
  if (!diag.head_integral_finite) throw IntegralDiverges("minimizing_hull: head integral diverges");
  HullResult res;
  res.R = barrier_radius(p, r, a);
  res.hull = maximal_volume_solution(c, omega, c.ball(res.R + 1.0));
  if (!res.hull.subset_of(c.ball(res.R))) {
    throw ContainmentViolated("minimizing_hull: hull escapes B(" + std::to_string(res.R) +
                              "); profile inconsistent with the complex");
  }
  return res;
}

struct EnvelopeVerdict {
  RegionSet maximal_solution;  ///< E1
  RegionSet least_envelope;    ///< E2, empty when no envelope exists
  bool envelope_exists = false;
  bool envelope_is_least = false;  ///< E2 is contained in every other envelope
  bool equal = false;
};

/// Enumerates all subsets (at most 16 cells) to find the strictly outward
/// minimizing supersets of omega and their least-volume member, and compares
/// it with the maximal-volume least-area solution. Perimeters within
/// `rel_tol` times the total interface weight count as equal.
inline EnvelopeVerdict envelope_equivalence_check(const CellComplex& c, const RegionSet& omega,
                                                  double rel_tol = 1e-12) {
  const std::size_t n = c.size();
  if (n > 16) throw DomainError("envelope_equivalence_check: more than 16 cells");
  EnvelopeVerdict v;
  v.maximal_solution = maximal_volume_solution(c, omega, c.all());

  double total = 0.0;
  for (const Interface& f : c.interfaces()) total += f.weight;
  const double tol = rel_tol * total;
  const std::uint64_t count = std::uint64_t{1} << n;
  const std::uint64_t full = count - 1;
  std::vector<double> per(count);
  for (std::uint64_t m = 0; m < count; ++m) per[m] = perimeter(c, RegionSet::from_mask(n, m));

  // F is strictly outward minimizing when every proper superset has strictly
  // larger perimeter.
  auto strictly_minimizing = [&](std::uint64_t f) {
    const std::uint64_t rest = full & ~f;
    for (std::uint64_t s = rest; s != 0; s = (s - 1) & rest) {
      if (per[f | s] <= per[f] + tol) return false;
    }
    return true;
  };

  const std::uint64_t om = omega.mask();
  const std::uint64_t rest = full & ~om;
  std::vector<std::uint64_t> envelopes;
  for (std::uint64_t s = rest;; s = (s - 1) & rest) {
    if (strictly_minimizing(om | s)) envelopes.push_back(om | s);
    if (s == 0) break;
  }
  if (envelopes.empty()) return v;
  v.envelope_exists = true;
  std::uint64_t best = envelopes.front();
  double best_vol = c.volume(RegionSet::from_mask(n, best));
  for (std::uint64_t e : envelopes) {
    const double vol = c.volume(RegionSet::from_mask(n, e));
    if (vol < best_vol || (vol == best_vol && std::popcount(e) < std::popcount(best))) {
      best = e;
      best_vol = vol;
    }
  }
  v.least_envelope = RegionSet::from_mask(n, best);
  v.envelope_is_least = true;
  for (std::uint64_t e : envelopes) v.envelope_is_least = v.envelope_is_least && (best & ~e) == 0;
  v.equal = v.envelope_is_least && v.least_envelope == v.maximal_solution;
  return v;
}

/// Hull radius of {r < r0} on a warped product: the outer radius of {u <= 0}.
inline double symmetric_hull(const WarpedManifold& m, double r0) {
  const SymmetricSolution sol(m, r0);
  if (!(sol.T_max() > 0.0)) {
    throw NoPrecompactHull("symmetric_hull: liminf f surrogate does not exceed inf f beyond r0");
  }
  return sol.sublevel(0.0).rho_plus;
}

}  // namespace imcf
