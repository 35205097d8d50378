#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "imcf/cell_complex.hpp"
#include "imcf/error.hpp"
#include "imcf/max_flow.hpp"
#include "imcf/symmetric_imcf.hpp"

namespace imcf {

/// Total weight of interfaces with exactly one side in E (exterior is outside).
inline double perimeter(const CellComplex& c, const RegionSet& e) {
  double p = 0.0;
  for (const Interface& f : c.interfaces()) {
    if (e.contains(f.a) != e.contains(f.b)) p += f.weight;
  }
  return p;
}

/// Weight of the cut interfaces of E whose adjacent cells both lie in F.
inline double cut_inside(const CellComplex& c, const RegionSet& e, const RegionSet& f) {
  double p = 0.0;
  for (const Interface& x : c.interfaces()) {
    if (e.contains(x.a) != e.contains(x.b) && f.contains(x.a) && f.contains(x.b)) p += x.weight;
  }
  return p;
}

/// J(E) = cut weight over interfaces touching K minus the density mass of E in K.
inline double J_functional(const CellComplex& c, const RegionSet& e, const RegionSet& k) {
  double j = 0.0;
  for (const Interface& f : c.interfaces()) {
    if ((k.contains(f.a) || k.contains(f.b)) && e.contains(f.a) != e.contains(f.b)) j += f.weight;
  }
  auto vol = c.volumes();
  auto dens = c.density();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (e[i] && k[i]) j -= vol[i] * dens[i];
  }
  return j;
}

/// Which minimizer to return when several attain the minimum.
enum class Extremal { minimal, maximal };

namespace detail {

inline RegionSet solve_cut(const CellComplex& c, const RegionSet& k, const RegionSet& inner,
                           const RegionSet& outer, bool use_density, Extremal which) {
  const std::size_t n = c.size();
  if (k.size() != n || inner.size() != n || outer.size() != n) {
    throw DomainError("minimize_J: region sets do not match the complex");
  }
  if (!inner.subset_of(outer)) throw InfeasibleObstacles("minimize_J: inner obstacle not inside outer");

  constexpr std::size_t none = kExterior;
  std::vector<std::size_t> node(n, none);
  std::vector<std::size_t> cells;
  for (std::size_t i = 0; i < n; ++i) {
    if (k[i] && outer[i] && !inner[i]) {
      node[i] = cells.size();
      cells.push_back(i);
    }
  }
  if (cells.empty()) return inner;

  const std::size_t s = cells.size();
  const std::size_t t = s + 1;
  MaxFlow g(cells.size() + 2);
  std::vector<double> cost_in(cells.size(), 0.0), cost_out(cells.size(), 0.0);
  for (const Interface& f : c.interfaces()) {
    if (!(k.contains(f.a) || k.contains(f.b))) continue;
    const std::size_t va = node[f.a];
    const std::size_t vb = f.b == kExterior ? none : node[f.b];
    if (va != none && vb != none) {
      g.add_edge(va, vb, f.weight, f.weight);
    } else if (va != none || vb != none) {
      const std::size_t v = va != none ? va : vb;
      const std::size_t other = va != none ? f.b : f.a;
      // The fixed neighbour is in E exactly when it belongs to the inner obstacle.
      if (inner.contains(other)) {
        cost_out[v] += f.weight;
      } else {
        cost_in[v] += f.weight;
      }
    }
  }
  if (use_density) {
    for (std::size_t v = 0; v < cells.size(); ++v) {
      cost_in[v] -= c.volumes()[cells[v]] * c.density()[cells[v]];
    }
  }
  for (std::size_t v = 0; v < cells.size(); ++v) {
    const double d = cost_in[v] - cost_out[v];
    if (d > 0.0) {
      g.add_edge(v, t, d);
    } else if (d < 0.0) {
      g.add_edge(s, v, -d);
    }
  }
  g.solve(s, t);
  const std::vector<bool> side = which == Extremal::minimal ? g.source_side(s) : g.not_reaching_sink(t);
  RegionSet e = inner;
  for (std::size_t v = 0; v < cells.size(); ++v) {
    if (side[v]) e.set(cells[v]);
  }
  return e;
}

}  // namespace detail

/// Minimizer of J over inner <= E <= outer with E and inner differing only
/// inside K, by minimum cut. Returns the minimal-volume minimizer unless the
/// maximal one is requested.
inline RegionSet minimize_J(const CellComplex& c, const RegionSet& k, const RegionSet& inner,
                            const RegionSet& outer, Extremal which = Extremal::minimal) {
  return detail::solve_cut(c, k, inner, outer, true, which);
}

struct CertificationEntry {
  double t = 0.0;
  double J_sublevel = 0.0;
  double J_minimum = 0.0;
  double violation = 0.0;  ///< J(E_t) - min J, nonnegative up to rounding
  bool pass = false;
};

struct CertificationReport {
  std::vector<CertificationEntry> entries;
  double worst_violation = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

/// Checks J(E_t) <= J(E) for every competitor E with E_t minus K <= E <= E_t
/// union K, where E_t = {cells with u < t}. Cell densities must already
/// hold |grad u|.
inline CertificationReport certify_weak_solution(const CellComplex& c, std::span<const double> u,
                                                 std::span<const double> times, const RegionSet& k,
                                                 double tolerance = 1e-6) {
  if (u.size() != c.size()) throw DomainError("certify_weak_solution: u length differs from cells");
  CertificationReport report;
  report.tolerance = tolerance;
  for (double t : times) {
    RegionSet et(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) et.set(i, u[i] < t);
    const RegionSet best = minimize_J(c, k, et - k, et | k);
    CertificationEntry e;
    e.t = t;
    e.J_sublevel = J_functional(c, et, k);
    e.J_minimum = J_functional(c, best, k);
    e.violation = e.J_sublevel - e.J_minimum;
    e.pass = e.violation <= tolerance;
    report.worst_violation = std::max(report.worst_violation, e.violation);
    report.pass = report.pass && e.pass;
    report.entries.push_back(e);
  }
  return report;
}

/// |d(E u F)| + |d(E n F)| <= |dE| + |dF|; returns RHS - LHS.
inline double submodularity_check(const CellComplex& c, const RegionSet& e, const RegionSet& f) {
  return perimeter(c, e) + perimeter(c, f) - perimeter(c, e & f) - perimeter(c, e | f);
}

struct OutwardVerdict {
  bool minimizing = false;
  bool strictly = false;
  double perimeter = 0.0;
  double best_superset_perimeter = 0.0;
};

/// Compares |dE| against every superset of E by a density-free cut. Strict
/// minimality holds when the maximal-volume minimizer is E itself.
inline OutwardVerdict outward_minimizing_check(const CellComplex& c, const RegionSet& e,
                                               double tolerance = 1e-9) {
  OutwardVerdict v;
  v.perimeter = perimeter(c, e);
  const RegionSet lo = detail::solve_cut(c, c.all(), e, c.all(), false, Extremal::minimal);
  v.best_superset_perimeter = perimeter(c, lo);
  const double scale = std::max(1.0, v.perimeter);
  v.minimizing = v.perimeter <= v.best_superset_perimeter + tolerance * scale;
  if (v.minimizing) {
    const RegionSet hi = detail::solve_cut(c, c.all(), e, c.all(), false, Extremal::maximal);
    v.strictly = hi == e;
  }
  return v;
}

/// |grad u| per radial cell from values at the interface radii.
inline std::vector<double> radial_density(std::span<const double> radii, std::span<const double> u_nodes) {
  if (radii.size() != u_nodes.size() || radii.size() < 2) {
    throw DomainError("radial_density: node arrays differ in length");
  }
  std::vector<double> d(radii.size() - 1);
  for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
    d[i] = std::abs(u_nodes[i + 1] - u_nodes[i]) / (radii[i + 1] - radii[i]);
  }
  return d;
}

/// |grad u| on a planar grid with unit spacing: forward differences, falling
/// back to backward differences on the last row and column.
inline std::vector<double> planar_density(const CellComplex& c, std::span<const double> u) {
  const std::size_t rows = c.rows(), cols = c.cols();
  if (c.kind() != ComplexKind::planar || u.size() != rows * cols) {
    throw DomainError("planar_density: needs a planar complex and one value per cell");
  }
  std::vector<double> d(u.size());
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const std::size_t k = i * cols + j;
      double dx = 0.0, dy = 0.0;
      if (cols > 1) dx = j + 1 < cols ? u[k + 1] - u[k] : u[k] - u[k - 1];
      if (rows > 1) dy = i + 1 < rows ? u[k + cols] - u[k] : u[k] - u[k - cols];
      d[k] = std::hypot(dx, dy);
    }
  }
  return d;
}

/// A symmetric solution carried onto a radial complex.
struct DiscreteSolution {
  CellComplex complex;
  std::vector<double> u;  ///< per cell: u at the outer radius, -1 inside {r < r0}
};

/// Radial complex on `radii` (r0 is inserted as a node) with densities from
/// the exact u; cells inside {r < r0} get u = -1 and density 0.
inline DiscreteSolution discretize_solution(const SymmetricSolution& sol, std::vector<double> radii) {
  const double r0 = sol.r0();
  if (std::find(radii.begin(), radii.end(), r0) == radii.end() && r0 > radii.front() &&
      r0 < radii.back()) {
    radii.insert(std::upper_bound(radii.begin(), radii.end(), r0), r0);
  }
  std::vector<double> nodes(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) nodes[i] = radii[i] >= r0 ? sol.u(radii[i]) : -1.0;
  std::vector<double> density(radii.size() - 1, 0.0), u(radii.size() - 1);
  for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
    u[i] = radii[i + 1] <= r0 ? -1.0 : nodes[i + 1];
    if (radii[i] >= r0) density[i] = (nodes[i + 1] - nodes[i]) / (radii[i + 1] - radii[i]);
  }
  return {CellComplex::radial(sol.manifold(), radii).with_density(std::move(density)), std::move(u)};
}

}  // namespace imcf
