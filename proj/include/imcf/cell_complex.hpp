#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "imcf/error.hpp"
#include "imcf/warped_geometry.hpp"

namespace imcf {

/// Marker for the outside of a complex in an interface.
inline constexpr std::size_t kExterior = std::numeric_limits<std::size_t>::max();

enum class ComplexKind { radial, planar };

inline std::string to_string(ComplexKind k) { return k == ComplexKind::radial ? "radial" : "planar"; }

/// Interface between cells a and b (b may be kExterior) with perimeter weight.
struct Interface {
  std::size_t a = 0;
  std::size_t b = kExterior;
  double weight = 0.0;
};

/// Subset of the cells of one complex.
class RegionSet {
 public:
  RegionSet() = default;
  explicit RegionSet(std::size_t n, bool value = false) : in_(n, value ? 1 : 0) {}

  static RegionSet from_mask(std::size_t n, std::uint64_t mask) {
    RegionSet r(n);
    for (std::size_t i = 0; i < n; ++i) r.in_[i] = (mask >> i) & 1u;
    return r;
  }

  std::size_t size() const { return in_.size(); }
  bool contains(std::size_t i) const { return i != kExterior && in_[i] != 0; }
  bool operator[](std::size_t i) const { return in_[i] != 0; }
  void set(std::size_t i, bool v = true) { in_[i] = v ? 1 : 0; }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto x : in_) c += x;
    return c;
  }

  std::uint64_t mask() const {
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < in_.size(); ++i) m |= static_cast<std::uint64_t>(in_[i] != 0) << i;
    return m;
  }

  bool subset_of(const RegionSet& o) const {
    for (std::size_t i = 0; i < in_.size(); ++i) {
      if (in_[i] && !o.in_[i]) return false;
    }
    return true;
  }

  friend RegionSet operator&(const RegionSet& x, const RegionSet& y) { return combine(x, y, 1); }
  friend RegionSet operator|(const RegionSet& x, const RegionSet& y) { return combine(x, y, 2); }
  /// Set difference x minus y.
  friend RegionSet operator-(const RegionSet& x, const RegionSet& y) { return combine(x, y, 3); }
  friend bool operator==(const RegionSet&, const RegionSet&) = default;

 private:
  static RegionSet combine(const RegionSet& x, const RegionSet& y, int op) {
    if (x.size() != y.size()) throw DomainError("region sets from different complexes");
    RegionSet r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const bool a = x.in_[i], b = y.in_[i];
      r.in_[i] = op == 1 ? (a && b) : op == 2 ? (a || b) : (a && !b);
    }
    return r;
  }

  std::vector<std::uint8_t> in_;
};

/// Cells with volumes, weighted interfaces and a per-cell density |grad u|.
///
/// Radial complexes have cells [r_i, r_{i+1}) with interfaces carrying the
/// sphere areas A(r_i); the innermost interface (weight A(r_0), zero when
/// the warp vanishes there) and the outermost one face the exterior. Each
/// cell records an outer radius so balls B(rho) can be selected.
class CellComplex {
 public:
  CellComplex(ComplexKind kind, std::vector<double> volumes, std::vector<Interface> interfaces,
              std::vector<double> outer_radius = {}, std::vector<double> density = {})
      : kind_(kind),
        volumes_(std::move(volumes)),
        interfaces_(std::move(interfaces)),
        outer_radius_(std::move(outer_radius)),
        density_(std::move(density)) {
    const std::size_t n = volumes_.size();
    if (outer_radius_.empty()) outer_radius_.assign(n, 0.0);
    if (density_.empty()) density_.assign(n, 0.0);
    if (outer_radius_.size() != n || density_.size() != n) {
      throw DomainError("cell complex: per-cell arrays differ in length");
    }
    for (double v : volumes_) {
      if (!(v >= 0.0)) throw DomainError("cell complex: negative volume");
    }
    incident_.resize(n);
    for (std::size_t e = 0; e < interfaces_.size(); ++e) {
      const Interface& f = interfaces_[e];
      if (f.a >= n || (f.b != kExterior && f.b >= n) || f.a == f.b) {
        throw DomainError("cell complex: interface refers to a missing cell");
      }
      if (!(f.weight >= 0.0)) throw DomainError("cell complex: negative interface weight");
      incident_[f.a].push_back(e);
      if (f.b != kExterior) incident_[f.b].push_back(e);
    }
  }

  ComplexKind kind() const { return kind_; }
  std::size_t size() const { return volumes_.size(); }
  std::span<const double> volumes() const { return volumes_; }
  std::span<const Interface> interfaces() const { return interfaces_; }
  std::span<const double> outer_radius() const { return outer_radius_; }
  std::span<const double> density() const { return density_; }
  const std::vector<std::size_t>& incident(std::size_t cell) const { return incident_[cell]; }

  /// Interface radii of a radial complex (r_0 .. r_N); empty for planar grids.
  std::span<const double> radii() const { return radii_; }

  CellComplex with_density(std::vector<double> density) const {
    CellComplex c = *this;
    if (density.size() != size()) throw DomainError("density length differs from cell count");
    c.density_ = std::move(density);
    return c;
  }

  RegionSet empty_set() const { return RegionSet(size()); }
  RegionSet all() const { return RegionSet(size(), true); }

  /// Cells whose outer radius does not exceed rho (1e-12 relative slack).
  RegionSet ball(double rho) const {
    RegionSet r(size());
    for (std::size_t i = 0; i < size(); ++i) {
      if (outer_radius_[i] <= rho * (1.0 + 1e-12) + 1e-15) r.set(i);
    }
    return r;
  }

  /// Radial cells contained in [lo, hi].
  RegionSet window(double lo, double hi) const {
    RegionSet r(size());
    for (std::size_t i = 0; i < size(); ++i) {
      const double inner = radii_.empty() ? 0.0 : radii_[i];
      if (inner >= lo * (1.0 - 1e-12) && outer_radius_[i] <= hi * (1.0 + 1e-12)) r.set(i);
    }
    return r;
  }

  double volume(const RegionSet& e) const {
    double v = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
      if (e[i]) v += volumes_[i];
    }
    return v;
  }

  /// Radial complex on interface radii r_0 < ... < r_N.
  static CellComplex radial(const WarpedManifold& m, std::span<const double> radii) {
    if (radii.size() < 2) throw DomainError("radial complex: need at least one cell");
    for (std::size_t i = 1; i < radii.size(); ++i) {
      if (!(radii[i] > radii[i - 1])) throw DomainError("radial complex: radii not increasing");
    }
    const std::size_t n = radii.size() - 1;
    std::vector<double> vol(n), outer(n);
    std::vector<Interface> faces;
    faces.push_back({0, kExterior, m.sphere_area(radii[0])});
    for (std::size_t i = 0; i < n; ++i) {
      vol[i] = m.shell_volume(radii[i], radii[i + 1]);
      outer[i] = radii[i + 1];
      if (i > 0) faces.push_back({i - 1, i, m.sphere_area(radii[i])});
    }
    faces.push_back({n - 1, kExterior, m.sphere_area(radii[n])});
    CellComplex c(ComplexKind::radial, std::move(vol), std::move(faces), std::move(outer));
    c.radii_.assign(radii.begin(), radii.end());
    return c;
  }

  /// rows x cols grid; cell (i, j) has index i * cols + j. `weight(a, b)`
  /// gives the interface weight, with b = kExterior once per missing side.
  /// Outer radius is the distance from the grid corner to the far cell corner.
  static CellComplex planar(std::size_t rows, std::size_t cols, std::span<const double> volumes,
                            const std::function<double(std::size_t, std::size_t)>& weight) {
    if (rows == 0 || cols == 0 || volumes.size() != rows * cols) {
      throw DomainError("planar complex: volumes do not match the grid");
    }
    std::vector<Interface> faces;
    std::vector<double> outer(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        const std::size_t c = i * cols + j;
        outer[c] = std::hypot(static_cast<double>(i + 1), static_cast<double>(j + 1));
        if (j + 1 < cols) faces.push_back({c, c + 1, weight(c, c + 1)});
        if (i + 1 < rows) faces.push_back({c, c + cols, weight(c, c + cols)});
        const int missing = (i == 0) + (i + 1 == rows) + (j == 0) + (j + 1 == cols);
        for (int k = 0; k < missing; ++k) faces.push_back({c, kExterior, weight(c, kExterior)});
      }
    }
    CellComplex cx(ComplexKind::planar, std::vector<double>(volumes.begin(), volumes.end()),
                   std::move(faces), std::move(outer));
    cx.rows_ = rows;
    cx.cols_ = cols;
    return cx;
  }

  /// Unit weights and unit volumes.
  static CellComplex planar_unit(std::size_t rows, std::size_t cols) {
    std::vector<double> vol(rows * cols, 1.0);
    return planar(rows, cols, vol, [](std::size_t, std::size_t) { return 1.0; });
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

 private:
  ComplexKind kind_;
  std::vector<double> volumes_;
  std::vector<Interface> interfaces_;
  std::vector<double> outer_radius_;
  std::vector<double> density_;
  std::vector<std::vector<std::size_t>> incident_;
  std::vector<double> radii_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
};

/// Evenly spaced radii on [lo, hi] with `cells` cells plus the extra nodes.
inline std::vector<double> radial_nodes(double lo, double hi, std::size_t cells,
                                        std::span<const double> extra = {}) {
  if (!(hi > lo) || cells == 0) throw DomainError("radial_nodes: empty range");
  std::vector<double> r;
  for (std::size_t i = 0; i <= cells; ++i) {
    r.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells));
  }
  r.back() = hi;
  for (double x : extra) {
    if (x > lo && x < hi) r.push_back(x);
  }
  std::sort(r.begin(), r.end());
  const double gap = 1e-9 * (hi - lo) / static_cast<double>(cells);
  std::vector<double> out;
  for (double x : r) {
    if (out.empty() || x - out.back() > gap) {
      out.push_back(x);
    } else if (std::find(extra.begin(), extra.end(), x) != extra.end() && out.size() > 1) {
      out.back() = x;
    }
  }
  out.back() = hi;
  return out;
}

}  // namespace imcf
