#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "imcf/error.hpp"
#include "imcf/quadrature.hpp"
#include "imcf/warped_geometry.hpp"

namespace imcf {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Fraction of the represented range used as the liminf surrogate window.
inline constexpr double kDefaultTailFraction = 0.2;

enum class ProfileForm { power, piecewise_power, tabulated };

/// Power law c v^alpha, used for closed forms and for the head of tables.
struct PowerLaw {
  double c = 1.0;
  double alpha = 0.0;
  double operator()(double v) const { return c * std::pow(v, alpha); }
};

/// Isoperimetric profile v -> Ip(v).
///
/// Closed forms: a power law c v^alpha, or two power laws glued at v_switch
/// (small-volume and large-volume regimes). Tabulated profiles interpolate
/// linearly between samples and extend below the first sample by a power law
/// whose exponent is fitted on the first decade of the table.
class IsoProfile {
 public:
  static IsoProfile power(double c, double alpha) {
    if (!(c > 0.0)) throw DomainError("power profile: c must be positive");
    if (!(alpha >= 0.0)) throw DomainError("power profile: exponent must be >= 0");
    IsoProfile p;
    p.form_ = ProfileForm::power;
    p.small_ = {c, alpha};
    return p;
  }

  static IsoProfile piecewise_power(PowerLaw small, PowerLaw large, double v_switch) {
    if (!(small.c > 0.0 && large.c > 0.0)) throw DomainError("piecewise profile: c must be positive");
    if (!(small.alpha >= 0.0 && large.alpha >= 0.0)) {
      throw DomainError("piecewise profile: exponents must be >= 0");
    }
    if (!(v_switch > 0.0)) throw DomainError("piecewise profile: switch volume must be positive");
    IsoProfile p;
    p.form_ = ProfileForm::piecewise_power;
    p.small_ = small;
    p.large_ = large;
    p.v_switch_ = v_switch;
    return p;
  }

  /// Samples (v_i, Ip(v_i)) on a strictly increasing positive grid.
  /// `upper_bound_only` marks candidate profiles that only bound Ip from above.
  static IsoProfile tabulated(std::vector<double> v, std::vector<double> ip,
                              bool upper_bound_only = false) {
    if (v.empty() || v.size() != ip.size()) throw DomainError("tabulated profile: empty table");
    if (!(v.front() > 0.0)) throw DomainError("tabulated profile: volumes must be positive");
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (!(v[i] > v[i - 1])) throw DomainError("tabulated profile: volumes not strictly increasing");
    }
    for (double a : ip) {
      if (!(a >= 0.0)) throw DomainError("tabulated profile: negative perimeter");
    }
    IsoProfile p;
    p.form_ = ProfileForm::tabulated;
    p.table_v_ = std::move(v);
    p.table_ip_ = std::move(ip);
    p.upper_bound_only_ = upper_bound_only;
    p.fit_head();
    return p;
  }

  ProfileForm form() const { return form_; }
  bool upper_bound_only() const { return upper_bound_only_; }
  std::span<const double> volumes() const { return table_v_; }
  std::span<const double> values() const { return table_ip_; }
  const PowerLaw& head() const { return small_; }
  const PowerLaw& tail_law() const { return large_; }
  double v_switch() const { return v_switch_; }

  /// Largest represented volume (infinite for closed forms).
  double v_max() const { return form_ == ProfileForm::tabulated ? table_v_.back() : kInfinity; }

  double operator()(double v) const {
    if (!(v >= 0.0)) throw DomainError("profile evaluated at negative volume");
    switch (form_) {
      case ProfileForm::power:
        return small_(v);
      case ProfileForm::piecewise_power:
        return v <= v_switch_ ? small_(v) : large_(v);
      case ProfileForm::tabulated:
        break;
    }
    if (v > table_v_.back()) throw DomainError("profile evaluated beyond the table");
    if (v < table_v_.front()) return small_(v);
    const std::size_t i = cell(v);
    if (i + 1 == table_v_.size()) return table_ip_[i];
    const double t = (v - table_v_[i]) / (table_v_[i + 1] - table_v_[i]);
    return table_ip_[i] + t * (table_ip_[i + 1] - table_ip_[i]);
  }

  /// Surrogate for liminf_{v -> inf} Ip(v): exact for closed forms, the
  /// minimum over the last `tail_fraction` of the table otherwise.
  double liminf_surrogate(double tail_fraction = kDefaultTailFraction) const {
    switch (form_) {
      case ProfileForm::power:
        return small_.alpha > 0.0 ? kInfinity : small_.c;
      case ProfileForm::piecewise_power:
        return large_.alpha > 0.0 ? kInfinity : large_.c;
      case ProfileForm::tabulated:
        break;
    }
    const double lo = table_v_.back() - tail_fraction * (table_v_.back() - table_v_.front());
    double m = kInfinity;
    for (std::size_t i = 0; i < table_v_.size(); ++i) {
      if (table_v_[i] >= lo) m = std::min(m, table_ip_[i]);
    }
    return m;
  }

  /// Index of the table node at or below v.
  std::size_t cell(double v) const {
    auto it = std::upper_bound(table_v_.begin(), table_v_.end(), v);
    return static_cast<std::size_t>(std::max<std::ptrdiff_t>((it - table_v_.begin()) - 1, 0));
  }

 private:
  IsoProfile() = default;

  // Least-squares slope of log Ip against log v over the first decade, clamped
  // at 0; the constant is anchored at the first sample so the extension is
  // continuous.
  void fit_head() {
    const double v0 = table_v_.front();
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < table_v_.size(); ++i) {
      if (table_v_[i] <= 10.0 * v0 || pts.size() < 2) {
        if (table_ip_[i] > 0.0) pts.emplace_back(std::log(table_v_[i]), std::log(table_ip_[i]));
      }
    }
    double alpha = 0.0;
    if (pts.size() >= 2) {
      double mx = 0.0, my = 0.0;
      for (auto [x, y] : pts) {
        mx += x;
        my += y;
      }
      mx /= static_cast<double>(pts.size());
      my /= static_cast<double>(pts.size());
      double sxx = 0.0, sxy = 0.0;
      for (auto [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
      }
      if (sxx > 0.0) alpha = std::max(0.0, sxy / sxx);
    }
    small_.alpha = alpha;
    small_.c = table_ip_.front() / std::pow(v0, alpha);
  }

  ProfileForm form_ = ProfileForm::power;
  PowerLaw small_;
  PowerLaw large_;
  double v_switch_ = 0.0;
  std::vector<double> table_v_;
  std::vector<double> table_ip_;
  bool upper_bound_only_ = false;
};

namespace detail {

// Integral of dv / (c v^alpha) over [a, b], 0 <= a <= b.
inline double power_reciprocal_integral(const PowerLaw& law, double a, double b) {
  if (b <= a) return 0.0;
  if (law.alpha == 1.0) {
    if (a == 0.0) throw IntegralDiverges("integral of dv/Ip diverges at v = 0 (exponent 1)");
    return std::log(b / a) / law.c;
  }
  if (law.alpha > 1.0 && a == 0.0) {
    throw IntegralDiverges("integral of dv/Ip diverges at v = 0 (exponent >= 1)");
  }
  const double e = 1.0 - law.alpha;
  return (std::pow(b, e) - std::pow(a, e)) / (law.c * e);
}

// Integral of dv / (linear interpolant) over [v0, v1] with values y0, y1.
inline double linear_reciprocal_integral(double v0, double v1, double y0, double y1) {
  if (v1 <= v0) return 0.0;
  if (!(y0 > 0.0 && y1 > 0.0)) {
    throw IntegralDiverges("integral of dv/Ip diverges: profile vanishes on the table");
  }
  const double dy = y1 - y0;
  if (std::abs(dy) <= 1e-14 * std::max(y0, y1)) return (v1 - v0) * 2.0 / (y0 + y1);
  return (v1 - v0) * std::log(y1 / y0) / dy;
}

}  // namespace detail

/// Integral of dw / Ip(w) over [0, v]. The head below the first sample of a
/// table is integrated analytically from the fitted power law, the remainder
/// exactly on the piecewise-linear table.
inline double reciprocal_integral(const IsoProfile& p, double v) {
  if (!(v >= 0.0)) throw DomainError("reciprocal_integral: negative volume");
  if (v == 0.0) {
    if (p.head().alpha >= 1.0) throw IntegralDiverges("integral of dv/Ip diverges at v = 0");
    return 0.0;
  }
  switch (p.form()) {
    case ProfileForm::power:
      return detail::power_reciprocal_integral(p.head(), 0.0, v);
    case ProfileForm::piecewise_power: {
      const double vs = p.v_switch();
      if (v <= vs) return detail::power_reciprocal_integral(p.head(), 0.0, v);
      return detail::power_reciprocal_integral(p.head(), 0.0, vs) +
             detail::power_reciprocal_integral(p.tail_law(), vs, v);
    }
    case ProfileForm::tabulated:
      break;
  }
  auto vs = p.volumes();
  auto ys = p.values();
  if (v > vs.back()) throw DomainError("reciprocal_integral: volume beyond the table");
  const double v_first = vs.front();
  double total = detail::power_reciprocal_integral(p.head(), 0.0, std::min(v, v_first));
  if (v <= v_first) return total;
  for (std::size_t i = 0; i + 1 < vs.size() && vs[i] < v; ++i) {
    const double hi = std::min(v, vs[i + 1]);
    const double y_hi = hi == vs[i + 1] ? ys[i + 1] : p(hi);
    total += detail::linear_reciprocal_integral(vs[i], hi, ys[i], y_hi);
  }
  return total;
}

/// Strong profile Isp(v) = inf_{v' >= v} Ip(v') with its inverse.
class StrongProfile {
 public:
  explicit StrongProfile(IsoProfile base, double tail_fraction = kDefaultTailFraction)
      : base_(std::move(base)), limit_inf_(base_.liminf_surrogate(tail_fraction)) {
    if (base_.form() != ProfileForm::tabulated) return;
    auto ys = base_.values();
    envelope_.assign(ys.begin(), ys.end());
    if (envelope_.empty()) throw DomainError("strong_profile: empty table");
    for (std::size_t i = envelope_.size() - 1; i-- > 0;) {
      envelope_[i] = std::min(envelope_[i], envelope_[i + 1]);
    }
  }

  const IsoProfile& base() const { return base_; }
  double limit_inf() const { return limit_inf_; }

  /// Envelope values at the table nodes (tabulated profiles only).
  std::span<const double> envelope() const { return envelope_; }

  double operator()(double v) const {
    if (!(v > 0.0)) throw DomainError("Isp evaluated at non-positive volume");
    switch (base_.form()) {
      case ProfileForm::power:
        return base_(v);
      case ProfileForm::piecewise_power: {
        const double vs = base_.v_switch();
        if (v > vs) return base_.tail_law()(v);
        return std::min(base_.head()(v), base_.tail_law()(vs));
      }
      case ProfileForm::tabulated:
        break;
    }
    auto vs = base_.volumes();
    if (v > vs.back()) throw DomainError("Isp evaluated beyond the table");
    if (v < vs.front()) return std::min(base_.head()(v), envelope_.front());
    const std::size_t i = base_.cell(v);
    if (i + 1 == vs.size()) return envelope_[i];
    return std::min(base_(v), envelope_[i + 1]);
  }

  /// sup{v : Isp(v) <= a}; requires 0 < a < liminf Ip.
  double inverse(double a) const {
    if (!(a > 0.0)) throw DomainError("Isp^{-1}: area must be positive");
    if (!(a < limit_inf_)) {
      throw NonDegeneracyExceeded("Isp^{-1}(" + std::to_string(a) +
                                  ") is infinite: liminf Ip surrogate " +
                                  std::to_string(limit_inf_) + " does not exceed it");
    }
    switch (base_.form()) {
      case ProfileForm::power: {
        const PowerLaw& law = base_.head();
        if (law.alpha == 0.0) return 0.0;
        return std::pow(a / law.c, 1.0 / law.alpha);
      }
      case ProfileForm::piecewise_power: {
        const double vs = base_.v_switch();
        const PowerLaw& small = base_.head();
        const PowerLaw& large = base_.tail_law();
        if (a >= large(vs)) return std::pow(a / large.c, 1.0 / large.alpha);
        if (small.alpha == 0.0) return small.c <= a ? vs : 0.0;
        return std::min(vs, std::pow(a / small.c, 1.0 / small.alpha));
      }
      case ProfileForm::tabulated:
        break;
    }
    auto vs = base_.volumes();
    auto ys = base_.values();
    std::ptrdiff_t j = -1;
    for (std::size_t i = envelope_.size(); i-- > 0;) {
      if (envelope_[i] <= a) {
        j = static_cast<std::ptrdiff_t>(i);
        break;
      }
    }
    if (j < 0) {
      const PowerLaw& law = base_.head();
      if (law.alpha == 0.0) return law.c <= a ? vs.front() : 0.0;
      return std::min(vs.front(), std::pow(a / law.c, 1.0 / law.alpha));
    }
    const auto i = static_cast<std::size_t>(j);
    if (i + 1 == vs.size()) return vs.back();
    const double y0 = ys[i];
    const double y1 = ys[i + 1];
    if (y1 <= y0) return vs[i + 1];
    return vs[i] + (a - y0) / (y1 - y0) * (vs[i + 1] - vs[i]);
  }

 private:
  IsoProfile base_;
  double limit_inf_;
  std::vector<double> envelope_;
};

inline StrongProfile strong_profile(const IsoProfile& p,
                                    double tail_fraction = kDefaultTailFraction) {
  return StrongProfile(p, tail_fraction);
}

inline double inverse_strong_profile(const StrongProfile& sp, double a) { return sp.inverse(a); }

struct NondegeneracyDiagnostic {
  double liminf_surrogate = 0.0;
  bool exceeds_A = false;
  bool head_integral_finite = false;
  double head_integral_value = kInfinity;
  bool passes() const { return exceeds_A && head_integral_finite; }
};

/// Evaluates both hypotheses liminf Ip > A and finiteness of the head
/// integral over [0, v0] with v0 = min(1, v_max).
inline NondegeneracyDiagnostic check_nondegeneracy(const IsoProfile& p, double A,
                                                   double tail_fraction = kDefaultTailFraction) {
  NondegeneracyDiagnostic d;
  d.liminf_surrogate = p.liminf_surrogate(tail_fraction);
  d.exceeds_A = d.liminf_surrogate > A;
  try {
    d.head_integral_value = reciprocal_integral(p, std::min(1.0, p.v_max()));
    d.head_integral_finite = std::isfinite(d.head_integral_value);
  } catch (const IntegralDiverges&) {
    d.head_integral_finite = false;
  }
  return d;
}

/// Unique V with int_0^V dv/Ip(v) = 1, the lower bound for |B(x, 1)|.
inline double ball_volume_lower_bound(const IsoProfile& p) {
  auto phi = [&p](double v) { return reciprocal_integral(p, v); };
  double hi = std::min(1.0, p.v_max());
  while (phi(hi) < 1.0) {
    if (hi >= p.v_max()) throw DomainError("ball_volume_lower_bound: table too short");
    hi = std::min(2.0 * hi, p.v_max());
  }
  return quad::bisect([&](double v) { return phi(v) - 1.0; }, 0.0, hi);
}

struct GrowthDiagnostic {
  double r_lo = 0.0;
  double r_hi = 0.0;
  double fitted_exponent = 0.0;  ///< slope of log V against log r on the window
  bool ratio_increasing = false;  ///< V(r)/r strictly increasing on the window
  bool superlinear = false;
  double linear_constant = 0.0;  ///< C = max V(r)/r on the window
  double liminf_ip_bound = 0.0;  ///< 2C, meaningful when growth is linear
};

/// Tail fit of V(r) = |B(r)| on [r_lo, r_hi] (default [r_max/100, r_max]).
inline GrowthDiagnostic superlinear_growth_check(const WarpedManifold& m, double r_lo = -1.0,
                                                 double r_hi = -1.0, int samples = 64,
                                                 double exponent_margin = 0.05) {
  GrowthDiagnostic g;
  g.r_hi = r_hi > 0.0 ? r_hi : m.r_max();
  g.r_lo = r_lo > 0.0 ? r_lo : g.r_hi / 100.0;
  if (!(g.r_lo > 0.0 && g.r_lo < g.r_hi && g.r_hi <= m.r_max())) {
    throw DomainError("superlinear_growth_check: invalid window");
  }
  std::vector<double> xs, ys;
  double prev_ratio = -kInfinity;
  g.ratio_increasing = true;
  for (int i = 0; i < samples; ++i) {
    const double r = g.r_lo * std::pow(g.r_hi / g.r_lo, static_cast<double>(i) / (samples - 1));
    const double v = m.ball_volume(r);
    const double ratio = v / r;
    if (!(ratio > prev_ratio * (1.0 + 1e-12))) g.ratio_increasing = false;
    prev_ratio = ratio;
    g.linear_constant = std::max(g.linear_constant, ratio);
    xs.push_back(std::log(r));
    ys.push_back(std::log(v));
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / samples;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / samples;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < samples; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  g.fitted_exponent = sxy / sxx;
  g.superlinear = g.ratio_increasing && g.fitted_exponent > 1.0 + exponent_margin;
  g.liminf_ip_bound = 2.0 * g.linear_constant;
  return g;
}

/// Upper bound for Ip from unions of at most three annuli with endpoints on
/// `radii`. Volume buckets are the ball volumes V(radii[i]); each bucket
/// stores the least perimeter among unions whose volume falls in
/// [V(radii[i]), V(radii[i+1])). The result is flagged upper-bound-only.
inline IsoProfile symmetric_candidate_profile(const WarpedManifold& m, std::span<const double> radii) {
  if (radii.size() < 9) throw DomainError("symmetric_candidate_profile: grid too coarse (< 8 cells)");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] > radii[i - 1])) throw DomainError("candidate grid not strictly increasing");
  }
  if (radii.front() < 0.0 || radii.back() > m.r_max()) {
    throw DomainError("candidate grid outside [0, r_max]");
  }
  const std::size_t n = radii.size();
  std::vector<double> area(n), vol(n);
  for (std::size_t i = 0; i < n; ++i) {
    area[i] = m.sphere_area(radii[i]);
    vol[i] = m.ball_volume(radii[i]);
  }
  std::vector<double> best(n, kInfinity);
  auto record = [&](double v, double perim) {
    auto it = std::upper_bound(vol.begin(), vol.end(), v * (1.0 + 1e-14));
    if (it == vol.begin()) return;
    const auto b = static_cast<std::size_t>((it - vol.begin()) - 1);
    best[b] = std::min(best[b], perim);
  };
  for (std::size_t a1 = 0; a1 < n; ++a1) {
    for (std::size_t b1 = a1 + 1; b1 < n; ++b1) {
      const double p1 = area[a1] + area[b1];
      const double v1 = vol[b1] - vol[a1];
      record(v1, p1);
      for (std::size_t a2 = b1 + 1; a2 < n; ++a2) {
        for (std::size_t b2 = a2 + 1; b2 < n; ++b2) {
          const double p2 = p1 + area[a2] + area[b2];
          const double v2 = v1 + vol[b2] - vol[a2];
          record(v2, p2);
          for (std::size_t a3 = b2 + 1; a3 < n; ++a3) {
            for (std::size_t b3 = a3 + 1; b3 < n; ++b3) {
              record(v2 + vol[b3] - vol[a3], p2 + area[a3] + area[b3]);
            }
          }
        }
      }
    }
  }
  std::vector<double> tv, tp;
  for (std::size_t i = 0; i < n; ++i) {
    if (vol[i] > 0.0 && std::isfinite(best[i])) {
      tv.push_back(vol[i]);
      tp.push_back(best[i]);
    }
  }
  return IsoProfile::tabulated(std::move(tv), std::move(tp), /*upper_bound_only=*/true);
}

}  // namespace imcf
