#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "imcf/error.hpp"
#include "imcf/warped_geometry.hpp"

namespace imcf::models {

inline Warp euclidean_warp() {
  return Warp("euclidean", {{0.0, [](double r) { return r; }, [](double) { return 1.0; }}});
}

inline Warp cylinder_warp(double radius = 1.0) {
  return Warp("cylinder", {{0.0, [radius](double) { return radius; }, [](double) { return 0.0; }}});
}

/// f(r) = log(2 + r^2).
inline Warp log_cylinder_warp() {
  return Warp("log_cylinder", {{0.0, [](double r) { return std::log(2.0 + r * r); },
                                [](double r) { return 2.0 * r / (2.0 + r * r); }}});
}

namespace detail {

inline WarpSegment linear(double start, double value_at_start, double slope) {
  return {start, [=](double r) { return value_at_start + slope * (r - start); },
          [=](double) { return slope; }};
}

/// value_at_start + height * s (1 - s), s = r - start, on a unit interval.
inline WarpSegment hump(double start, double value_at_start, double height) {
  return {start,
          [=](double r) {
            const double s = r - start;
            return value_at_start + height * s * (1.0 - s);
          },
          [=](double r) { return height * (1.0 - 2.0 * (r - start)); }};
}

}  // namespace detail

/// Jump exemplar: f = r on [0, 1], a bump on [1, 2] with f(1) = f(2) = 1 and
/// f > 1 inside, then f = 1 + 0.8 (r - 2). From r0 = 1 the flow jumps at
/// t = 0 from {r < 1} to {r < 2}.
inline Warp dip_warp() {
  return Warp("dip",
              {detail::linear(0.0, 0.0, 1.0), detail::hump(1.0, 1.0, 0.8),
               detail::linear(2.0, 1.0, 0.8)},
              {1.5});
}

/// Two separated dips after rising stretches; from r0 = 1 the flow jumps at
/// t = 2 log 1.6 (1.75 -> 2.5) and t = 2 log 2.4 (3.75 -> 4.5).
inline Warp two_dips_warp() {
  return Warp("two_dips",
              {detail::linear(0.0, 0.0, 1.0), detail::linear(1.0, 1.0, 0.8),
               detail::hump(2.0, 1.8, -0.8), detail::linear(3.0, 1.8, 0.8),
               detail::hump(4.0, 2.6, -0.8), detail::linear(5.0, 2.6, 0.8)},
              {2.5, 4.5});
}

/// Genuine sag below f(1) = 1: minimum 0.8 at r = 1.5, f(2) = 1, then linear.
/// The hull of {r < 1} is {r < 1.5}.
inline Warp sag_warp() {
  return Warp("sag",
              {detail::linear(0.0, 0.0, 1.0), detail::hump(1.0, 1.0, -0.8),
               detail::linear(2.0, 1.0, 0.8)},
              {1.5});
}

inline const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names{"euclidean", "cylinder", "log_cylinder",
                                              "dip",       "two_dips", "sag"};
  return names;
}

inline Warp named_warp(const std::string& name) {
  if (name == "euclidean") return euclidean_warp();
  if (name == "cylinder") return cylinder_warp();
  if (name == "log_cylinder") return log_cylinder_warp();
  if (name == "dip") return dip_warp();
  if (name == "two_dips") return two_dips_warp();
  if (name == "sag") return sag_warp();
  throw DomainError("unknown model '" + name + "'");
}

inline WarpedManifold make(const std::string& name, int n = 3, double r_max = 20.0,
                           double spacing = 1e-2) {
  return WarpedManifold(n, named_warp(name), r_max, spacing);
}

}  // namespace imcf::models
