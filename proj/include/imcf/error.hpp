#pragma once

#include <stdexcept>
#include <string>

namespace imcf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A radius, volume or time outside the represented range of a model.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The requested area is not below liminf Ip, so Isp^{-1} is not finite.
class NonDegeneracyExceeded : public Error {
 public:
  using Error::Error;
};

/// The head integral of dv/Ip(v) near v = 0 diverges.
class IntegralDiverges : public Error {
 public:
  using Error::Error;
};

/// Sublevel set {u < t} is not precompact (t >= T_max).
class NotPrecompact : public Error {
 public:
  using Error::Error;
};

/// Sublevel set reaches the outer radius of the representation.
class RepresentationExhausted : public Error {
 public:
  using Error::Error;
};

/// |grad u| vanishes at the queried radius; the equation holds only weakly.
class PlateauRegion : public Error {
 public:
  using Error::Error;
};

/// liminf f <= inf_{s>=r0} f, so {r < r0} has no precompact hull.
class NoPrecompactHull : public Error {
 public:
  using Error::Error;
};

/// The computed hull escapes the a-priori barrier ball.
class ContainmentViolated : public Error {
 public:
  using Error::Error;
};

/// Obstacles of a constrained set minimization admit no competitor.
class InfeasibleObstacles : public Error {
 public:
  using Error::Error;
};

/// The conic cutoff could not be built with the required properties.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// A scenario document or data file is malformed or fails validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace imcf
