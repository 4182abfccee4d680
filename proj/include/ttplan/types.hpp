#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>

namespace ttplan {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

using Vec3 = Vector3<double>;
using Vec2 = Vector2<double>;

/// Ball position and velocity at time t, expressed in the table frame
/// (origin at the table center on the playing surface, x along the long
/// side, z up, robot on x < 0).
template <typename Scalar>
struct BasicBallState {
  Scalar t{0};
  Vector3<Scalar> p{Vector3<Scalar>::Zero()};
  Vector3<Scalar> v{Vector3<Scalar>::Zero()};

  bool finite() const { return std::isfinite(t) && p.allFinite() && v.allFinite(); }
};

using BallState = BasicBallState<double>;

/// A single timestamped position measurement.
struct PositionSample {
  double t{0};
  Vec3 p{Vec3::Zero()};
};

// Error hierarchy. Library code throws; the CLI maps these to exit codes.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define TTPLAN_DEFINE_ERROR(Name)          \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  };

TTPLAN_DEFINE_ERROR(InvalidArgument)
TTPLAN_DEFINE_ERROR(NotImpactState)
TTPLAN_DEFINE_ERROR(NonTermination)
TTPLAN_DEFINE_ERROR(NonMonotonicTimestamp)
TTPLAN_DEFINE_ERROR(InsufficientData)
TTPLAN_DEFINE_ERROR(NoBounceFound)
TTPLAN_DEFINE_ERROR(MultipleBounces)
TTPLAN_DEFINE_ERROR(NoPlaneCrossing)
TTPLAN_DEFINE_ERROR(DegenerateImpactDirection)
TTPLAN_DEFINE_ERROR(NoApproach)
TTPLAN_DEFINE_ERROR(InvalidSpec)
TTPLAN_DEFINE_ERROR(ParseError)
TTPLAN_DEFINE_ERROR(InvariantViolation)

#undef TTPLAN_DEFINE_ERROR

}  // namespace ttplan
