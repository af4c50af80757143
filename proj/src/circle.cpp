#include "krgg/circle.hpp"

#include <cmath>

namespace krgg {

Angle normalize(double theta) {
  if (!std::isfinite(theta)) {
    throw DomainError("normalize: non-finite angle");
  }
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) {
    r += kTwoPi;
  }
  // r + 2pi can round up to exactly 2pi for tiny negative inputs.
  if (r >= kTwoPi) {
    r = 0.0;
  }
  return Angle(r);
}

double signed_diff(Angle a, Angle b) {
  double d = a.value() - b.value();
  if (d > kPi) {
    d -= kTwoPi;
  } else if (d <= -kPi) {
    d += kTwoPi;
  }
  return d;
}

double geodesic_distance(Angle a, Angle b) { return std::abs(signed_diff(a, b)); }

bool is_antipodal(Angle a, Angle b, double tol) {
  if (!(tol >= 0.0)) {
    throw DomainError("is_antipodal: tolerance must be non-negative");
  }
  return std::abs(geodesic_distance(a, b) - kPi) <= tol;
}

}  // namespace krgg
