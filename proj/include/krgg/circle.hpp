#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace krgg {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Default tolerance used by is_antipodal when none is given.
inline constexpr double kDefaultAntipodalTol = 1e-12;

/// Raised when an argument lies outside the domain of an operation.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A point of the unit circle, stored as an angle in [0, 2pi).
class Angle {
 public:
  constexpr Angle() = default;

  constexpr double value() const { return value_; }
  constexpr operator double() const { return value_; }

  friend constexpr bool operator==(Angle, Angle) = default;

 private:
  friend Angle normalize(double theta);
  explicit constexpr Angle(double v) : value_(v) {}

  double value_ = 0.0;
};

/// Reduces theta modulo 2pi into [0, 2pi). Throws DomainError on non-finite input.
Angle normalize(double theta);

/// Length of the shorter arc between a and b, in [0, pi].
double geodesic_distance(Angle a, Angle b);

/// The signed geodesic length a (-) b: the unique r in (-pi, pi] with
/// a = b + r (mod 2pi). Antipodal pairs give +pi.
double signed_diff(Angle a, Angle b);

/// True iff |geodesic_distance(a, b) - pi| <= tol.
bool is_antipodal(Angle a, Angle b, double tol = kDefaultAntipodalTol);

}  // namespace krgg
