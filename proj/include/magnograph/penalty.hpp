#pragma once

#include <cmath>
#include <string>

#include "magnograph/error.hpp"

namespace magnograph {

/// Penalty f_r(s) = s^r / (1 - s) on [0, 1) and its derivatives.
namespace detail {
inline void check_penalty_domain(double s, double r) {
  if (!(s >= 0.0 && s < 1.0)) throw DomainError("penalty argument s = " + std::to_string(s) + " outside [0,1)");
  if (!(r > 1.0)) throw DomainError("penalty exponent r must exceed 1");
}
// s^e with s^0 == 1 for every s, including s = 0.
inline double spow(double s, double e) {
  if (e == 0.0) return 1.0;
  if (s == 0.0) return e > 0.0 ? 0.0 : HUGE_VAL;
  return std::pow(s, e);
}
}  // namespace detail

inline double f_r(double s, double r) {
  detail::check_penalty_domain(s, r);
  return detail::spow(s, r) / (1.0 - s);
}

inline double f_r_prime(double s, double r) {
  detail::check_penalty_domain(s, r);
  const double q = 1.0 - s;
  return r * detail::spow(s, r - 1.0) / q + detail::spow(s, r) / (q * q);
}

inline double f_r_second(double s, double r) {
  detail::check_penalty_domain(s, r);
  const double q = 1.0 - s;
  return r * (r - 1.0) * detail::spow(s, r - 2.0) / q + 2.0 * r * detail::spow(s, r - 1.0) / (q * q) +
         2.0 * detail::spow(s, r) / (q * q * q);
}

/// h_r(s) = f_r'(s) s - f_r(s), written in a cancellation-free form:
/// s^r ((r - 1)(1 - s) + s) / (1 - s)^2.
inline double h_r(double s, double r) {
  detail::check_penalty_domain(s, r);
  const double q = 1.0 - s;
  return detail::spow(s, r) * ((r - 1.0) * q + s) / (q * q);
}

}  // namespace magnograph
