#include "ssvc/detmath.hpp"

#include <cmath>

namespace ssvc::detmath {

namespace {

constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kInvLn2 = 1.44269504088896338700e+00;
constexpr double kPi = 3.14159265358979323846;

double sin_taylor(double x) {
  // |x| <= pi/4; 11 odd terms leave the truncation error below 1e-20.
  const double x2 = x * x;
  double term = x;
  double sum = x;
  for (int n = 1; n <= 11; ++n) {
    term = -term * x2 / static_cast<double>((2 * n) * (2 * n + 1));
    sum += term;
  }
  return sum;
}

double cos_taylor(double x) {
  const double x2 = x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n <= 11; ++n) {
    term = -term * x2 / static_cast<double>((2 * n - 1) * (2 * n));
    sum += term;
  }
  return sum;
}

}  // namespace

double exp(double x) {
  if (x < -745.0) return 0.0;
  if (x > 709.0) return HUGE_VAL;
  const double k = std::floor(x * kInvLn2 + 0.5);
  const double r = (x - k * kLn2Hi) - k * kLn2Lo;
  double p = 1.0;
  for (int n = 16; n >= 1; --n) {
    p = 1.0 + p * r / static_cast<double>(n);
  }
  return std::ldexp(p, static_cast<int>(k));
}

double cos_pi_ratio(long num, long den) {
  // Reduce the angle exactly in integers: work in units of pi / (4 den), so
  // one octant spans `den` units and a full turn spans 8 den.
  const long turn = 8 * den;
  long m = (4 * num) % turn;
  if (m < 0) m += turn;
  // cos is even and 2pi periodic: fold [pi, 2pi) onto (0, pi].
  if (m > turn / 2) m = turn - m;
  // Now angle = pi * m / (4 den) in [0, pi].
  double sign = 1.0;
  if (m > turn / 4) {  // (pi/2, pi]: cos(t) = -cos(pi - t)
    m = turn / 2 - m;
    sign = -1.0;
  }
  // angle in [0, pi/2]
  if (m <= den) {
    return sign * cos_taylor(kPi * static_cast<double>(m) / (4.0 * den));
  }
  // (pi/4, pi/2]: cos(t) = sin(pi/2 - t)
  return sign * sin_taylor(kPi * static_cast<double>(2 * den - m) / (4.0 * den));
}

}  // namespace ssvc::detmath
