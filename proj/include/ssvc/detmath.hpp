#pragma once

// Elementary functions built only from IEEE-754 +, -, *, / and exact scaling,
// so table contents are bit-identical on every conforming platform (unlike
// libm, whose last-ulp behaviour varies between implementations).

namespace ssvc::detmath {

double exp(double x);

// cos(pi * num / den) for integer num and positive den.
double cos_pi_ratio(long num, long den);

}  // namespace ssvc::detmath
