#ifndef CATPROBE_UNITS_HPP
#define CATPROBE_UNITS_HPP

#include <cmath>
#include <complex>

namespace catprobe {

using cd = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// Angular frequency from a "2*pi x MHz" figure, the unit convention used
// throughout the configuration surface.
inline constexpr double mhz_2pi(double mhz) { return two_pi * 1e6 * mhz; }
inline constexpr double ghz_2pi(double ghz) { return two_pi * 1e9 * ghz; }

}  // namespace catprobe

#endif
