#ifndef SENSORSEL_BESSEL_HPP
#define SENSORSEL_BESSEL_HPP

namespace sensorsel {

/// Bessel function of the first kind J_m(x) for integer order m >= 0.
/// Ascending series for |x| < 8, Miller backward recurrence up to 1000,
/// Hankel asymptotic expansion beyond.
double bessel_j(int m, double x);

/// dJ_m/dx.
double bessel_j_derivative(int m, double x);

/// n-th positive zero of J_m (m >= 0, n >= 1), to about 1e-13 absolute.
double bessel_zero(int m, int n);

}  // namespace sensorsel

#endif  // SENSORSEL_BESSEL_HPP
