#include <sensorsel/bessel.hpp>

#include <cmath>
#include <numbers>

#include <sensorsel/errors.hpp>

namespace sensorsel {

namespace {

double series(int m, double x) {
  const double half = 0.5 * x;
  double term = 1.0;
  for (int k = 1; k <= m; ++k) term *= half / k;
  const double q = -half * half;
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k + m));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Backward recurrence from well above max(m, x), normalized with
// J_0 + 2 sum J_2k = 1.
double miller(int m, double x) {
  const int top = static_cast<int>(std::max<double>(m, x)) + 40 +
                  static_cast<int>(std::sqrt(40.0 * std::max<double>(m, x)));
  const int start = top + (top % 2);
  double next = 0.0;
  double cur = 1e-300;
  double norm = 0.0;
  double result = 0.0;
  for (int k = start; k > 0; --k) {
    const double prev = 2.0 * k / x * cur - next;
    next = cur;
    cur = prev;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
      result *= 1e-250;
    }
    // cur now holds J_{k-1}
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * cur;
    if (k - 1 == m) result = cur;
  }
  norm += cur;
  return result / norm;
}

double hankel(int m, double x) {
  const double mu = 4.0 * m * m;
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  const double z8 = 8.0 * x;
  for (int k = 1; k < 30; ++k) {
    const double f = (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * z8);
    term *= f;
    if (k % 2 == 1) {
      q += (((k - 1) / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    } else {
      p += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    }
    if (std::abs(term) < 1e-17) break;
  }
  const double chi = x - (0.5 * m + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j(int m, double x) {
  if (m < 0) throw InvalidArgument("Bessel order must be non-negative");
  if (!std::isfinite(x)) throw InvalidArgument("Bessel argument must be finite");
  if (x < 0.0) return (m % 2 == 0 ? 1.0 : -1.0) * bessel_j(m, -x);
  if (x == 0.0) return m == 0 ? 1.0 : 0.0;
  if (x < 8.0) return series(m, x);
  if (x <= 1000.0 || m * m > 0.01 * x) return miller(m, x);
  return hankel(m, x);
}

double bessel_j_derivative(int m, double x) {
  if (m == 0) return -bessel_j(1, x);
  return 0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x));
}

double bessel_zero(int m, int n) {
  if (m < 0 || n < 1) throw InvalidArgument("Bessel zero needs m >= 0 and n >= 1");
  // J_m has no positive zero at or below m; zeros are more than 2.4 apart, so a
  // 0.25 scan cannot skip one.
  double lo = std::max(0.5, static_cast<double>(m));
  double f_lo = bessel_j(m, lo);
  int found = 0;
  const double step = 0.25;
  for (;;) {
    const double hi = lo + step;
    const double f_hi = bessel_j(m, hi);
    if (f_hi == 0.0 || (f_lo < 0.0) != (f_hi < 0.0)) {
      if (++found == n) {
        double a = lo;
        double b = hi;
        double fa = f_lo;
        for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
          const double mid = 0.5 * (a + b);
          const double fm = bessel_j(m, mid);
          if (fm == 0.0) {
            a = b = mid;
            break;
          }
          if ((fm < 0.0) == (fa < 0.0)) {
            a = mid;
            fa = fm;
          } else {
            b = mid;
          }
        }
        double z = 0.5 * (a + b);
        for (int it = 0; it < 3; ++it) {
          const double d = bessel_j_derivative(m, z);
          if (d == 0.0) break;
          const double dz = bessel_j(m, z) / d;
          if (std::abs(dz) > 1e-10) break;
          z -= dz;
        }
        return z;
      }
    }
    lo = hi;
    f_lo = f_hi;
  }
}

}  // namespace sensorsel
