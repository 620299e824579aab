#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <string>

namespace mqs::detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_factorial(int n) {
  constexpr int kTable = 2048;
  static const auto table = [] {
    std::array<double, kTable> t{};
    for (int i = 1; i < kTable; ++i) t[i] = t[i - 1] + std::log(static_cast<double>(i));
    return t;
  }();
  if (n < 0) return std::numeric_limits<double>::quiet_NaN();
  return n < kTable ? table[n] : std::lgamma(n + 1.0);
}

inline double log_binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return kNegInf;
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

// c * log(x) with the 0^0 = 1 convention
inline double xlogy(double c, double x) {
  if (c == 0.0) return 0.0;
  return c * std::log(x);
}

// <n-k| E_k |n> of the photon-loss channel
inline double loss_amplitude(int n, int k, double T) {
  if (k < 0 || k > n) return 0.0;
  const double R = 1.0 - T;
  const double l = log_binomial(n, k) + xlogy(n - k, T) + xlogy(k, R);
  return std::exp(0.5 * l);
}

inline std::complex<double> ipow(std::complex<double> z, int n) {
  std::complex<double> r{1.0, 0.0};
  while (n > 0) {
    if (n & 1) r *= z;
    z *= z;
    n >>= 1;
  }
  return r;
}

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace mqs::detail
