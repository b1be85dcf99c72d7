#ifndef KAPDIRAC_NUMERIC_HPP_
#define KAPDIRAC_NUMERIC_HPP_

#include <cmath>
#include <complex>
#include <numbers>

namespace kapdirac {

using cdouble = std::complex<double>;

/// i^k for any integer k, exact.
inline cdouble ipow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

/// sin(pi*h), exact zero at integer h and exact +-1 at half-integers.
inline double sin_pi(double h) {
  double r = h - 2.0 * std::nearbyint(0.5 * h);  // r in [-1, 1]
  if (r == 0.0 || r == 1.0 || r == -1.0) return 0.0;
  if (r == 0.5) return 1.0;
  if (r == -0.5) return -1.0;
  return std::sin(std::numbers::pi * r);
}

/// cos(pi*h), exact zero at half-integers and exact +-1 at integers.
inline double cos_pi(double h) {
  double r = h - 2.0 * std::nearbyint(0.5 * h);
  if (r == 0.5 || r == -0.5) return 0.0;
  if (r == 0.0) return 1.0;
  if (r == 1.0 || r == -1.0) return -1.0;
  return std::cos(std::numbers::pi * r);
}

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Compensated complex accumulator (real and imaginary parts independently).
class CompensatedComplexSum {
 public:
  void add(cdouble v) {
    re_.add(v.real());
    im_.add(v.imag());
  }
  cdouble value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

}  // namespace kapdirac

#endif  // KAPDIRAC_NUMERIC_HPP_
