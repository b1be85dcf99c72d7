#ifndef KAPDIRAC_BESSEL_HPP_
#define KAPDIRAC_BESSEL_HPP_

#include <vector>

namespace kapdirac::bessel {

/// J_0(x) .. J_nmax(x) for real x by Miller's downward recurrence, normalized
/// with J_0 + 2 sum_k J_2k = 1.
std::vector<double> jn_array(int nmax, double x);

/// J_n(x) for any integer n.
double jn(int n, double x);

/// Rigorous upper bound on sum_{|n| > N} |J_n(x)|, from
/// |J_n(x)| <= (|x|/2)^n / n!.
double tail_bound(double x, int N);

/// J_n(x) for a fixed argument and |n| <= max_order.
class BesselTable {
 public:
  BesselTable() = default;
  BesselTable(double x, int max_order);

  double operator()(int n) const;
  int max_order() const { return max_order_; }
  double argument() const { return x_; }

 private:
  double x_ = 0.0;
  int max_order_ = 0;
  std::vector<double> values_;  // J_0 .. J_max_order
};

}  // namespace kapdirac::bessel

#endif  // KAPDIRAC_BESSEL_HPP_
