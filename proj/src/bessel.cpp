#include "kapdirac/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kapdirac::bessel {

std::vector<double> jn_array(int nmax, double x) {
  if (nmax < 0) throw std::invalid_argument("jn_array: nmax must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(nmax) + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  const double ax = std::abs(x);
  const double reach = std::max(static_cast<double>(nmax), ax);
  int start = static_cast<int>(reach) + 50 + static_cast<int>(std::sqrt(40.0 * reach));
  start += start % 2;

  // Extended precision: in the oscillatory region (n < |x|) the recurrence
  // carries absolute errors of order eps, which matter near zeros of J_n.
  using real = long double;
  constexpr real kBig = 1e250L;
  constexpr real kSmall = 1e-250L;
  const real two_over_x = 2.0L / ax;
  std::vector<real> acc(out.size(), 0.0L);
  real next = 0.0L;     // J_{k+1}
  real cur = 1e-300L;   // J_k, arbitrary scale
  real norm = 0.0L;     // J_0 + 2 sum J_2k, same scale as cur
  for (int k = start; k > 0; --k) {
    const real prev = k * two_over_x * cur - next;  // J_{k-1}
    next = cur;
    cur = prev;
    if (k - 1 <= nmax) acc[static_cast<std::size_t>(k - 1)] = cur;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0L * cur;
    if (std::abs(cur) > kBig) {
      cur *= kSmall;
      next *= kSmall;
      norm *= kSmall;
      for (int m = k - 1; m <= nmax; ++m) acc[static_cast<std::size_t>(m)] *= kSmall;
    }
  }
  norm += cur;  // J_0
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = static_cast<double>(acc[m] / norm);
  if (x < 0.0)
    for (int n = 1; n <= nmax; n += 2) out[static_cast<std::size_t>(n)] = -out[static_cast<std::size_t>(n)];
  return out;
}

double jn(int n, double x) {
  const int an = std::abs(n);
  const double v = jn_array(an, x)[static_cast<std::size_t>(an)];
  return (n < 0 && (an % 2 == 1)) ? -v : v;
}

double tail_bound(double x, int N) {
  const double half = 0.5 * std::abs(x);
  if (half == 0.0) return 0.0;
  if (N < 0) N = 0;
  // log of the first omitted term (|x|/2)^(N+1) / (N+1)!
  int n = N + 1;
  double log_term = n * std::log(half) - std::lgamma(n + 1.0);
  double total = 0.0;
  for (int i = 0; i < 100000; ++i, ++n) {
    const double term = std::exp(log_term);
    total += term;
    if (n > half && term <= 1e-17 * total) break;
    log_term += std::log(half) - std::log(n + 1.0);
  }
  return 2.0 * total;  // both signs of n
}

BesselTable::BesselTable(double x, int max_order)
    : x_(x), max_order_(max_order), values_(jn_array(max_order, x)) {}

double BesselTable::operator()(int n) const {
  const int an = n < 0 ? -n : n;
  if (an > max_order_) throw std::out_of_range("BesselTable: order beyond table");
  const double v = values_[static_cast<std::size_t>(an)];
  return (n < 0 && (an % 2 == 1)) ? -v : v;
}

}  // namespace kapdirac::bessel
