#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>

#include "kapdirac/bessel.hpp"

using namespace kapdirac;

TEST_SUITE("bessel") {
  TEST_CASE("matches the reference implementation") {
    double worst = 0.0;
    for (double x : {0.0, 1e-8, 0.3, 1.0, 2.5, 7.0, 19.9, 37.5, 60.0, 99.0, 100.0}) {
      const auto j = bessel::jn_array(250, x);
      for (int n = 0; n <= 250; ++n) {
        const double ref = boost::math::cyl_bessel_j(n, x);
        const double err = std::abs(j[n] - ref) / (std::abs(ref) + 1e-15);
        worst = std::max(worst, err);
      }
    }
    CHECK(worst < 1e-13);
  }

  TEST_CASE("relative accuracy deep in the tail") {
    for (double x : {0.5, 5.0, 40.0}) {
      const auto j = bessel::jn_array(200, x);
      for (int n : {60, 120, 180}) {
        const double ref = boost::math::cyl_bessel_j(n, x);
        if (std::abs(ref) < 1e-290) continue;
        CHECK(std::abs(j[n] - ref) <= 1e-12 * std::abs(ref));
      }
    }
  }

  TEST_CASE("negative orders and arguments") {
    for (int n = -7; n <= 7; ++n) {
      const double a = bessel::jn(n, 3.3);
      const double b = boost::math::cyl_bessel_j(std::abs(n), 3.3) * ((n < 0 && n % 2) ? -1 : 1);
      CHECK(a == doctest::Approx(b).epsilon(1e-13));
      CHECK(bessel::jn(n, -3.3) == doctest::Approx(((n % 2) ? -1 : 1) * a).epsilon(1e-13));
    }
  }

  TEST_CASE("closure sum_n J_n^2 = 1") {
    for (double x = -50.0; x <= 50.0; x += 3.7) {
      const auto j = bessel::jn_array(160, x);
      double s = j[0] * j[0];
      for (int n = 1; n <= 160; ++n) s += 2.0 * j[n] * j[n];
      CHECK(std::abs(s - 1.0) < 1e-12);
    }
  }

  TEST_CASE("tail bound is an upper bound") {
    for (double x : {0.5, 3.0, 12.0}) {
      for (int N : {5, 15, 30}) {
        double tail = 0.0;
        for (int n = N + 1; n <= 300; ++n) tail += 2.0 * std::abs(boost::math::cyl_bessel_j(n, x));
        CHECK(bessel::tail_bound(x, N) >= tail);
      }
    }
    CHECK(bessel::tail_bound(0.0, 3) == 0.0);
  }

  TEST_CASE("table lookup") {
    const bessel::BesselTable t(2.0, 10);
    CHECK(t(0) == doctest::Approx(boost::math::cyl_bessel_j(0, 2.0)).epsilon(1e-14));
    CHECK(t(-3) == doctest::Approx(-boost::math::cyl_bessel_j(3, 2.0)).epsilon(1e-14));
    CHECK_THROWS(t(11));
  }
}
