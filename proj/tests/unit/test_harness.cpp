#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <cstdlib>

#include "kapdirac/errors.hpp"
#include "kapdirac/harness.hpp"

using namespace kapdirac;
using namespace kapdirac::harness;

namespace {

constexpr double c0 = kConstants.c;

ScanSpec interference_map(int n1, int n2) {
  ScanSpec s;
  s.axis1 = {Parameter::E0, 0.0, 400e9, n1, Scale::Linear};
  s.axis2 = {Parameter::v_el, 0.005 * c0, 0.1 * c0, n2, Scale::Linear};
  s.fixed.beam.E0 = 1e9;
  s.fixed.beam.lambda_ph = 30e-9;
  s.fixed.beam.phi = Angle::from_degrees(50.0);
  s.fixed.electron.v_el = 0.03 * c0;
  s.fixed.electron.W_x = s.fixed.electron.W_y = 1e-6;
  s.fixed.dt_over_T = 0.3;
  s.observable = {ObservableKind::PCombined, 0, {1, -1}};
  return s;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("axis sampling") {
    Axis lin{Parameter::E0, 1.0, 3.0, 5, Scale::Linear};
    CHECK(lin.value(0) == 1.0);
    CHECK(lin.value(4) == 3.0);
    CHECK(lin.value(2) == doctest::Approx(2.0));
    Axis lg{Parameter::E0, 1.0, 100.0, 3, Scale::Log};
    CHECK(lg.value(1) == doctest::Approx(10.0));
    CHECK(lg.value(2) == 100.0);
  }

  TEST_CASE("spec validation") {
    auto s = interference_map(3, 3);
    CHECK_NOTHROW(s.validate());
    auto bad = s;
    bad.axis1.n_points = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = s;
    bad.axis1.max = bad.axis1.min;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = s;
    bad.axis2.parameter = Parameter::E0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = s;
    bad.axis1.scale = Scale::Log;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = s;
    bad.axis2.max = 1.2 * c0;
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
    CHECK_THROWS_AS(run_scan(bad, 1), PreconditionError);
  }

  TEST_CASE("worker count resolution") {
    unsetenv("KAPDIRAC_THREADS");
    CHECK(resolve_workers(3) == 3);
    CHECK(resolve_workers(0) >= 1);
    setenv("KAPDIRAC_THREADS", "5", 1);
    CHECK(resolve_workers(3) == 5);
    CHECK(resolve_workers(0) == 5);
    unsetenv("KAPDIRAC_THREADS");
  }

  TEST_CASE("results do not depend on the worker count") {
    const auto s = interference_map(21, 17);
    const auto a = run_scan(s, 1), b = run_scan(s, 4);
    CHECK(scan_csv(a) == scan_csv(b));
    CHECK(a.metadata.workers == 1);
    CHECK(b.metadata.workers == 4);
    for (double v : a.values) {
      CHECK(std::isfinite(v));
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }

  TEST_CASE("zero field leaves everything in the zero order") {
    auto s = interference_map(2, 4);
    s.axis1.min = 0.0;
    for (auto obs : {Observable{ObservableKind::PCombined, 0, {0, 0}},
                     Observable{ObservableKind::PAbsorptive, 0, {0, 0}},
                     Observable{ObservableKind::PPonderomotive, 0, {}}}) {
      s.observable = obs;
      const auto r = run_scan(s, 2);
      for (int j = 0; j < 4; ++j) CHECK(r.at(0, j) == doctest::Approx(1.0).epsilon(1e-14));
    }
    for (auto obs : {Observable{ObservableKind::PCombined, 0, {1, -1}},
                     Observable{ObservableKind::PAbsorptive, 0, {2, 0}},
                     Observable{ObservableKind::PPonderomotive, 2, {}}}) {
      s.observable = obs;
      const auto r = run_scan(s, 2);
      for (int j = 0; j < 4; ++j) CHECK(r.at(0, j) == 0.0);
    }
  }

  TEST_CASE("H1-H2 gap zeros") {
    BeamConfig b;
    b.lambda_ph = 30e-9;
    b.phi = Angle::from_degrees(50.0);
    ElectronConfig e;
    e.v_el = 0.03 * c0;
    e.W_x = e.W_y = 1e-6;
    b.E0 = 0.0;
    CHECK(h1_h2_gap(b, e) == 0.0);
    const double A = 2 * kConstants.m0 * e.v_el / kConstants.e;
    b.E0 = A * b.omega();
    const double scale = kConstants.e * kConstants.e * A * A / (2 * kConstants.m0);
    CHECK(h1_h2_gap(b, e) <= 1e-12 * scale);
    b.E0 *= 0.5;
    CHECK(h1_h2_gap(b, e) == doctest::Approx(0.75 * scale).epsilon(1e-12));
  }

  TEST_CASE("CSV layout") {
    const auto r = run_scan(interference_map(2, 3), 1);
    const auto csv = scan_csv(r);
    CHECK(csv.rfind("E0_V_per_m,v_el_m_per_s,P_combined(1;-1),flag\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
    CHECK(std::string(engine_version()).find("kapdirac") == 0);
    CHECK(observable_name({ObservableKind::PPonderomotive, 3, {}}) == "P_ponderomotive(3)");
    CHECK(observable_name({ObservableKind::H1H2Gap, 0, {}}) == "H1_H2_gap_J");
  }

  TEST_CASE("zero order survives strong fields only for slow electrons") {
    ScanSpec s = interference_map(2, 2);
    s.observable = {ObservableKind::PAbsorptive, 0, {0, 0}};
    s.axis1 = {Parameter::E0, 300e9, 400e9, 2, Scale::Linear};
    s.axis2 = {Parameter::v_el, 0.01 * c0, 0.1 * c0, 2, Scale::Linear};
    const auto r = run_scan(s, 1);
    MESSAGE("P_abs(0,0): slow " << r.at(1, 0) << ", fast " << r.at(1, 1));
    CHECK(r.at(1, 0) > 0.1);
    CHECK(r.at(1, 1) < 0.05);
  }

  TEST_CASE("interference oscillates with field strength") {
    ScanSpec s = interference_map(201, 2);
    s.axis2 = {Parameter::v_el, 0.08 * c0, 0.081 * c0, 2, Scale::Linear};
    const auto r = run_scan(s, 1);
    int extrema = 0;
    for (int i = 1; i + 1 < 201; ++i) {
      const double a = r.at(i - 1, 0), b = r.at(i, 0), c = r.at(i + 1, 0);
      if ((b > a && b > c) || (b < a && b < c)) ++extrema;
    }
    MESSAGE("local extrema along E0: " << extrema);
    CHECK(extrema >= 2);
  }

  TEST_CASE("self check passes") {
    for (const auto& c : self_check()) {
      INFO(c.name << ": " << c.detail);
      CHECK(c.passed);
    }
  }
}
