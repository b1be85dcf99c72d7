#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <random>

#include "kapdirac/diagnostics.hpp"
#include "kapdirac/errors.hpp"
#include "kapdirac/fields.hpp"
#include "kapdirac/tdse.hpp"
#include "tdse_oracle.hpp"

using namespace kapdirac;
using namespace kapdirac::tdse;
using namespace kapdirac::testing;

namespace {

BeamConfig beam(double E0, double lambda, double phi_deg) {
  BeamConfig b;
  b.E0 = E0;
  b.lambda_ph = lambda;
  b.phi = Angle::from_degrees(phi_deg);
  return b;
}

ElectronConfig packet(double v, double wx, double wy) {
  ElectronConfig e;
  e.v_el = v;
  e.W_x = wx;
  e.W_y = wy;
  return e;
}

Grid2D centered(int nx, int ny, double dx, double dy) {
  return {nx, ny, dx, dy, -0.5 * nx * dx, -0.5 * ny * dy};
}

std::vector<cd> random_state(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<cd> v(n);
  for (auto& z : v) z = {d(rng), d(rng)};
  return v;
}

cd inner(const std::vector<cd>& a, const std::vector<cd>& b) {
  cd s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace

TEST_SUITE("tdse") {
  TEST_CASE("grid validation and Nyquist check") {
    CHECK_THROWS_AS(centered(12, 16, 1e-9, 1e-9).validate(), PreconditionError);
    CHECK_THROWS_AS(centered(24, 16, 1e-9, 1e-9).validate(), PreconditionError);
    CHECK_THROWS_AS(centered(16, 16, 0.0, 1e-9).validate(), PreconditionError);
    const auto g = centered(16, 16, 1e-9, 1e-9);
    CHECK_NOTHROW(g.check_nyquist(1e9, 1e9));
    CHECK_THROWS_AS(g.check_nyquist(2e9, 1e9), PreconditionError);
    CHECK_THROWS_AS(g.check_nyquist(1e9, 2e9), PreconditionError);
  }

  TEST_CASE("initial packet: norm, centroid and momentum widths") {
    const auto e = packet(2.3e5, 6e-9, 9e-9);
    const auto g = centered(128, 128, 0.5e-9, 0.5e-9);
    const auto psi = init_gaussian(e, g);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
    const auto mom = to_momentum(psi);
    CHECK(std::abs(mom.total() - 1.0) < 1e-12);
    double w = 0, kx = 0, ky = 0, kxx = 0, kyy = 0;
    for (std::size_t i = 0; i < mom.kx.size(); ++i)
      for (std::size_t j = 0; j < mom.ky.size(); ++j) {
        const double d = mom.density(static_cast<int>(i), static_cast<int>(j));
        w += d, kx += d * mom.kx[i], ky += d * mom.ky[j];
        kxx += d * mom.kx[i] * mom.kx[i], kyy += d * mom.ky[j] * mom.ky[j];
      }
    kx /= w, ky /= w;
    CHECK(kx == doctest::Approx(e.k_el()).epsilon(1e-8));
    CHECK(std::abs(ky) < 1e-6 * e.k_el());
    // Density exp(-k^2 W^2): 1/e half-width 1/W = sqrt(2 variance).
    CHECK(std::sqrt(2 * (kxx / w - kx * kx)) == doctest::Approx(1 / e.W_x).epsilon(0.02));
    CHECK(std::sqrt(2 * (kyy / w - ky * ky)) == doctest::Approx(1 / e.W_y).epsilon(0.02));
  }

  TEST_CASE("unresolvable packets are rejected") {
    const auto g = centered(64, 64, 1e-9, 1e-9);
    CHECK_THROWS_AS(init_gaussian(packet(1e5, 3e-9, 8e-9), g), PreconditionError);
    CHECK_THROWS_AS(init_gaussian(packet(0.1 * kConstants.c, 8e-9, 8e-9), g), PreconditionError);
    CHECK_NOTHROW(init_gaussian(packet(0.1 * kConstants.c, 8e-9, 8e-9), g, 0.1 * kConstants.c * kConstants.m0 / kConstants.hbar));
  }

  TEST_CASE("free plane wave is an eigenstate") {
    const auto g = centered(32, 16, 1e-9, 1e-9);
    Wavefunction2D psi;
    psi.grid = g;
    psi.amplitudes.resize(g.size());
    const double k = g.kx(5);
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) psi.at(i, j) = std::polar(1.0, k * g.x(i));
    const auto h = apply_hamiltonian(psi, beam(0.0, 30e-9, 50.0), 0.0, HamiltonianMode::Full);
    const double E = kConstants.hbar * kConstants.hbar * k * k / (2 * kConstants.m0);
    for (std::size_t q = 0; q < g.size(); ++q) CHECK(std::abs(h[q] - E * psi.amplitudes[q]) < 1e-12 * E);
  }

  TEST_CASE("Hamiltonian is Hermitian") {
    const auto g = centered(32, 32, 1e-9, 1e-9);
    for (auto mode : {HamiltonianMode::Full, HamiltonianMode::PonderomotiveOnly}) {
      Hamiltonian H(g, beam(300e9, 30e-9, 50.0), mode, 4e9);
      H.set_time(1.3e-17);
      const auto a = random_state(g.size(), 1), b = random_state(g.size(), 2);
      std::vector<cd> Ha(g.size()), Hb(g.size());
      H.apply(a, Ha);
      H.apply(b, Hb);
      const cd lhs = inner(a, Hb), rhs = std::conj(inner(b, Ha));
      CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
    }
  }

  TEST_CASE("matrix-free Hamiltonian equals the dense construction") {
    const auto g = centered(16, 16, 2e-9, 2e-9);
    const auto b = beam(300e9, 30e-9, 50.0);
    const double K = 3e9, t = 0.37 * b.period();
    for (auto mode : {HamiltonianMode::Full, HamiltonianMode::PonderomotiveOnly}) {
      const auto ref = dense_reference(g, b, t, K, mode);
      Hamiltonian H(g, b, mode, K);
      H.set_time(t);
      Eigen::MatrixXcd M(g.size(), g.size());
      std::vector<cd> e(g.size()), col(g.size());
      for (std::size_t c = 0; c < g.size(); ++c) {
        std::fill(e.begin(), e.end(), cd{});
        e[c] = 1.0;
        H.apply(e, col);
        for (std::size_t r = 0; r < g.size(); ++r) M(r, c) = col[r];
      }
      CHECK((M - ref).cwiseAbs().maxCoeff() <= 1e-12 * ref.cwiseAbs().maxCoeff());
    }
  }

  TEST_CASE("one Krylov step equals the dense midpoint exponential") {
    const auto g = centered(16, 16, 2e-9, 2e-9);
    const auto b = beam(300e9, 30e-9, 50.0);
    const double K = 3e9;
    PropagatorConfig cfg;
    cfg.dt = b.period() / 40;
    Wavefunction2D psi;
    psi.grid = g;
    psi.carrier_kx = K;
    psi.time = 0.21 * b.period();
    psi.amplitudes = random_state(g.size(), 5);
    // Unit l2 norm of the raw vector, so the tolerance is relative to the amplitudes.
  double nrm = 0;
  for (const auto& z : psi.amplitudes) nrm += std::norm(z);
  nrm = std::sqrt(nrm);
    for (auto& z : psi.amplitudes) z /= nrm;
    const auto out = step(psi, b, cfg, HamiltonianMode::Full);
    const auto H = dense_reference(g, b, psi.time + 0.5 * cfg.dt, K, HamiltonianMode::Full);
    const Eigen::MatrixXcd U = (cd(0, -cfg.dt / kConstants.hbar) * H).exp();
    Eigen::VectorXcd v(g.size());
    for (std::size_t q = 0; q < g.size(); ++q) v(q) = psi.amplitudes[q];
    const Eigen::VectorXcd w = U * v;
    double diff = 0;
    for (std::size_t q = 0; q < g.size(); ++q) diff = std::max(diff, std::abs(w(q) - out.amplitudes[q]));
    CHECK(diff <= 1e-8);
    CHECK(out.time == doctest::Approx(psi.time + cfg.dt));
  }

  TEST_CASE("free packet follows the analytic spreading law") {
    const auto e = packet(2.3e5, 5e-9, 5e-9);
    const auto b = beam(0.0, 1e-6, 50.0);
    const auto g = centered(128, 128, 0.5e-9, 0.5e-9);
    auto psi = init_gaussian(e, g);
    PropagatorConfig cfg;
    cfg.dt = b.period() / 40;
    Propagator prop(g, b, cfg, HamiltonianMode::Full, 0.0);
    const auto m0 = moments(psi);
    for (int s = 0; s < 100; ++s) prop.step(psi);
    const auto m1 = moments(psi);
    const double t = psi.time;
    const double tau = kConstants.hbar * t / (kConstants.m0 * e.W_x * e.W_x);
    const double var = 0.5 * e.W_x * e.W_x * (1 + tau * tau);
    CHECK(std::abs(m1.mx - m0.mx - e.v_el * t) <= 1e-6 * e.W_x);
    CHECK(std::abs(m1.my - m0.my) <= 1e-6 * e.W_y);
    CHECK(m1.vx == doctest::Approx(var).epsilon(1e-6));
    CHECK(m1.vy == doctest::Approx(var).epsilon(1e-6));
    CHECK(std::abs(psi.norm() - 1) < 1e-11);
  }

  TEST_CASE("co-moving frame gives the same physical motion") {
    const auto e = packet(2.3e5, 5e-9, 5e-9);
    const auto b = beam(0.0, 1e-6, 50.0);
    const auto g = centered(128, 128, 0.5e-9, 0.5e-9);
    auto psi = init_gaussian(e, g, e.k_el());
    PropagatorConfig cfg;
    cfg.dt = b.period() / 40;
    Propagator prop(g, b, cfg, HamiltonianMode::Full, e.k_el());
    for (int s = 0; s < 100; ++s) prop.step(psi);
    const auto m = moments(psi);
    CHECK(std::abs(m.mx - e.v_el * psi.time) <= 1e-6 * e.W_x);
  }

  TEST_CASE("norm over 1000 steps in a strong field") {
    const auto g = centered(32, 32, 1e-9, 1e-9);
    const auto b = beam(300e9, 30e-9, 50.0);
    const auto e = packet(0.01 * kConstants.c, 5e-9, 5e-9);
    auto psi = init_gaussian(e, g, e.k_el());
    PropagatorConfig cfg;
    cfg.dt = b.period() / 40;
    Propagator prop(g, b, cfg, HamiltonianMode::Full, e.k_el());
    double worst = 0;
    for (int s = 0; s < 1000; ++s) {
      prop.step(psi);
      worst = std::max(worst, std::abs(psi.norm() - 1));
    }
    CHECK(worst <= 1e-9);
  }

  TEST_CASE("energy is conserved in a frozen field") {
    const auto g = centered(32, 32, 1e-9, 1e-9);
    const auto b = beam(300e9, 30e-9, 50.0);
    const auto e = packet(0.01 * kConstants.c, 5e-9, 5e-9);
    auto psi = init_gaussian(e, g, e.k_el());
    PropagatorConfig cfg;
    cfg.dt = b.period() / 40;
    const double tf = 0.3 * b.period();
    Propagator prop(g, b, cfg, HamiltonianMode::Full, e.k_el());
    prop.freeze_field(tf);
    Hamiltonian H(g, b, HamiltonianMode::Full, e.k_el());
    H.set_time(tf);
    auto energy = [&] {
      std::vector<cd> h(g.size());
      H.apply(psi.amplitudes, h);
      return inner(psi.amplitudes, h).real();
    };
    const double E0 = energy();
    for (int s = 0; s < 100; ++s) prop.step(psi);
    CHECK(std::abs(energy() - E0) <= 1e-8 * std::abs(E0));
  }

  TEST_CASE("Krylov non-convergence is reported") {
    const auto g = centered(32, 32, 0.05e-9, 0.05e-9);
    const auto b = beam(0.0, 30e-9, 50.0);
    PropagatorConfig cfg;
    cfg.dt = b.period() / 40;
    cfg.krylov_dim = 4;
    Wavefunction2D psi;
    psi.grid = g;
    psi.amplitudes = random_state(g.size(), 3);
    CHECK_THROWS_AS(step(psi, b, cfg), ConvergenceError);
  }

  TEST_CASE("propagator configuration limits") {
    const auto b = beam(1e9, 30e-9, 50.0);
    PropagatorConfig cfg;
    cfg.dt = b.period() / 39;
    CHECK_THROWS_AS(cfg.validate(b), PreconditionError);
    cfg.dt = b.period() / 40;
    cfg.krylov_dim = 3;
    CHECK_THROWS_AS(cfg.validate(b), PreconditionError);
    cfg.krylov_dim = 65;
    CHECK_THROWS_AS(cfg.validate(b), PreconditionError);
    cfg.krylov_dim = 16;
    CHECK_NOTHROW(cfg.validate(b));
  }

  TEST_CASE("field-free run leaves the momentum density unchanged") {
    const auto e = packet(0.03 * kConstants.c, 8e-9, 8e-9);
    const auto b = beam(0.0, 30e-9, 50.0);
    const auto g = centered(64, 64, 1e-9, 1e-9);
    PropagatorConfig cfg;
    cfg.dt = b.period() / 40;
    RunOptions opt;
    opt.expected_orders_x = opt.expected_orders_y = 2;
    const auto snaps = run(e, b, g, cfg, {20 * cfg.dt, 5 * cfg.dt, 0.0}, opt);
    REQUIRE(snaps.size() == 5);
    const auto a = to_momentum(snaps.front().psi), z = to_momentum(snaps.back().psi);
    double diff = 0;
    for (std::size_t q = 0; q < a.amplitudes.size(); ++q)
      diff = std::max(diff, std::abs(std::norm(a.amplitudes[q]) - std::norm(z.amplitudes[q])));
    double peak = 0;
    for (auto& v : a.amplitudes) peak = std::max(peak, std::norm(v));
    CHECK(diff <= 1e-8 * peak);
    CHECK(snaps.back().psi.time == doctest::Approx(20 * cfg.dt));
  }

  TEST_CASE("free-flight snapshot and absorbing mask") {
    const auto e = packet(0.03 * kConstants.c, 8e-9, 8e-9);
    const auto b = beam(0.0, 30e-9, 50.0);
    const auto g = centered(64, 64, 1e-9, 1e-9);
    PropagatorConfig cfg;
    cfg.dt = b.period() / 40;
    cfg.mask = CosineRampMask{8e-9};
    RunOptions opt;
    opt.expected_orders_x = opt.expected_orders_y = 2;
    const auto snaps = run(e, b, g, cfg, {4 * cfg.dt, 0.0, 1e-14}, opt);
    REQUIRE(snaps.size() == 3);
    CHECK(snaps.back().after_free_flight);
    const auto& psi = snaps[1].psi;
    CHECK(psi.absorbed >= 0.0);
    CHECK(std::abs(psi.norm() + psi.absorbed - 1) < 1e-9);
  }

  TEST_CASE("normal incidence ponderomotive run: even harmonics only") {
    const auto e = packet(0.03 * kConstants.c, 8e-9, 30e-9);
    const auto b = beam(240e9, 30e-9, 90.0);
    const auto g = centered(64, 256, 2e-9, 1e-9);
    PropagatorConfig cfg;
    cfg.dt = b.period() / 40;
    RunOptions opt;
    opt.mode = HamiltonianMode::PonderomotiveOnly;
    opt.expected_orders_x = 1;
    opt.expected_orders_y = 6;
    const auto snaps = run(e, b, g, cfg, {0.5e-15, 0.0, 0.0}, opt);
    const auto spec = diagnostics::transverse_spectrum(snaps.back().psi);
    const auto peaks = diagnostics::peak_extract(spec, 1e-6);
    REQUIRE(peaks.size() >= 3);
    const double k = b.k_ph();
    for (const auto& p : peaks) {
      const double h = p.k / k;
      CHECK(std::abs(h - 2 * std::round(h / 2)) <= spec.dky / k);
    }
    // Symmetric standing wave: P(k) = P(-k).
    for (std::size_t j = 1; j < spec.p.size(); ++j)
      CHECK(std::abs(spec.p[j] - spec.p[spec.p.size() - j]) <= 1e-6 * spec.p[spec.p.size() / 2]);
  }

  TEST_CASE("grid refinement changes order populations by < 1%") {
    const auto e = packet(0.03 * kConstants.c, 16e-9, 40e-9);
    const auto b = beam(300e9, 30e-9, 50.0);
    RunOptions opt;
    opt.mode = HamiltonianMode::PonderomotiveOnly;
    opt.expected_orders_x = 1;
    opt.expected_orders_y = 4;
    auto orders = [&](int refine) {
      const auto g = centered(32 * refine, 256 * refine, 4e-9 / refine, 1e-9 / refine);
      PropagatorConfig cfg;
      cfg.dt = b.period() / (40 * refine);
      const auto snaps = run(e, b, g, cfg, {1e-15, 0.0, 0.0}, opt);
      return diagnostics::bin_orders(to_momentum(snaps.back().psi), b, e, 1e8).table.entries;
    };
    const auto coarse = orders(1), fine = orders(2);
    for (int n = -2; n <= 2; ++n) {
      const double a = coarse.at({n, -n}), f = fine.at({n, -n});
      if (f < 1e-3) continue;
      CHECK(std::abs(a - f) <= 0.01 * f);
    }
  }
}
