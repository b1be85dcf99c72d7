#include "kapdirac/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "kapdirac/bessel.hpp"
#include "kapdirac/errors.hpp"

namespace kapdirac::analytic {
namespace {

int start_truncation(double arg) {
  return std::max(8, static_cast<int>(std::ceil(std::abs(arg))) + 10);
}

/// Truncated evaluation of the factorized series
///   a_{l,o} = sum_p i^p J_p(beta) c_{l-p} c_{o+p},
///   c_j     = sum_n i^-(j+n) J_{n-j}(alpha_s) J_n(alpha_c),
/// which is the p/n/m triple sum with the n and m sums carried out first.
/// Truncation: |n| <= N, |p| <= P, chosen so the amplitude error bound
///   tail(beta, P) + sqrt(2P+1) (2 e_N + e_N^2),  e_N = tail(alpha_c, N)
/// falls below tol (|c_j| <= 1 because sum |c_j|^2 = 1).
class SeriesEngine {
 public:
  SeriesEngine(const CouplingParams& cp, bool with_ponderomotive, int max_state,
               const SeriesOptions& opt)
      : cp_(cp), with_p_(with_ponderomotive) {
    if (!(opt.tol > 0.0 && opt.tol < 1.0))
      throw PreconditionError("series tolerance must lie in (0, 1)");
    n_trunc_ = std::min(start_truncation(cp.alpha_c), opt.cap);
    p_trunc_ = with_p_ ? std::min(start_truncation(cp.beta), opt.cap) : 0;
    while (true) {
      const double bound = error_bound();
      if (bound < opt.tol) break;
      if (n_trunc_ >= opt.cap && (!with_p_ || p_trunc_ >= opt.cap))
        throw ConvergenceError("Bessel series did not converge within |index| <= " +
                               std::to_string(opt.cap));
      n_trunc_ = std::min(2 * n_trunc_, opt.cap);
      if (with_p_) p_trunc_ = std::min(2 * p_trunc_, opt.cap);
    }
    j_reach_ = max_state + p_trunc_;
    jc_ = bessel::BesselTable(cp.alpha_c, n_trunc_);
    js_ = bessel::BesselTable(cp.alpha_s, n_trunc_ + j_reach_);
    if (with_p_) jp_ = bessel::BesselTable(cp.beta, p_trunc_);
    c_.resize(static_cast<std::size_t>(2 * j_reach_ + 1));
    for (int j = -j_reach_; j <= j_reach_; ++j) c_[idx(j)] = single_beam(j);
  }

  int truncation() const { return std::max(n_trunc_, p_trunc_); }

  /// Coefficient of exp(i j k.r) in the single-beam absorptive factor.
  cdouble c(int j) const {
    if (j < -j_reach_ || j > j_reach_) return {0.0, 0.0};
    return c_[idx(j)];
  }

  cdouble amplitude(int l, int o) const {
    if (!with_p_) return c(l) * c(o);
    CompensatedComplexSum acc;
    for (int p = -p_trunc_; p <= p_trunc_; ++p) {
      const double jp = jp_(p);
      if (jp == 0.0) continue;
      acc.add(ipow(p) * jp * c(l - p) * c(o + p));
    }
    return acc.value();
  }

 private:
  double error_bound() const {
    const double eN = bessel::tail_bound(cp_.alpha_c, n_trunc_);
    if (!with_p_) return 2.0 * eN + eN * eN;
    return bessel::tail_bound(cp_.beta, p_trunc_) +
           std::sqrt(2.0 * p_trunc_ + 1.0) * (2.0 * eN + eN * eN);
  }

  std::size_t idx(int j) const { return static_cast<std::size_t>(j + j_reach_); }

  cdouble single_beam(int j) const {
    CompensatedComplexSum acc;
    for (int n = -n_trunc_; n <= n_trunc_; ++n) {
      const double jn = jc_(n);
      if (jn == 0.0) continue;
      acc.add(ipow(-(j + n)) * (js_(n - j) * jn));
    }
    return acc.value();
  }

  CouplingParams cp_;
  bool with_p_;
  int n_trunc_ = 0;
  int p_trunc_ = 0;
  int j_reach_ = 0;
  bessel::BesselTable jc_, js_, jp_;
  std::vector<cdouble> c_;
};

int state_reach(const OrderState& s) { return std::max(std::abs(s.l), std::abs(s.o)); }

}  // namespace

Vec2 photon_k1(const BeamConfig& beam) {
  const double k = beam.k_ph();
  return {k * beam.phi.cos(), k * beam.phi.sin()};
}

Vec2 photon_k2(const BeamConfig& beam) {
  const double k = beam.k_ph();
  return {k * beam.phi.cos(), -k * beam.phi.sin()};
}

Vec2 final_wavevector(const OrderState& state, const BeamConfig& beam,
                      const ElectronConfig& electron) {
  const Vec2 k1 = photon_k1(beam), k2 = photon_k2(beam);
  return {electron.k_el() + state.l * k1.x + state.o * k2.x, state.l * k1.y + state.o * k2.y};
}

double ponderomotive_rate(const BeamConfig& beam, const ElectronConfig& electron) {
  const auto& K = kConstants;
  const double omega = beam.omega();
  const double k_el = electron.k_el();
  if (!(k_el > 0.0)) throw PreconditionError("ponderomotive rate requires k_el > 0");
  return (K.e * beam.E0) * (K.e * beam.E0) /
         (2.0 * K.hbar * K.hbar * omega * omega * k_el);
}

CouplingParams coupling_params(const BeamConfig& beam, const ElectronConfig& electron,
                               const InteractionWindow& window, double x) {
  const auto dq = derive_kinematics(beam, electron);
  if (!(dq.k_el > 0.0)) throw PreconditionError("coupling parameters require k_el > 0");
  window.check_consistent(beam);
  const auto& K = kConstants;
  const double strength =
      K.e * dq.k_el * beam.E0 / (dq.omega * dq.omega * K.m0) * beam.phi.sin();
  const double f = window.periods();
  CouplingParams cp;
  const double half = sin_pi(f);             // sin(omega dt / 2)
  cp.alpha_c = strength * 2.0 * half * half;  // 1 - cos(omega dt)
  cp.alpha_s = strength * sin_pi(2.0 * f);
  const double rate = ponderomotive_rate(beam, electron);
  cp.beta = beam.phi.cos2() * rate * x;
  const double c = beam.phi.cos();
  cp.global_phase_rate = rate * (1.0 + 2.0 * c * c);
  return cp;
}

CouplingParams coupling_params_at_exit(const BeamConfig& beam,
                                       const ElectronConfig& electron,
                                       const InteractionWindow& window) {
  return coupling_params(beam, electron, window, electron.v_el * window.delta_t());
}

double p_ponderomotive(int n, const BeamConfig& beam, const ElectronConfig& electron,
                       double x) {
  beam.validate();
  electron.validate();
  const double beta = beam.phi.cos2() * ponderomotive_rate(beam, electron) * x;
  const double j = bessel::jn(n, beta);
  return j * j;
}

SeriesValue p_absorptive(const OrderState& state, const CouplingParams& cp,
                         const SeriesOptions& options) {
  SeriesEngine engine(cp, false, state_reach(state), options);
  return {std::norm(engine.amplitude(state.l, state.o)), engine.truncation()};
}

SeriesValue p_combined(const OrderState& state, const CouplingParams& cp,
                       const SeriesOptions& options) {
  SeriesEngine engine(cp, true, state_reach(state), options);
  return {std::norm(engine.amplitude(state.l, state.o)), engine.truncation()};
}

cdouble combined_amplitude(const OrderState& state, const CouplingParams& cp,
                           const SeriesOptions& options) {
  SeriesEngine engine(cp, true, state_reach(state), options);
  return engine.amplitude(state.l, state.o);
}

PopulationTable population_table(Channel channel, const CouplingParams& cp, int max_order,
                                 const SeriesOptions& options) {
  if (max_order < 0) throw PreconditionError("population table: max_order must be >= 0");
  PopulationTable table;
  CompensatedSum total;
  if (channel == Channel::Ponderomotive) {
    const bessel::BesselTable jb(cp.beta, max_order);
    for (int l = -max_order; l <= max_order; ++l)
      for (int o = -max_order; o <= max_order; ++o) {
        const double p = (o == -l) ? jb(l) * jb(l) : 0.0;
        table.entries[{l, o}] = p;
        total.add(p);
      }
    table.truncation = max_order;
  } else {
    SeriesEngine engine(cp, channel == Channel::Combined, max_order, options);
    for (int l = -max_order; l <= max_order; ++l)
      for (int o = -max_order; o <= max_order; ++o) {
        const double p = std::norm(engine.amplitude(l, o));
        table.entries[{l, o}] = p;
        total.add(p);
      }
    table.truncation = engine.truncation();
  }
  table.residual = 1.0 - total.value();
  return table;
}

cdouble wavefunction_analytic(Vec2 r, double t, const CouplingParams& cp,
                              const BeamConfig& beam, const ElectronConfig& electron,
                              const SeriesOptions& options) {
  if (!electron.plane_wave)
    throw PreconditionError("analytic wavefunction requires a plane-wave electron");
  derive_kinematics(beam, electron);
  // |c_j| is bounded by the Bessel tails of alpha_c and alpha_s beyond
  // |j| > N_c + N_s; the p sum shifts states by at most P.
  const int reach = 2 * (start_truncation(cp.alpha_c) + start_truncation(cp.alpha_s)) +
                    start_truncation(cp.beta);
  SeriesEngine engine(cp, true, reach, options);

  const Vec2 k1 = photon_k1(beam), k2 = photon_k2(beam);
  CompensatedComplexSum acc;
  for (int l = -reach; l <= reach; ++l)
    for (int o = -reach; o <= reach; ++o) {
      const cdouble a = engine.amplitude(l, o);
      if (a == cdouble{}) continue;
      const double phase = (l * k1.x + o * k2.x) * r.x + (l * k1.y + o * k2.y) * r.y;
      acc.add(a * std::polar(1.0, phase));
    }
  const double c = beam.phi.cos();
  const double rate = ponderomotive_rate(beam, electron);
  const double prefactor_phase = (electron.k_el() - rate * c * c) * r.x - electron.Omega() * t;
  const double norm = std::pow(2.0 * std::numbers::pi, -1.5);
  return norm * std::polar(1.0, prefactor_phase) * acc.value();
}

double interference_criterion(const ElectronConfig& electron) {
  return 2.0 * kConstants.m0 * electron.v_el / kConstants.e;
}

}  // namespace kapdirac::analytic
