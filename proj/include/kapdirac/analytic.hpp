#ifndef KAPDIRAC_ANALYTIC_HPP_
#define KAPDIRAC_ANALYTIC_HPP_

#include <compare>
#include <map>

#include "kapdirac/model.hpp"
#include "kapdirac/numeric.hpp"

namespace kapdirac::analytic {

/// Dimensionless couplings of the Volkov/Bessel series.
struct CouplingParams {
  double alpha_c = 0.0;  // absorptive, cosine quadrature
  double alpha_s = 0.0;  // absorptive, sine quadrature
  double beta = 0.0;     // ponderomotive Bessel argument
  double global_phase_rate = 0.0;  // rad/m, non-diffracting phase along x
};

/// Photon-exchange state: l quanta with beam k1, o quanta with beam k2.
struct OrderState {
  int l = 0;
  int o = 0;
  friend constexpr auto operator<=>(const OrderState&, const OrderState&) = default;
};

/// Photon wave vectors k1 = k(cos phi, sin phi), k2 = k(cos phi, -sin phi).
Vec2 photon_k1(const BeamConfig& beam);
Vec2 photon_k2(const BeamConfig& beam);

/// k_el x + l k1 + o k2, 1/m.
Vec2 final_wavevector(const OrderState& state, const BeamConfig& beam,
                      const ElectronConfig& electron);

/// e^2 E0^2 / (2 hbar^2 omega^2 k_el), rad/m. Multiplied by x and cos(2 phi)
/// it is the ponderomotive Bessel argument.
double ponderomotive_rate(const BeamConfig& beam, const ElectronConfig& electron);

/// Couplings after interaction time window.delta_t() and propagation length x.
CouplingParams coupling_params(const BeamConfig& beam, const ElectronConfig& electron,
                               const InteractionWindow& window, double x);

/// Same, with x = v_el * delta_t (the fixed delta_t/T convention of the scans).
CouplingParams coupling_params_at_exit(const BeamConfig& beam,
                                       const ElectronConfig& electron,
                                       const InteractionWindow& window);

/// J_n(beta)^2; order n carries transverse momentum 2 n k_ph sin(phi).
double p_ponderomotive(int n, const BeamConfig& beam, const ElectronConfig& electron,
                       double x);

struct SeriesValue {
  double probability = 0.0;
  int truncation = 0;  // largest |index| used in the inner sums
};

struct SeriesOptions {
  double tol = 1e-10;  // bound on the amplitude error
  int cap = 200;       // maximum |index|
};

/// |sum_m sum_n i^-(m+n) J_{n-l}(a_s) J_{m-o}(a_s) J_n(a_c) J_m(a_c)|^2
SeriesValue p_absorptive(const OrderState& state, const CouplingParams& cp,
                         const SeriesOptions& options = {});

/// Ponderomotive and absorptive paths together (triple sum over p, n, m).
SeriesValue p_combined(const OrderState& state, const CouplingParams& cp,
                       const SeriesOptions& options = {});

enum class Channel { Ponderomotive, Absorptive, Combined };

struct PopulationTable {
  std::map<OrderState, double> entries;
  int truncation = 0;
  double residual = 0.0;  // 1 - sum of entries
};

/// Populations for all |l|, |o| <= max_order.
PopulationTable population_table(Channel channel, const CouplingParams& cp, int max_order,
                                 const SeriesOptions& options = {});

/// Complex amplitude a_{l,o} of exp(i(l k1 + o k2).r) in the combined series.
cdouble combined_amplitude(const OrderState& state, const CouplingParams& cp,
                           const SeriesOptions& options = {});

/// Plane-wave electron after the interaction, evaluated from the truncated
/// series with prefactor (2 pi)^-3/2 exp(-i Omega t) exp(i(k_el - B cos^2 phi) x).
cdouble wavefunction_analytic(Vec2 r, double t, const CouplingParams& cp,
                              const BeamConfig& beam, const ElectronConfig& electron,
                              const SeriesOptions& options = {});

/// Vector-potential amplitude 2 m0 v_el / e at which the quadratic and
/// linear interaction strengths coincide, V s/m.
double interference_criterion(const ElectronConfig& electron);

}  // namespace kapdirac::analytic

#endif  // KAPDIRAC_ANALYTIC_HPP_
