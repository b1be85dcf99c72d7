#include "kapdirac/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kapdirac/errors.hpp"
#include "kapdirac/numeric.hpp"

namespace kapdirac {

Angle Angle::from_radians(double rad) { return Angle(rad / std::numbers::pi); }

double Angle::radians() const { return half_turns_ * std::numbers::pi; }
double Angle::sin() const { return sin_pi(half_turns_); }
double Angle::cos() const { return cos_pi(half_turns_); }
double Angle::cos2() const { return cos_pi(2.0 * half_turns_); }

void BeamConfig::validate() const {
  if (!(E0 >= 0.0) || !std::isfinite(E0))
    throw PreconditionError("beam: E0 must be finite and >= 0");
  if (!(lambda_ph > 0.0) || !std::isfinite(lambda_ph))
    throw PreconditionError("beam: lambda_ph must be > 0");
  if (!(phi.half_turns() >= 0.0 && phi.half_turns() <= 0.5))
    throw PreconditionError("beam: phi must lie in [0, 90] degrees");
  if (turn_on_cycles < 0)
    throw PreconditionError("beam: turn_on_cycles must be >= 0");
  if (const auto* g = std::get_if<GaussianParaxialEnvelope>(&envelope)) {
    if (!(g->waist >= 1.5 * lambda_ph))
      throw PreconditionError("beam: paraxial waist must be >= 1.5 lambda_ph (got " +
                              std::to_string(g->waist / lambda_ph) + " lambda)");
  }
}

double BeamConfig::omega() const {
  return 2.0 * std::numbers::pi * kConstants.c / lambda_ph;
}
double BeamConfig::k_ph() const { return omega() / kConstants.c; }
double BeamConfig::A0() const { return E0 / omega(); }
double BeamConfig::period() const { return 2.0 * std::numbers::pi / omega(); }

void ElectronConfig::validate() const {
  if (!(v_el > 0.0))
    throw PreconditionError("electron: v_el must be > 0");
  if (!(v_el < kConstants.c))
    throw PreconditionError("electron: v_el must be below c (nonrelativistic model)");
  if (!plane_wave && !(W_x > 0.0 && W_y > 0.0))
    throw PreconditionError("electron: wavepacket widths W_x, W_y must be > 0");
}

double ElectronConfig::k_el() const { return kConstants.m0 * v_el / kConstants.hbar; }

double ElectronConfig::Omega() const {
  return 0.5 * kConstants.m0 * v_el * v_el / kConstants.hbar;
}

InteractionWindow InteractionWindow::from_periods(double periods, const BeamConfig& beam) {
  if (!(periods >= 0.0)) throw PreconditionError("interaction window must be >= 0");
  return InteractionWindow(periods * beam.period(), periods);
}

InteractionWindow InteractionWindow::from_duration(double delta_t, const BeamConfig& beam) {
  if (!(delta_t >= 0.0)) throw PreconditionError("interaction window must be >= 0");
  return InteractionWindow(delta_t, delta_t / beam.period());
}

void InteractionWindow::check_consistent(const BeamConfig& beam) const {
  double expected = delta_t_ / beam.period();
  double scale = std::max(std::abs(expected), 1.0);
  if (std::abs(expected - periods_) > 1e-12 * scale)
    throw PreconditionError("interaction window inconsistent with beam period");
}

DerivedQuantities derive_kinematics(const BeamConfig& beam, const ElectronConfig& electron) {
  beam.validate();
  electron.validate();
  return DerivedQuantities{beam.omega(), beam.k_ph(),     beam.A0(),
                           beam.period(), electron.k_el(), electron.Omega()};
}

}  // namespace kapdirac
