#ifndef KAPDIRAC_MODEL_HPP_
#define KAPDIRAC_MODEL_HPP_

#include <variant>

namespace kapdirac {

/// CODATA 2018 values, SI.
struct PhysicalConstants {
  double e;     // elementary charge, C
  double m0;    // electron rest mass, kg
  double hbar;  // reduced Planck constant, J s
  double c;     // speed of light, m/s
};

inline constexpr PhysicalConstants kConstants{
    1.602176634e-19, 9.1093837015e-31, 1.054571817e-34, 299792458.0};

/// Plane angle. Held as a multiple of pi so that 0, 45 and 90 degrees give
/// exact trigonometric values.
class Angle {
 public:
  constexpr Angle() = default;

  static Angle from_degrees(double deg) { return Angle(deg / 180.0); }
  static Angle from_radians(double rad);
  static constexpr Angle from_half_turns(double h) { return Angle(h); }

  double radians() const;
  double degrees() const { return half_turns_ * 180.0; }
  constexpr double half_turns() const { return half_turns_; }

  double sin() const;
  double cos() const;
  /// cos(2*angle)
  double cos2() const;

  friend constexpr bool operator==(Angle, Angle) = default;

 private:
  constexpr explicit Angle(double h) : half_turns_(h) {}
  double half_turns_ = 0.0;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

struct PlaneWaveEnvelope {
  friend constexpr bool operator==(PlaneWaveEnvelope, PlaneWaveEnvelope) = default;
};

struct GaussianParaxialEnvelope {
  double waist = 0.0;  // 1/e amplitude radius at focus, m
  Vec2 focus_center;   // m
  friend constexpr bool operator==(GaussianParaxialEnvelope,
                                   GaussianParaxialEnvelope) = default;
};

using Envelope = std::variant<PlaneWaveEnvelope, GaussianParaxialEnvelope>;

/// Two inclined beams of equal amplitude and wavelength at +-phi to the x axis.
struct BeamConfig {
  double E0 = 0.0;          // field amplitude per beam, V/m
  double lambda_ph = 0.0;   // vacuum wavelength, m
  Angle phi;                // inclination
  Envelope envelope = PlaneWaveEnvelope{};
  double carrier_phase = 0.0;  // rad
  int turn_on_cycles = 0;      // smooth sin^2 turn-on; 0 = continuous wave

  /// Throws PreconditionError when an invariant is violated.
  void validate() const;

  double omega() const;
  double k_ph() const;
  double A0() const;
  double period() const;
  bool is_plane_wave() const {
    return std::holds_alternative<PlaneWaveEnvelope>(envelope);
  }

  friend bool operator==(const BeamConfig&, const BeamConfig&) = default;
};

struct ElectronConfig {
  double v_el = 0.0;  // carrier speed along +x, m/s
  double W_x = 0.0;   // longitudinal width, m
  double W_y = 0.0;   // transverse width, m
  Vec2 center;
  bool plane_wave = false;

  void validate() const;

  /// Nonrelativistic m0 v / hbar.
  double k_el() const;
  /// Kinetic energy over hbar, rad/s.
  double Omega() const;

  friend bool operator==(const ElectronConfig&, const ElectronConfig&) = default;
};

/// Interaction duration. Kept both in seconds and in optical periods; the
/// period count is authoritative for the trigonometry so that integer periods
/// reproduce the exact Rabi return.
class InteractionWindow {
 public:
  static InteractionWindow from_periods(double periods, const BeamConfig& beam);
  static InteractionWindow from_duration(double delta_t, const BeamConfig& beam);

  double delta_t() const { return delta_t_; }
  double periods() const { return periods_; }

  /// Throws if the stored period count disagrees with beam.period().
  void check_consistent(const BeamConfig& beam) const;

 private:
  InteractionWindow(double dt, double periods) : delta_t_(dt), periods_(periods) {}
  double delta_t_ = 0.0;
  double periods_ = 0.0;
};

struct DerivedQuantities {
  double omega;  // rad/s
  double k_ph;   // 1/m
  double A0;     // V s/m
  double T;      // s
  double k_el;   // 1/m
  double Omega;  // rad/s
};

/// Validates both configurations and returns the kinematic quantities used by
/// every engine.
DerivedQuantities derive_kinematics(const BeamConfig& beam, const ElectronConfig& electron);

}  // namespace kapdirac

#endif  // KAPDIRAC_MODEL_HPP_
