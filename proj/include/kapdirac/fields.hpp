#ifndef KAPDIRAC_FIELDS_HPP_
#define KAPDIRAC_FIELDS_HPP_

#include <vector>

#include "kapdirac/model.hpp"

namespace kapdirac::fields {

/// Vector potential (V s/m) and electric field (V/m) at one space-time point.
struct FieldSample {
  Vec2 A;
  Vec2 E;
};

/// Which of the two inclined beams contribute. The "plus" beam carries
/// spatial phase k(cos phi x + sin phi y), the "minus" beam k(cos phi x - sin phi y).
enum class BeamSelection { Both, Plus, Minus };

/// Coherent sum of two inclined plane waves. Standing wave along y, travelling
/// wave along x. Ignores the beam's envelope setting.
FieldSample eval_plane_pair(const BeamConfig& beam, double x, double y, double t);

/// Two paraxial TEM00 beams focused at the envelope's focus center, each
/// propagating along its own inclined axis. Amplitude envelope
/// w0/w(z) exp(-rho^2/w(z)^2), wavefront curvature and Gouy phase arctan(z/zR).
/// Requires a GaussianParaxial envelope.
FieldSample eval_gaussian_pair(const BeamConfig& beam, double x, double y, double t,
                               BeamSelection which = BeamSelection::Both);

/// Dispatches on the envelope and applies the optional sin^2 turn-on over
/// beam.turn_on_cycles periods. This is the field the TDSE engine sees.
FieldSample eval_field(const BeamConfig& beam, double x, double y, double t);

/// Cycle-averaged |E|^2 of the CW field, (V/m)^2.
double cycle_averaged_intensity(const BeamConfig& beam, double x, double y,
                                BeamSelection which = BeamSelection::Both);

using Polyline = std::vector<Vec2>;

struct ContourOptions {
  BeamSelection which = BeamSelection::Both;
  /// Half-width of the square sampling region around the focus; <= 0 picks
  /// 3 w0 + zR automatically.
  double half_extent = 0.0;
  int resolution = 401;  // samples per axis
};

/// Level set where the cycle-averaged intensity equals e^-1 of its value at
/// the focus center. Closed polylines repeat their first vertex at the end.
/// Throws PreconditionError for plane-wave envelopes.
std::vector<Polyline> intensity_contour_e1(const BeamConfig& beam,
                                           const ContourOptions& options = {});

}  // namespace kapdirac::fields

#endif  // KAPDIRAC_FIELDS_HPP_
