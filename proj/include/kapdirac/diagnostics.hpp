#ifndef KAPDIRAC_DIAGNOSTICS_HPP_
#define KAPDIRAC_DIAGNOSTICS_HPP_

#include <map>
#include <optional>
#include <vector>

#include "kapdirac/analytic.hpp"
#include "kapdirac/model.hpp"
#include "kapdirac/tdse.hpp"

namespace kapdirac::diagnostics {

/// Detector-plane distribution P(k_y), normalized to unit integral.
struct TransverseSpectrum {
  std::vector<double> ky;  // 1/m, ascending
  std::vector<double> p;   // m
  double dky = 0.0;
  double integral() const;
};

TransverseSpectrum transverse_spectrum(const tdse::MomentumWavefunction& psi);
TransverseSpectrum transverse_spectrum(const tdse::Wavefunction2D& psi);

struct Peak {
  double k = 0.0;
  double height = 0.0;
};

/// Local maxima of the curve at or above threshold * max, refined by a
/// three-point parabola and sorted by k. Threshold in (0, 1).
std::vector<Peak> peak_extract(const TransverseSpectrum& spectrum, double threshold = 1e-4);

/// k_ph sin(phi) / 4.
double default_window(const BeamConfig& beam);

/// Order populations from disk integration around k_el + l k1 + o k2.
struct OrderBins {
  analytic::PopulationTable table;  // residual = total probability - assigned
  std::map<analytic::OrderState, Vec2> centroids;  // density-weighted, 1/m
  double total = 0.0;
};

/// Every lattice point whose disk centre lies inside the momentum grid gets a
/// bin. Throws PreconditionError when neighbouring disks would overlap.
OrderBins bin_orders(const tdse::MomentumWavefunction& psi, const BeamConfig& beam,
                     const ElectronConfig& electron, double window_halfwidth);

struct EwaldOptions {
  double threshold = 1e-4;  // relative to the density maximum
  /// Peaks whose kx spread cannot pin a free centre (normal matrix condition
  /// number above this) fall back to a centre at the origin.
  double max_condition = 1e10;
  /// Also fix the centre when the arc's sagitta over the peak ky span is below
  /// this many kx grid cells, since the curvature is then unresolved.
  double min_sagitta_cells = 1.0;
};

struct EwaldFit {
  double radius = 0.0;        // 1/m
  double center_kx = 0.0;     // 1/m
  double rms_deviation = 0.0; // relative to radius
  bool center_fixed = false;
  std::vector<Vec2> peaks;
};

/// Least-squares circle through the 2D momentum peaks, centre on the kx axis.
/// Throws PreconditionError with fewer than three peaks.
EwaldFit ewald_check(const tdse::MomentumWavefunction& psi, const EwaldOptions& options = {});

/// Same fit through an explicit point set.
EwaldFit fit_circle_on_axis(const std::vector<Vec2>& points, double max_condition = 1e10,
                            bool fix_center = false);

struct DiffractionSpectrum {
  TransverseSpectrum p_ky;
  OrderBins orders;
  std::vector<Peak> peaks;
  std::optional<EwaldFit> ewald;
};

struct AnalyzeOptions {
  double window_halfwidth = 0.0;  // <= 0 selects default_window
  double peak_threshold = 1e-4;
  EwaldOptions ewald;
};

/// All diagnostics for one snapshot. The Ewald fit is left empty when fewer
/// than three peaks are present.
DiffractionSpectrum analyze(const tdse::Wavefunction2D& psi, const BeamConfig& beam,
                            const ElectronConfig& electron, const AnalyzeOptions& options = {});

}  // namespace kapdirac::diagnostics

#endif  // KAPDIRAC_DIAGNOSTICS_HPP_
