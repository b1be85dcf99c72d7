#include "kapdirac/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kapdirac/errors.hpp"
#include "kapdirac/numeric.hpp"

namespace kapdirac::diagnostics {

double TransverseSpectrum::integral() const {
  CompensatedSum acc;
  for (double v : p) acc.add(v);
  return acc.value() * dky;
}

TransverseSpectrum transverse_spectrum(const tdse::MomentumWavefunction& psi) {
  const std::size_t nx = psi.kx.size(), ny = psi.ky.size();
  TransverseSpectrum out;
  out.ky = psi.ky;
  out.dky = psi.dky;
  out.p.assign(ny, 0.0);
  for (std::size_t j = 0; j < ny; ++j) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < nx; ++i) acc.add(std::norm(psi.amplitudes[i * ny + j]));
    out.p[j] = acc.value() * psi.dkx;
  }
  const double total = out.integral();
  if (total > 0.0)
    for (double& v : out.p) v /= total;
  return out;
}

TransverseSpectrum transverse_spectrum(const tdse::Wavefunction2D& psi) {
  return transverse_spectrum(tdse::to_momentum(psi));
}

std::vector<Peak> peak_extract(const TransverseSpectrum& s, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw PreconditionError("peak_extract: threshold must lie in (0, 1)");
  std::vector<Peak> peaks;
  const std::size_t n = s.p.size();
  if (n < 3) return peaks;
  const double level = threshold * *std::max_element(s.p.begin(), s.p.end());
  if (!(level > 0.0)) return peaks;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double a = s.p[j - 1], b = s.p[j], c = s.p[j + 1];
    if (b < level || b < a || b <= c) continue;
    const double curv = a - 2.0 * b + c;
    double shift = curv < 0.0 ? 0.5 * (a - c) / curv : 0.0;
    shift = std::clamp(shift, -0.5, 0.5);
    peaks.push_back({s.ky[j] + shift * s.dky, b - 0.25 * (a - c) * shift});
  }
  return peaks;
}

double default_window(const BeamConfig& beam) { return 0.25 * beam.k_ph() * beam.phi.sin(); }

namespace {

double min_lattice_spacing(Vec2 k1, Vec2 k2) {
  double best = std::numeric_limits<double>::infinity();
  for (int l = -4; l <= 4; ++l)
    for (int o = -4; o <= 4; ++o) {
      if (l == 0 && o == 0) continue;
      best = std::min(best, std::hypot(l * k1.x + o * k2.x, l * k1.y + o * k2.y));
    }
  return best;
}

}  // namespace

OrderBins bin_orders(const tdse::MomentumWavefunction& psi, const BeamConfig& beam,
                     const ElectronConfig& electron, double r) {
  if (!(r > 0.0)) throw PreconditionError("bin_orders: window half-width must be > 0");
  const Vec2 k1 = analytic::photon_k1(beam), k2 = analytic::photon_k2(beam);
  const double spacing = min_lattice_spacing(k1, k2);
  if (!(spacing > 2.0 * r))
    throw PreconditionError("bin_orders: order windows overlap (lattice spacing " +
                            std::to_string(spacing) + " <= 2 x window)");
  const double det = k1.x * k2.y - k2.x * k1.y;
  const double k_el = electron.k_el();

  const std::size_t nx = psi.kx.size(), ny = psi.ky.size();
  const double kx_lo = psi.kx.front(), kx_hi = psi.kx.back();
  const double ky_lo = psi.ky.front(), ky_hi = psi.ky.back();
  auto center_of = [&](int l, int o) {
    return Vec2{k_el + l * k1.x + o * k2.x, l * k1.y + o * k2.y};
  };
  auto inside = [&](Vec2 c) { return c.x >= kx_lo && c.x <= kx_hi && c.y >= ky_lo && c.y <= ky_hi; };

  struct Acc {
    CompensatedSum w, wx, wy;
  };
  std::map<analytic::OrderState, Acc> acc;
  CompensatedSum total;
  const double measure = psi.dkx * psi.dky;
  for (std::size_t i = 0; i < nx; ++i) {
    const double qx = psi.kx[i] - k_el;
    for (std::size_t j = 0; j < ny; ++j) {
      const double d = std::norm(psi.amplitudes[i * ny + j]) * measure;
      total.add(d);
      const double qy = psi.ky[j];
      // Fractional lattice coordinates of this grid point.
      const double lf = (qx * k2.y - k2.x * qy) / det;
      const double of = (k1.x * qy - qx * k1.y) / det;
      const int l0 = static_cast<int>(std::lround(lf)), o0 = static_cast<int>(std::lround(of));
      for (int dl = -2; dl <= 2; ++dl)
        for (int dq = -2; dq <= 2; ++dq) {
          const int l = l0 + dl, o = o0 + dq;
          const Vec2 c = center_of(l, o);
          if (std::hypot(psi.kx[i] - c.x, qy - c.y) > r || !inside(c)) continue;
          auto& a = acc[{l, o}];
          a.w.add(d);
          a.wx.add(d * psi.kx[i]);
          a.wy.add(d * qy);
          dl = dq = 3;  // windows are disjoint
        }
    }
  }

  OrderBins out;
  out.total = total.value();
  // Every lattice point inside the grid is reported, populated or not.
  const double span = std::max(kx_hi - kx_lo, ky_hi - ky_lo);
  const int reach = std::min(64, static_cast<int>(std::ceil(span / spacing)) + 1);
  for (int l = -reach; l <= reach; ++l)
    for (int o = -reach; o <= reach; ++o)
      if (inside(center_of(l, o))) out.table.entries[{l, o}] = 0.0;
  CompensatedSum assigned;
  for (const auto& [state, a] : acc) {
    const double w = a.w.value();
    out.table.entries[state] = w;
    assigned.add(w);
    out.centroids[state] = w > 0.0 ? Vec2{a.wx.value() / w, a.wy.value() / w} : center_of(state.l, state.o);
  }
  out.table.residual = out.total - assigned.value();
  out.table.truncation = reach;
  return out;
}

EwaldFit fit_circle_on_axis(const std::vector<Vec2>& points, double max_condition, bool fix_center) {
  if (points.size() < 3)
    throw PreconditionError("ewald_check: at least three peaks are required, found " +
                            std::to_string(points.size()));
  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, std::hypot(p.x, p.y));
  if (!(scale > 0.0)) throw PreconditionError("ewald_check: peaks sit at the origin");

  // (x - a)^2 + y^2 = R^2  ->  x^2 + y^2 = 2 a x + (R^2 - a^2), linear in (a, C).
  double sxx = 0, sx = 0, n = 0, sxz = 0, sz = 0;
  for (const auto& p : points) {
    const double x = p.x / scale, y = p.y / scale, z = x * x + y * y;
    sxx += x * x;
    sx += x;
    n += 1.0;
    sxz += x * z;
    sz += z;
  }
  const double m11 = 4.0 * sxx, m12 = 2.0 * sx, m22 = n;
  const double tr = m11 + m22, dt = m11 * m22 - m12 * m12;
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - dt));
  const double lmax = tr / 2.0 + disc, lmin = tr / 2.0 - disc;

  EwaldFit fit;
  double a = 0.0, R2 = 0.0;
  if (!fix_center && lmin > 0.0 && lmax / lmin <= max_condition) {
    const double b1 = 2.0 * sxz, b2 = sz;
    a = (b1 * m22 - m12 * b2) / dt;
    const double C = (m11 * b2 - m12 * b1) / dt;
    R2 = C + a * a;
  } else {
    fit.center_fixed = true;
    R2 = sz / n;
  }
  const double R = std::sqrt(std::max(R2, 0.0));
  CompensatedSum dev;
  for (const auto& p : points) {
    const double d = std::hypot(p.x / scale - a, p.y / scale) - R;
    dev.add(d * d);
  }
  fit.radius = R * scale;
  fit.center_kx = a * scale;
  fit.rms_deviation = R > 0.0 ? std::sqrt(dev.value() / n) / R : 0.0;
  fit.peaks = points;
  return fit;
}

EwaldFit ewald_check(const tdse::MomentumWavefunction& psi, const EwaldOptions& options) {
  const std::size_t nx = psi.kx.size(), ny = psi.ky.size();
  double dmax = 0.0;
  for (const auto& z : psi.amplitudes) dmax = std::max(dmax, std::norm(z));
  const double level = options.threshold * dmax;
  auto d = [&](std::size_t i, std::size_t j) { return std::norm(psi.amplitudes[i * ny + j]); };

  std::vector<Vec2> peaks;
  for (std::size_t i = 1; i + 1 < nx; ++i)
    for (std::size_t j = 1; j + 1 < ny; ++j) {
      const double v = d(i, j);
      if (v < level || !(v > 0.0)) continue;
      bool is_max = true;
      for (int di = -1; di <= 1 && is_max; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const double w = d(i + di, j + dj);
          // Strict on one side so flat plateaus yield one peak.
          if (w > v || (w == v && (di < 0 || (di == 0 && dj < 0)))) {
            is_max = false;
            break;
          }
        }
      if (!is_max) continue;
      auto refine = [](double a, double b, double c) {
        const double curv = a - 2.0 * b + c;
        return curv < 0.0 ? std::clamp(0.5 * (a - c) / curv, -0.5, 0.5) : 0.0;
      };
      const double sx = refine(d(i - 1, j), v, d(i + 1, j));
      const double sy = refine(d(i, j - 1), v, d(i, j + 1));
      peaks.push_back({psi.kx[i] + sx * psi.dkx, psi.ky[j] + sy * psi.dky});
    }
  double ky_span = 0.0, k_max = 0.0;
  for (const auto& p : peaks) {
    ky_span = std::max(ky_span, std::abs(p.y));
    k_max = std::max(k_max, std::hypot(p.x, p.y));
  }
  const bool unresolved =
      k_max > 0.0 && ky_span * ky_span / (2.0 * k_max) < options.min_sagitta_cells * psi.dkx;
  return fit_circle_on_axis(peaks, options.max_condition, unresolved);
}

DiffractionSpectrum analyze(const tdse::Wavefunction2D& psi, const BeamConfig& beam,
                            const ElectronConfig& electron, const AnalyzeOptions& options) {
  const auto mom = tdse::to_momentum(psi);
  DiffractionSpectrum out;
  out.p_ky = transverse_spectrum(mom);
  out.peaks = peak_extract(out.p_ky, options.peak_threshold);
  const double r = options.window_halfwidth > 0.0 ? options.window_halfwidth : default_window(beam);
  out.orders = bin_orders(mom, beam, electron, r);
  try {
    out.ewald = ewald_check(mom, options.ewald);
  } catch (const PreconditionError&) {
    out.ewald.reset();
  }
  return out;
}

}  // namespace kapdirac::diagnostics
