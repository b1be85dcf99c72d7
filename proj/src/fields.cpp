#include "kapdirac/fields.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>

#include "kapdirac/errors.hpp"

namespace kapdirac::fields {
namespace {

constexpr double kPi = std::numbers::pi;

struct BeamGeometry {
  double s;       // sin phi
  double c;       // cos phi
  double sigma;   // +1 plus beam, -1 minus beam
};

/// Envelope amplitude and phase correction of one paraxial beam relative to
/// its plane-wave counterpart.
struct ParaxialFactor {
  double amplitude;
  double phase;
};

ParaxialFactor paraxial_factor(const BeamConfig& beam, const GaussianParaxialEnvelope& g,
                               const BeamGeometry& geo, double x, double y) {
  const double k = beam.k_ph();
  const double dx = x - g.focus_center.x;
  const double dy = y - g.focus_center.y;
  // Propagation direction is -(c, sigma s); rho is the in-plane transverse offset.
  const double z = -(geo.c * dx + geo.sigma * geo.s * dy);
  const double rho = -geo.sigma * geo.s * dx + geo.c * dy;
  const double w0 = g.waist;
  const double zR = 0.5 * k * w0 * w0;
  const double zz = z / zR;
  const double w2 = w0 * w0 * (1.0 + zz * zz);
  const double inv_R = z / (z * z + zR * zR);
  const double amplitude = w0 / std::sqrt(w2) * std::exp(-rho * rho / w2);
  const double phase = -0.5 * k * rho * rho * inv_R + std::atan(zz);
  return {amplitude, phase};
}

bool selected(BeamSelection which, double sigma) {
  return which == BeamSelection::Both || (which == BeamSelection::Plus && sigma > 0) ||
         (which == BeamSelection::Minus && sigma < 0);
}

const GaussianParaxialEnvelope& require_gaussian(const BeamConfig& beam) {
  const auto* g = std::get_if<GaussianParaxialEnvelope>(&beam.envelope);
  if (!g) throw PreconditionError("Gaussian field evaluation requires a paraxial envelope");
  if (!(g->waist >= 1.5 * beam.lambda_ph))
    throw PreconditionError("paraxial waist must be >= 1.5 lambda_ph");
  return *g;
}

/// Complex phasor of E such that E(t) = Re(phasor * exp(i omega t)).
std::array<std::complex<double>, 2> gaussian_phasor(const BeamConfig& beam,
                                                    const GaussianParaxialEnvelope& g,
                                                    double x, double y,
                                                    BeamSelection which) {
  const double s = beam.phi.sin();
  const double c = beam.phi.cos();
  const double k = beam.k_ph();
  std::array<std::complex<double>, 2> out{};
  for (double sigma : {1.0, -1.0}) {
    if (!selected(which, sigma)) continue;
    const BeamGeometry geo{s, c, sigma};
    const auto pf = paraxial_factor(beam, g, geo, x, y);
    const double phase = k * (c * x + sigma * s * y) + beam.carrier_phase + pf.phase;
    // E = -E0 P env sin(omega t + phase) = Re(i E0 P env e^{i phase} e^{i omega t})
    const auto ph = std::complex<double>(0.0, 1.0) * beam.E0 * pf.amplitude *
                    std::polar(1.0, phase);
    out[0] += ph * s;
    out[1] += ph * (-sigma * c);
  }
  return out;
}

}  // namespace

FieldSample eval_plane_pair(const BeamConfig& beam, double x, double y, double t) {
  const double s = beam.phi.sin();
  const double c = beam.phi.cos();
  const double k = beam.k_ph();
  const double omega = beam.omega();
  const double A0 = beam.E0 / omega;
  const double ky = k * s * y;
  const double theta = omega * t + k * c * x + beam.carrier_phase;
  const double cy = std::cos(ky), sy = std::sin(ky);
  const double ct = std::cos(theta), st = std::sin(theta);
  FieldSample f;
  f.A.x = -2.0 * A0 * s * cy * ct;
  f.A.y = -2.0 * A0 * c * sy * st;
  f.E.x = -2.0 * beam.E0 * s * cy * st;
  f.E.y = 2.0 * beam.E0 * c * sy * ct;
  return f;
}

FieldSample eval_gaussian_pair(const BeamConfig& beam, double x, double y, double t,
                               BeamSelection which) {
  const auto& g = require_gaussian(beam);
  const double s = beam.phi.sin();
  const double c = beam.phi.cos();
  const double k = beam.k_ph();
  const double omega = beam.omega();
  const double A0 = beam.E0 / omega;
  FieldSample f{};
  for (double sigma : {1.0, -1.0}) {
    if (!selected(which, sigma)) continue;
    const BeamGeometry geo{s, c, sigma};
    const auto pf = paraxial_factor(beam, g, geo, x, y);
    const double Phi =
        omega * t + k * (c * x + sigma * s * y) + beam.carrier_phase + pf.phase;
    const double cosP = std::cos(Phi), sinP = std::sin(Phi);
    const double px = s, py = -sigma * c;  // polarization
    f.A.x += -A0 * px * pf.amplitude * cosP;
    f.A.y += -A0 * py * pf.amplitude * cosP;
    f.E.x += -beam.E0 * px * pf.amplitude * sinP;
    f.E.y += -beam.E0 * py * pf.amplitude * sinP;
  }
  return f;
}

FieldSample eval_field(const BeamConfig& beam, double x, double y, double t) {
  FieldSample f = beam.is_plane_wave() ? eval_plane_pair(beam, x, y, t)
                                       : eval_gaussian_pair(beam, x, y, t);
  if (beam.turn_on_cycles > 0) {
    const double ramp_time = beam.turn_on_cycles * beam.period();
    if (t <= 0.0) return FieldSample{};
    if (t < ramp_time) {
      const double u = 0.5 * kPi * t / ramp_time;
      const double g = std::sin(u) * std::sin(u);
      const double dg = std::sin(2.0 * u) * 0.5 * kPi / ramp_time;
      f.E.x = g * f.E.x - dg * f.A.x;
      f.E.y = g * f.E.y - dg * f.A.y;
      f.A.x *= g;
      f.A.y *= g;
    }
  }
  return f;
}

double cycle_averaged_intensity(const BeamConfig& beam, double x, double y,
                                BeamSelection which) {
  if (beam.is_plane_wave()) {
    // Plane pair: average of |E|^2 over one period at fixed (x, y).
    const double s = beam.phi.sin(), c = beam.phi.cos();
    const double ky = beam.k_ph() * s * y;
    if (which != BeamSelection::Both) return 0.5 * beam.E0 * beam.E0;
    return 2.0 * beam.E0 * beam.E0 *
           (s * s * std::cos(ky) * std::cos(ky) + c * c * std::sin(ky) * std::sin(ky));
  }
  const auto& g = require_gaussian(beam);
  const auto ph = gaussian_phasor(beam, g, x, y, which);
  return 0.5 * (std::norm(ph[0]) + std::norm(ph[1]));
}

namespace {

// Marching squares. Edge points are keyed by (cell-edge id) so that segments
// from neighbouring cells join exactly.
struct EdgeKey {
  int i, j, dir;  // dir 0: edge from (i,j) to (i+1,j); dir 1: (i,j) to (i,j+1)
  auto operator<=>(const EdgeKey&) const = default;
};

}  // namespace

std::vector<Polyline> intensity_contour_e1(const BeamConfig& beam,
                                           const ContourOptions& options) {
  const auto& g = require_gaussian(beam);
  const int n = options.resolution;
  if (n < 3) throw PreconditionError("contour resolution must be >= 3");
  const double zR = 0.5 * beam.k_ph() * g.waist * g.waist;
  const double half = options.half_extent > 0.0 ? options.half_extent : 3.0 * g.waist + zR;
  const double x0 = g.focus_center.x - half, y0 = g.focus_center.y - half;
  const double h = 2.0 * half / (n - 1);

  const double level =
      std::exp(-1.0) *
      cycle_averaged_intensity(beam, g.focus_center.x, g.focus_center.y, options.which);

  std::vector<double> f(static_cast<std::size_t>(n) * n);
  auto at = [&](int i, int j) -> double& { return f[static_cast<std::size_t>(i) * n + j]; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      at(i, j) = cycle_averaged_intensity(beam, x0 + i * h, y0 + j * h, options.which) - level;

  auto edge_point = [&](const EdgeKey& e) {
    const int i2 = e.dir == 0 ? e.i + 1 : e.i;
    const int j2 = e.dir == 0 ? e.j : e.j + 1;
    const double a = at(e.i, e.j), b = at(i2, j2);
    const double t = a / (a - b);
    return Vec2{x0 + (e.i + t * (i2 - e.i)) * h, y0 + (e.j + t * (j2 - e.j)) * h};
  };

  std::map<EdgeKey, std::vector<EdgeKey>> adjacency;
  auto link = [&](EdgeKey a, EdgeKey b) {
    adjacency[a].push_back(b);
    adjacency[b].push_back(a);
  };

  for (int i = 0; i + 1 < n; ++i) {
    for (int j = 0; j + 1 < n; ++j) {
      // Corners counter-clockwise: (i,j) (i+1,j) (i+1,j+1) (i,j+1).
      const bool b0 = at(i, j) > 0, b1 = at(i + 1, j) > 0;
      const bool b2 = at(i + 1, j + 1) > 0, b3 = at(i, j + 1) > 0;
      const EdgeKey bottom{i, j, 0}, right{i + 1, j, 1}, top{i, j + 1, 0}, left{i, j, 1};
      const int code = b0 | (b1 << 1) | (b2 << 2) | (b3 << 3);
      switch (code) {
        case 0: case 15: break;
        case 1: case 14: link(left, bottom); break;
        case 2: case 13: link(bottom, right); break;
        case 3: case 12: link(left, right); break;
        case 4: case 11: link(right, top); break;
        case 6: case 9: link(bottom, top); break;
        case 7: case 8: link(left, top); break;
        case 5: case 10: {
          const double centre =
              0.25 * (at(i, j) + at(i + 1, j) + at(i + 1, j + 1) + at(i, j + 1));
          const bool centre_in = centre > 0;
          if ((code == 5) == centre_in) {
            link(left, top);
            link(bottom, right);
          } else {
            link(left, bottom);
            link(right, top);
          }
          break;
        }
      }
    }
  }

  std::vector<Polyline> out;
  std::map<EdgeKey, bool> visited;
  for (const auto& [start, nbrs] : adjacency) {
    if (visited[start]) continue;
    // Open chains start at a degree-1 node; closed loops at any node.
    EdgeKey first = start;
    if (nbrs.size() == 2) {
      // Walk backwards to an end, if any, so open chains are emitted whole.
      EdgeKey prev = start, cur = nbrs[0];
      while (!(cur == start)) {
        const auto& nn = adjacency[cur];
        if (nn.size() < 2) { first = cur; break; }
        EdgeKey next = (nn[0] == prev) ? nn[1] : nn[0];
        prev = cur;
        cur = next;
      }
    }
    Polyline line;
    EdgeKey prev{-1, -1, -1}, cur = first;
    while (true) {
      visited[cur] = true;
      line.push_back(edge_point(cur));
      const auto& nn = adjacency[cur];
      const EdgeKey* next = nullptr;
      for (const auto& cand : nn)
        if (!(cand == prev) && !visited[cand]) { next = &cand; break; }
      if (!next) {
        for (const auto& cand : nn)
          if (cand == first && !(prev == first) && line.size() > 2) {
            line.push_back(line.front());
            break;
          }
        break;
      }
      prev = cur;
      cur = *next;
    }
    out.push_back(std::move(line));
  }
  return out;
}

}  // namespace kapdirac::fields
