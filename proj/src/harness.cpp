#include "kapdirac/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "kapdirac/bessel.hpp"
#include "kapdirac/errors.hpp"
#include "kapdirac/fields.hpp"

namespace kapdirac::harness {
namespace {

void append_number(std::string& out, double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

void apply(Parameter p, double v, FixedParameters& f) {
  switch (p) {
    case Parameter::E0: f.beam.E0 = v; break;
    case Parameter::v_el: f.electron.v_el = v; break;
    case Parameter::lambda_ph: f.beam.lambda_ph = v; break;
    case Parameter::phi: f.beam.phi = Angle::from_degrees(v); break;
    case Parameter::dt_over_T: f.dt_over_T = v; break;
  }
}

struct Cell {
  double value = 0.0;
  int truncation = 0;
};

Cell evaluate(const ScanSpec& spec, const FixedParameters& f) {
  const auto& b = f.beam;
  const auto& e = f.electron;
  const auto window = InteractionWindow::from_periods(f.dt_over_T, b);
  switch (spec.observable.kind) {
    case ObservableKind::PPonderomotive:
      return {analytic::p_ponderomotive(spec.observable.n, b, e, e.v_el * window.delta_t()), 0};
    case ObservableKind::PAbsorptive: {
      const auto cp = analytic::coupling_params_at_exit(b, e, window);
      const auto r = analytic::p_absorptive(spec.observable.state, cp, spec.series);
      return {r.probability, r.truncation};
    }
    case ObservableKind::PCombined: {
      const auto cp = analytic::coupling_params_at_exit(b, e, window);
      const auto r = analytic::p_combined(spec.observable.state, cp, spec.series);
      return {r.probability, r.truncation};
    }
    case ObservableKind::H1H2Gap:
      return {h1_h2_gap(b, e), 0};
  }
  return {};
}

}  // namespace

double Axis::value(int i) const {
  const double f = static_cast<double>(i) / (n_points - 1);
  if (i == n_points - 1) return max;
  if (scale == Scale::Log) return min * std::pow(max / min, f);
  return min + (max - min) * f;
}

const char* parameter_name(Parameter p) {
  switch (p) {
    case Parameter::E0: return "E0_V_per_m";
    case Parameter::v_el: return "v_el_m_per_s";
    case Parameter::lambda_ph: return "lambda_ph_m";
    case Parameter::phi: return "phi_deg";
    case Parameter::dt_over_T: return "dt_over_T";
  }
  return "?";
}

std::string observable_name(const Observable& o) {
  switch (o.kind) {
    case ObservableKind::PPonderomotive: return "P_ponderomotive(" + std::to_string(o.n) + ")";
    case ObservableKind::PAbsorptive:
      return "P_absorptive(" + std::to_string(o.state.l) + ";" + std::to_string(o.state.o) + ")";
    case ObservableKind::PCombined:
      return "P_combined(" + std::to_string(o.state.l) + ";" + std::to_string(o.state.o) + ")";
    case ObservableKind::H1H2Gap: return "H1_H2_gap_J";
  }
  return "?";
}

const char* engine_version() { return "kapdirac 1.0.0"; }

void ScanSpec::validate() const {
  for (const Axis* a : {&axis1, &axis2}) {
    if (a->n_points < 2) throw ConfigError("scan axis needs n_points >= 2");
    if (!(a->min < a->max)) throw ConfigError("scan axis needs min < max");
    if (a->scale == Scale::Log && !(a->min > 0.0))
      throw ConfigError("log-scaled scan axis needs min > 0");
  }
  if (axis1.parameter == axis2.parameter) throw ConfigError("scan axes must differ");
  // Every constraint is an interval, so the four corners bound all cells.
  for (double u : {axis1.min, axis1.max})
    for (double v : {axis2.min, axis2.max}) {
      FixedParameters f = fixed;
      f.electron.plane_wave = true;
      apply(axis1.parameter, u, f);
      apply(axis2.parameter, v, f);
      derive_kinematics(f.beam, f.electron);
      if (!(f.dt_over_T >= 0.0)) throw PreconditionError("dt_over_T must be >= 0");
    }
}

int resolve_workers(int requested) {
  if (const char* env = std::getenv("KAPDIRAC_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

ScanResult run_scan(const ScanSpec& spec, int workers) {
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const int n1 = spec.axis1.n_points, n2 = spec.axis2.n_points;
  const std::size_t cells = static_cast<std::size_t>(n1) * n2;
  ScanResult res;
  res.spec = spec;
  res.values.assign(cells, 0.0);
  res.truncation.assign(cells, 0);
  res.flags.assign(cells, 0);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < cells; c = next++) {
      FixedParameters f = spec.fixed;
      f.electron.plane_wave = true;
      apply(spec.axis1.parameter, spec.axis1.value(static_cast<int>(c / n2)), f);
      apply(spec.axis2.parameter, spec.axis2.value(static_cast<int>(c % n2)), f);
      try {
        const Cell v = evaluate(spec, f);
        res.values[c] = v.value;
        res.truncation[c] = v.truncation;
      } catch (const ConvergenceError&) {
        res.flags[c] = 1;
        ScanSpec loose = spec;
        loose.series.tol = 0.5;
        try {
          res.values[c] = evaluate(loose, f).value;
        } catch (const Error&) {
          res.values[c] = std::numeric_limits<double>::quiet_NaN();
        }
        res.truncation[c] = spec.series.cap;
      }
    }
  };
  const int nw = std::max(1, std::min<int>(resolve_workers(workers), static_cast<int>(cells)));
  std::vector<std::thread> pool;
  for (int w = 1; w < nw; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  res.metadata.engine_version = engine_version();
  res.metadata.workers = nw;
  res.metadata.max_truncation = *std::max_element(res.truncation.begin(), res.truncation.end());
  res.metadata.flagged_cells =
      static_cast<int>(std::count(res.flags.begin(), res.flags.end(), 1));
  res.metadata.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

double h1_h2_gap(const BeamConfig& beam, const ElectronConfig& electron) {
  const auto dq = derive_kinematics(beam, electron);
  const auto& K = kConstants;
  const double quad = K.e * K.e * dq.A0 * dq.A0 / (2.0 * K.m0);
  const double lin = K.e * dq.A0 * K.hbar * dq.k_el / K.m0;
  return std::abs(quad - lin);
}

std::string scan_csv(const ScanResult& r) {
  std::string out;
  out += parameter_name(r.spec.axis1.parameter);
  out += ',';
  out += parameter_name(r.spec.axis2.parameter);
  out += ',';
  out += observable_name(r.spec.observable);
  out += ",flag\n";
  const int n1 = r.spec.axis1.n_points, n2 = r.spec.axis2.n_points;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      append_number(out, r.spec.axis1.value(i));
      out += ',';
      append_number(out, r.spec.axis2.value(j));
      out += ',';
      append_number(out, r.at(i, j));
      out += ',';
      out += std::to_string(r.flags[static_cast<std::size_t>(i) * n2 + j]);
      out += '\n';
    }
  return out;
}

std::vector<CheckResult> self_check() {
  std::vector<CheckResult> out;
  auto record = [&](std::string name, bool ok, std::string detail) {
    out.push_back({std::move(name), ok, std::move(detail)});
  };
  BeamConfig beam;
  beam.E0 = 200e9;
  beam.lambda_ph = 30e-9;
  beam.phi = Angle::from_degrees(50.0);
  ElectronConfig el;
  el.v_el = 0.03 * kConstants.c;
  el.plane_wave = true;

  {
    BeamConfig b = beam;
    b.phi = Angle::from_degrees(45.0);
    bool ok = analytic::p_ponderomotive(0, b, el, 1e-6) == 1.0;
    for (int n = 1; n <= 5; ++n) ok = ok && analytic::p_ponderomotive(n, b, el, 1e-6) == 0.0;
    record("ponderomotive cancellation at 45 deg", ok, "");
  }
  {
    CompensatedSum s;
    const auto j = bessel::jn_array(120, 37.5);
    s.add(j[0] * j[0]);
    for (int n = 1; n <= 120; ++n) s.add(2.0 * j[n] * j[n]);
    const double err = std::abs(s.value() - 1.0);
    record("Bessel closure", err < 1e-12, "error " + std::to_string(err));
  }
  {
    bool ok = true;
    for (int n = 1; n <= 3; ++n) {
      const auto cp =
          analytic::coupling_params_at_exit(beam, el, InteractionWindow::from_periods(n, beam));
      ok = ok && analytic::p_absorptive({0, 0}, cp).probability == 1.0;
    }
    record("integer-period Rabi return", ok, "");
  }
  {
    const auto cp =
        analytic::coupling_params_at_exit(beam, el, InteractionWindow::from_periods(0.3, beam));
    const auto t = analytic::population_table(analytic::Channel::Combined, cp, 40);
    record("combined unitarity", std::abs(t.residual) < 1e-6,
           "residual " + std::to_string(t.residual));
  }
  {
    BeamConfig b = beam;
    const double A = analytic::interference_criterion(el);
    b.E0 = A * b.omega();
    const double g = h1_h2_gap(b, el);
    const double scale = kConstants.e * kConstants.e * A * A / (2.0 * kConstants.m0);
    record("H1-H2 crossing", g <= 1e-12 * scale, "relative gap " + std::to_string(g / scale));
  }
  {
    const double T = beam.period();
    const auto a = fields::eval_plane_pair(beam, 3e-9, 5e-9, 0.25 * T);
    const auto b = fields::eval_plane_pair(beam, 3e-9, 5e-9, 1.25 * T);
    const double d = std::abs(a.A.x - b.A.x) + std::abs(a.A.y - b.A.y);
    record("field periodicity", d <= 1e-9 * std::abs(beam.A0()), "");
  }
  return out;
}

}  // namespace kapdirac::harness
