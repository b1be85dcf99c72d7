#include "kapdirac/config_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kapdirac/errors.hpp"
#include "kapdirac/fields.hpp"

namespace kapdirac::io {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

json parse_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("JSON parse error: ") + e.what());
  }
}

/// Strict object reader: every key must be consumed by the time finish() runs.
class Reader {
 public:
  Reader(const json& j, std::string context) : j_(j), ctx_(std::move(context)) {
    if (!j_.is_object()) throw ConfigError(ctx_ + ": expected a JSON object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  double number(const char* key) {
    const json& v = get(key);
    if (!v.is_number()) throw ConfigError(ctx_ + "." + key + ": expected a number");
    return v.get<double>();
  }
  double number(const char* key, double fallback) { return has(key) ? number(key) : fallback; }

  int integer(const char* key) {
    const json& v = get(key);
    if (!v.is_number_integer()) throw ConfigError(ctx_ + "." + key + ": expected an integer");
    return v.get<int>();
  }
  int integer(const char* key, int fallback) { return has(key) ? integer(key) : fallback; }

  bool boolean(const char* key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = get(key);
    if (!v.is_boolean()) throw ConfigError(ctx_ + "." + key + ": expected true/false");
    return v.get<bool>();
  }

  std::string string(const char* key) {
    const json& v = get(key);
    if (!v.is_string()) throw ConfigError(ctx_ + "." + key + ": expected a string");
    return v.get<std::string>();
  }
  std::string string(const char* key, const std::string& fallback) {
    return has(key) ? string(key) : fallback;
  }

  Vec2 vec2(const char* key, Vec2 fallback) {
    if (!has(key)) return fallback;
    const json& v = get(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw ConfigError(ctx_ + "." + key + ": expected [x, y]");
    return {v[0].get<double>(), v[1].get<double>()};
  }

  const json& object(const char* key) {
    const json& v = get(key);
    if (!v.is_object()) throw ConfigError(ctx_ + "." + key + ": expected an object");
    return v;
  }

  std::string path(const char* key) const { return ctx_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(ctx_ + ": unknown key '" + it.key() + "'");
  }

 private:
  const json& get(const char* key) {
    if (!j_.contains(key)) throw ConfigError(ctx_ + ": missing key '" + key + "'");
    used_.insert(key);
    return j_.at(key);
  }

  const json& j_;
  std::string ctx_;
  std::set<std::string> used_;
};

// ---------------------------------------------------------------- beam

json to_json(const BeamConfig& b) {
  json j;
  j["E0_V_per_m"] = b.E0;
  j["lambda_ph_m"] = b.lambda_ph;
  j["phi_deg"] = b.phi.degrees();
  j["carrier_phase_rad"] = b.carrier_phase;
  j["turn_on_cycles"] = b.turn_on_cycles;
  if (const auto* g = std::get_if<GaussianParaxialEnvelope>(&b.envelope)) {
    j["envelope"] = {{"type", "gaussian_paraxial"},
                     {"waist_m", g->waist},
                     {"focus_center_m", {g->focus_center.x, g->focus_center.y}}};
  } else {
    j["envelope"] = {{"type", "plane_wave"}};
  }
  return j;
}

BeamConfig beam_from(const json& j, const std::string& ctx) {
  Reader r(j, ctx);
  BeamConfig b;
  b.E0 = r.number("E0_V_per_m");
  b.lambda_ph = r.number("lambda_ph_m");
  b.phi = Angle::from_degrees(r.number("phi_deg"));
  b.carrier_phase = r.number("carrier_phase_rad", 0.0);
  b.turn_on_cycles = r.integer("turn_on_cycles", 0);
  if (r.has("envelope")) {
    Reader e(r.object("envelope"), r.path("envelope"));
    const std::string type = e.string("type");
    if (type == "plane_wave") {
      b.envelope = PlaneWaveEnvelope{};
    } else if (type == "gaussian_paraxial") {
      GaussianParaxialEnvelope g;
      g.waist = e.number("waist_m");
      g.focus_center = e.vec2("focus_center_m", {});
      b.envelope = g;
    } else {
      throw ConfigError(e.path("type") + ": unknown envelope '" + type + "'");
    }
    e.finish();
  }
  r.finish();
  b.validate();
  return b;
}

// ------------------------------------------------------------ electron

json to_json(const ElectronConfig& e) {
  json j;
  j["v_el_m_per_s"] = e.v_el;
  j["W_x_m"] = e.W_x;
  j["W_y_m"] = e.W_y;
  j["center_m"] = {e.center.x, e.center.y};
  j["plane_wave"] = e.plane_wave;
  return j;
}

ElectronConfig electron_from(const json& j, const std::string& ctx) {
  Reader r(j, ctx);
  ElectronConfig e;
  e.v_el = r.number("v_el_m_per_s");
  e.W_x = r.number("W_x_m", 0.0);
  e.W_y = r.number("W_y_m", 0.0);
  e.center = r.vec2("center_m", {});
  e.plane_wave = r.boolean("plane_wave", false);
  r.finish();
  e.validate();
  return e;
}

// ---------------------------------------------------------------- scan

harness::Parameter parameter_from(const std::string& s, const std::string& ctx) {
  using harness::Parameter;
  for (Parameter p : {Parameter::E0, Parameter::v_el, Parameter::lambda_ph, Parameter::phi,
                      Parameter::dt_over_T})
    if (s == harness::parameter_name(p)) return p;
  throw ConfigError(ctx + ": unknown scan parameter '" + s + "'");
}

json to_json(const harness::Axis& a) {
  return {{"parameter", harness::parameter_name(a.parameter)},
          {"min", a.min},
          {"max", a.max},
          {"n_points", a.n_points},
          {"scale", a.scale == harness::Scale::Log ? "log" : "linear"}};
}

harness::Axis axis_from(const json& j, const std::string& ctx) {
  Reader r(j, ctx);
  harness::Axis a;
  a.parameter = parameter_from(r.string("parameter"), r.path("parameter"));
  a.min = r.number("min");
  a.max = r.number("max");
  a.n_points = r.integer("n_points", 101);
  const std::string scale = r.string("scale", "linear");
  if (scale == "linear")
    a.scale = harness::Scale::Linear;
  else if (scale == "log")
    a.scale = harness::Scale::Log;
  else
    throw ConfigError(r.path("scale") + ": expected 'linear' or 'log'");
  r.finish();
  return a;
}

json to_json(const harness::Observable& o) {
  using harness::ObservableKind;
  switch (o.kind) {
    case ObservableKind::PPonderomotive: return {{"kind", "P_ponderomotive"}, {"n", o.n}};
    case ObservableKind::PAbsorptive:
      return {{"kind", "P_absorptive"}, {"l", o.state.l}, {"o", o.state.o}};
    case ObservableKind::PCombined:
      return {{"kind", "P_combined"}, {"l", o.state.l}, {"o", o.state.o}};
    case ObservableKind::H1H2Gap: return {{"kind", "H1_H2_gap"}};
  }
  return {};
}

harness::Observable observable_from(const json& j, const std::string& ctx) {
  using harness::ObservableKind;
  Reader r(j, ctx);
  harness::Observable o;
  const std::string kind = r.string("kind");
  if (kind == "P_ponderomotive") {
    o.kind = ObservableKind::PPonderomotive;
    o.n = r.integer("n");
  } else if (kind == "P_absorptive" || kind == "P_combined") {
    o.kind = kind == "P_absorptive" ? ObservableKind::PAbsorptive : ObservableKind::PCombined;
    o.state = {r.integer("l"), r.integer("o")};
  } else if (kind == "H1_H2_gap") {
    o.kind = ObservableKind::H1H2Gap;
  } else {
    throw ConfigError(r.path("kind") + ": unknown observable '" + kind + "'");
  }
  r.finish();
  return o;
}

json to_json(const harness::ScanSpec& s) {
  json j;
  j["axis1"] = to_json(s.axis1);
  j["axis2"] = to_json(s.axis2);
  j["fixed"] = {{"beam", to_json(s.fixed.beam)},
                {"electron", to_json(s.fixed.electron)},
                {"dt_over_T", s.fixed.dt_over_T}};
  j["observable"] = to_json(s.observable);
  j["series"] = {{"tol", s.series.tol}, {"cap", s.series.cap}};
  return j;
}

// ---------------------------------------------------------------- tdse

const char* mode_name(tdse::HamiltonianMode m) {
  return m == tdse::HamiltonianMode::Full ? "full" : "ponderomotive_only";
}

json to_json(const tdse::Grid2D& g) {
  return {{"nx", g.nx}, {"ny", g.ny}, {"dx_m", g.dx}, {"dy_m", g.dy},
          {"x_min_m", g.x_min}, {"y_min_m", g.y_min}};
}

tdse::Grid2D grid_from(const json& j, const std::string& ctx) {
  Reader r(j, ctx);
  tdse::Grid2D g;
  g.nx = r.integer("nx");
  g.ny = r.integer("ny");
  g.dx = r.number("dx_m");
  g.dy = r.number("dy_m");
  g.x_min = r.number("x_min_m", -0.5 * g.nx * g.dx);
  g.y_min = r.number("y_min_m", -0.5 * g.ny * g.dy);
  r.finish();
  g.validate();
  return g;
}

json to_json(const TdseRunConfig& c) {
  json j;
  j["beam"] = to_json(c.beam);
  j["electron"] = to_json(c.electron);
  j["grid"] = to_json(c.grid);
  json mask = {{"type", "off"}};
  if (const auto* m = std::get_if<tdse::CosineRampMask>(&c.propagator.mask))
    mask = {{"type", "cosine_ramp"}, {"width_m", m->width}};
  j["propagator"] = {{"dt_s", c.propagator.dt},
                     {"krylov_dim", c.propagator.krylov_dim},
                     {"krylov_tol", c.propagator.krylov_tol},
                     {"mask", mask}};
  j["schedule"] = {{"t_end_s", c.schedule.t_end},
                   {"snapshot_every_s", c.schedule.snapshot_every},
                   {"free_flight_s", c.schedule.free_flight}};
  j["mode"] = mode_name(c.mode);
  j["comoving"] = c.comoving;
  j["expected_orders_x"] = c.expected_orders_x;
  j["expected_orders_y"] = c.expected_orders_y;
  j["snapshot_format"] = c.format == SnapshotFormat::Csv ? "csv" : "binary";
  j["analysis"] = {{"window_halfwidth_per_m", c.analysis.window_halfwidth},
                   {"peak_threshold", c.analysis.peak_threshold},
                   {"ewald_threshold", c.analysis.ewald.threshold}};
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string number_text(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

// ------------------------------------------------------------ public API

Setup parse_setup(std::string_view text) {
  const json j = parse_text(text);
  Reader r(j, "setup");
  Setup s;
  s.beam = beam_from(r.object("beam"), "beam");
  s.electron = electron_from(r.object("electron"), "electron");
  if (r.has("field_dump")) r.object("field_dump");  // parsed by parse_field_dump
  r.finish();
  derive_kinematics(s.beam, s.electron);
  return s;
}

std::string serialize(const Setup& s) {
  json j;
  j["beam"] = to_json(s.beam);
  j["electron"] = to_json(s.electron);
  return dump(j);
}

BeamConfig parse_beam(std::string_view text) { return beam_from(parse_text(text), "beam"); }
std::string serialize(const BeamConfig& b) { return dump(to_json(b)); }
ElectronConfig parse_electron(std::string_view text) {
  return electron_from(parse_text(text), "electron");
}
std::string serialize(const ElectronConfig& e) { return dump(to_json(e)); }

harness::ScanSpec parse_scan_spec(std::string_view text) {
  const json j = parse_text(text);
  Reader r(j, "scan");
  harness::ScanSpec s;
  s.axis1 = axis_from(r.object("axis1"), "scan.axis1");
  s.axis2 = axis_from(r.object("axis2"), "scan.axis2");
  {
    Reader f(r.object("fixed"), "scan.fixed");
    s.fixed.beam = beam_from(f.object("beam"), "scan.fixed.beam");
    s.fixed.electron = electron_from(f.object("electron"), "scan.fixed.electron");
    s.fixed.dt_over_T = f.number("dt_over_T", 0.3);
    f.finish();
  }
  s.observable = observable_from(r.object("observable"), "scan.observable");
  if (r.has("series")) {
    Reader t(r.object("series"), "scan.series");
    s.series.tol = t.number("tol", s.series.tol);
    s.series.cap = t.integer("cap", s.series.cap);
    t.finish();
  }
  r.finish();
  s.validate();
  return s;
}

std::string serialize(const harness::ScanSpec& s) { return dump(to_json(s)); }

TdseRunConfig parse_tdse_config(std::string_view text) {
  const json j = parse_text(text);
  Reader r(j, "tdse");
  TdseRunConfig c;
  c.beam = beam_from(r.object("beam"), "tdse.beam");
  c.electron = electron_from(r.object("electron"), "tdse.electron");
  c.grid = grid_from(r.object("grid"), "tdse.grid");
  {
    Reader p(r.object("propagator"), "tdse.propagator");
    if (p.has("dt_s") == p.has("dt_over_T"))
      throw ConfigError("tdse.propagator: give exactly one of dt_s, dt_over_T");
    c.propagator.dt = p.has("dt_s") ? p.number("dt_s") : p.number("dt_over_T") * c.beam.period();
    c.propagator.krylov_dim = p.integer("krylov_dim", 16);
    c.propagator.krylov_tol = p.number("krylov_tol", 1e-12);
    if (p.has("mask")) {
      Reader m(p.object("mask"), "tdse.propagator.mask");
      const std::string type = m.string("type");
      if (type == "off")
        c.propagator.mask = tdse::MaskOff{};
      else if (type == "cosine_ramp")
        c.propagator.mask = tdse::CosineRampMask{m.number("width_m")};
      else
        throw ConfigError(m.path("type") + ": expected 'off' or 'cosine_ramp'");
      m.finish();
    }
    p.finish();
  }
  {
    Reader s(r.object("schedule"), "tdse.schedule");
    c.schedule.t_end = s.number("t_end_s");
    c.schedule.snapshot_every = s.number("snapshot_every_s", 0.0);
    c.schedule.free_flight = s.number("free_flight_s", 0.0);
    s.finish();
  }
  const std::string mode = r.string("mode", "full");
  if (mode == "full")
    c.mode = tdse::HamiltonianMode::Full;
  else if (mode == "ponderomotive_only")
    c.mode = tdse::HamiltonianMode::PonderomotiveOnly;
  else
    throw ConfigError("tdse.mode: expected 'full' or 'ponderomotive_only'");
  c.comoving = r.boolean("comoving", true);
  c.expected_orders_x = r.integer("expected_orders_x", 8);
  c.expected_orders_y = r.integer("expected_orders_y", 8);
  const std::string fmt = r.string("snapshot_format", "binary");
  if (fmt == "binary")
    c.format = SnapshotFormat::Binary;
  else if (fmt == "csv")
    c.format = SnapshotFormat::Csv;
  else
    throw ConfigError("tdse.snapshot_format: expected 'binary' or 'csv'");
  if (r.has("analysis")) {
    Reader a(r.object("analysis"), "tdse.analysis");
    c.analysis.window_halfwidth = a.number("window_halfwidth_per_m", 0.0);
    c.analysis.peak_threshold = a.number("peak_threshold", 1e-4);
    c.analysis.ewald.threshold = a.number("ewald_threshold", 1e-4);
    a.finish();
  }
  r.finish();
  derive_kinematics(c.beam, c.electron);
  c.propagator.validate(c.beam);
  return c;
}

std::string serialize(const TdseRunConfig& c) { return dump(to_json(c)); }

FieldDumpSpec parse_field_dump(std::string_view text) {
  const json j = parse_text(text);
  FieldDumpSpec f;
  if (!j.is_object() || !j.contains("field_dump")) return f;
  Reader r(j.at("field_dump"), "field_dump");
  f.nx = r.integer("nx", f.nx);
  f.ny = r.integer("ny", f.ny);
  f.x_min = r.number("x_min_m", 0.0);
  f.x_max = r.number("x_max_m", 0.0);
  f.y_min = r.number("y_min_m", 0.0);
  f.y_max = r.number("y_max_m", 0.0);
  f.t = r.number("t_s", 0.0);
  r.finish();
  if (f.nx < 2 || f.ny < 2) throw ConfigError("field_dump: nx, ny must be >= 2");
  return f;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------- outputs

std::string scan_json(const harness::ScanResult& r) {
  json j;
  j["spec"] = to_json(r.spec);
  j["axis1_values"] = json::array();
  for (int i = 0; i < r.spec.axis1.n_points; ++i) j["axis1_values"].push_back(r.spec.axis1.value(i));
  j["axis2_values"] = json::array();
  for (int i = 0; i < r.spec.axis2.n_points; ++i) j["axis2_values"].push_back(r.spec.axis2.value(i));
  j["observable"] = harness::observable_name(r.spec.observable);
  j["values"] = r.values;
  j["flags"] = std::vector<int>(r.flags.begin(), r.flags.end());
  j["metadata"] = {{"engine_version", r.metadata.engine_version},
                   {"max_truncation", r.metadata.max_truncation},
                   {"flagged_cells", r.metadata.flagged_cells},
                   {"workers", r.metadata.workers},
                   {"wall_seconds", r.metadata.wall_seconds},
                   {"interaction_convention", "dt fixed in optical periods, x = v_el * dt"}};
  return dump(j);
}

std::string population_csv(const analytic::PopulationTable& t) {
  std::string out = "l,o,probability,truncation,residual\n";
  for (const auto& [s, p] : t.entries)
    out += std::to_string(s.l) + "," + std::to_string(s.o) + "," + number_text(p) + "," +
           std::to_string(t.truncation) + "," + number_text(t.residual) + "\n";
  return out;
}

std::string spectrum_csv(const diagnostics::TransverseSpectrum& s) {
  std::string out = "k_y,P\n";
  for (std::size_t i = 0; i < s.ky.size(); ++i)
    out += number_text(s.ky[i]) + "," + number_text(s.p[i]) + "\n";
  return out;
}

std::string orders_csv(const diagnostics::OrderBins& b, double min_probability) {
  std::string out = "l,o,P\n";
  for (const auto& [s, p] : b.table.entries)
    if (p >= min_probability)
      out += std::to_string(s.l) + "," + std::to_string(s.o) + "," + number_text(p) + "\n";
  return out;
}

std::string ewald_json(const std::optional<diagnostics::EwaldFit>& fit) {
  json j;
  if (!fit) {
    j["radius"] = nullptr;
    j["residual"] = nullptr;
    j["status"] = "insufficient peaks";
  } else {
    j["radius"] = fit->radius;
    j["residual"] = fit->rms_deviation;
    j["center_kx"] = fit->center_kx;
    j["center_fixed"] = fit->center_fixed;
    j["n_peaks"] = fit->peaks.size();
    j["status"] = "ok";
  }
  return dump(j);
}

std::string peaks_csv(const std::vector<diagnostics::Peak>& peaks) {
  std::string out = "k_y,height\n";
  for (const auto& p : peaks) out += number_text(p.k) + "," + number_text(p.height) + "\n";
  return out;
}

std::string field_dump_csv(const BeamConfig& beam, const FieldDumpSpec& spec) {
  beam.validate();
  FieldDumpSpec f = spec;
  const double L = 2.0 * beam.lambda_ph;
  if (f.x_min == f.x_max) f.x_min = -L, f.x_max = L;
  if (f.y_min == f.y_max) f.y_min = -L, f.y_max = L;
  std::string out = "x,y,Ax,Ay,Ex,Ey\n";
  for (int i = 0; i < f.nx; ++i) {
    const double x = f.x_min + (f.x_max - f.x_min) * i / (f.nx - 1);
    for (int j = 0; j < f.ny; ++j) {
      const double y = f.y_min + (f.y_max - f.y_min) * j / (f.ny - 1);
      const auto s = fields::eval_field(beam, x, y, f.t);
      out += number_text(x) + "," + number_text(y) + "," + number_text(s.A.x) + "," +
             number_text(s.A.y) + "," + number_text(s.E.x) + "," + number_text(s.E.y) + "\n";
    }
  }
  return out;
}

namespace {

void write_binary(const fs::path& path, const std::vector<cdouble>& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(cdouble)));
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<cdouble> read_binary(const fs::path& path, std::size_t n) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<cdouble> data(n);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(n * sizeof(cdouble)));
  if (in.gcount() != static_cast<std::streamsize>(n * sizeof(cdouble)))
    throw IoError("truncated snapshot " + path.string());
  return data;
}

std::vector<cdouble> read_csv_amplitudes(const fs::path& path, std::size_t n) {
  std::istringstream in(read_text(path));
  std::string line;
  std::getline(in, line);  // header
  std::vector<cdouble> data;
  data.reserve(n);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double v[4];
    const char* p = line.data();
    const char* end = p + line.size();
    for (int k = 0; k < 4; ++k) {
      auto [q, ec] = std::from_chars(p, end, v[k]);
      if (ec != std::errc()) throw IoError("malformed snapshot row in " + path.string());
      p = (q < end && *q == ',') ? q + 1 : q;
    }
    data.emplace_back(v[2], v[3]);
  }
  if (data.size() != n) throw IoError("snapshot size mismatch in " + path.string());
  return data;
}

}  // namespace

void write_snapshot(const fs::path& dir, const tdse::Snapshot& snap, const BeamConfig& beam,
                    const ElectronConfig& electron, SnapshotFormat format) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const auto& psi = snap.psi;
  const auto mom = tdse::to_momentum(psi);
  const std::string stem = "snap_" + std::to_string(snap.index);
  const std::string ext = format == SnapshotFormat::Binary ? ".bin" : ".csv";
  const std::string real_name = stem + "_real" + ext, mom_name = stem + "_momentum" + ext;

  if (format == SnapshotFormat::Binary) {
    write_binary(dir / real_name, psi.amplitudes);
    write_binary(dir / mom_name, mom.amplitudes);
  } else {
    std::string r = "x,y,re,im\n";
    for (int i = 0; i < psi.grid.nx; ++i)
      for (int j = 0; j < psi.grid.ny; ++j) {
        const auto z = psi.at(i, j);
        r += number_text(psi.physical_x(i)) + "," + number_text(psi.grid.y(j)) + "," +
             number_text(z.real()) + "," + number_text(z.imag()) + "\n";
      }
    write_text(dir / real_name, r);
    std::string m = "kx,ky,re,im\n";
    for (std::size_t i = 0; i < mom.kx.size(); ++i)
      for (std::size_t j = 0; j < mom.ky.size(); ++j) {
        const auto z = mom.amplitudes[i * mom.ky.size() + j];
        m += number_text(mom.kx[i]) + "," + number_text(mom.ky[j]) + "," +
             number_text(z.real()) + "," + number_text(z.imag()) + "\n";
      }
    write_text(dir / mom_name, m);
  }

  json j;
  j["index"] = snap.index;
  j["time_s"] = psi.time;
  j["norm"] = psi.norm();
  j["absorbed"] = psi.absorbed;
  j["carrier_kx_per_m"] = psi.carrier_kx;
  j["after_free_flight"] = snap.after_free_flight;
  j["grid"] = to_json(psi.grid);
  j["format"] = format == SnapshotFormat::Binary ? "binary_complex128_native" : "csv";
  j["files"] = {{"real", real_name}, {"momentum", mom_name}};
  j["momentum_axes"] = {{"kx_min_per_m", mom.kx.front()},
                        {"dkx_per_m", mom.dkx},
                        {"ky_min_per_m", mom.ky.front()},
                        {"dky_per_m", mom.dky}};
  j["note"] =
      "real-space samples hold the envelope in the co-moving frame; physical "
      "psi = exp(i K x - i hbar K^2 t / 2 m0) * sample at x = grid x + (hbar K / m0) t";
  j["beam"] = to_json(beam);
  j["electron"] = to_json(electron);
  j["gaussian_convention"] = "w0/w(z) exp(-rho^2/w(z)^2), Gouy phase atan(z/zR)";
  write_text(dir / (stem + ".json"), dump(j));
}

std::vector<LoadedSnapshot> read_snapshots(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  static const std::regex name_re(R"(snap_(\d+)\.json)");
  std::vector<LoadedSnapshot> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (!std::regex_match(name, name_re)) continue;
    const json j = parse_text(read_text(entry.path()));
    try {
      LoadedSnapshot s;
      s.index = j.at("index").get<int>();
      s.after_free_flight = j.at("after_free_flight").get<bool>();
      s.beam = beam_from(j.at("beam"), "snapshot.beam");
      s.electron = electron_from(j.at("electron"), "snapshot.electron");
      s.psi.grid = grid_from(j.at("grid"), "snapshot.grid");
      s.psi.time = j.at("time_s").get<double>();
      s.psi.absorbed = j.at("absorbed").get<double>();
      s.psi.carrier_kx = j.at("carrier_kx_per_m").get<double>();
      const auto real_path = dir / j.at("files").at("real").get<std::string>();
      const std::string fmt = j.at("format").get<std::string>();
      s.psi.amplitudes = fmt == "csv" ? read_csv_amplitudes(real_path, s.psi.grid.size())
                                      : read_binary(real_path, s.psi.grid.size());
      out.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw IoError("malformed snapshot sidecar " + entry.path().string() + ": " + e.what());
    }
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.index < b.index; });
  return out;
}

}  // namespace kapdirac::io
