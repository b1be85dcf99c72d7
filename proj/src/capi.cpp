#include "kapdirac/kapdirac.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "kapdirac/analytic.hpp"
#include "kapdirac/config_io.hpp"
#include "kapdirac/diagnostics.hpp"
#include "kapdirac/errors.hpp"
#include "kapdirac/harness.hpp"
#include "kapdirac/tdse.hpp"

struct kd_setup {
  kapdirac::io::Setup value;
};

struct kd_scan {
  kapdirac::harness::ScanResult value;
};

namespace {

// Populations below this are not listed in orders.csv (orders_all.csv has all).
constexpr double kSignificantOrder = 1e-4;

namespace fs = std::filesystem;
using namespace kapdirac;

thread_local std::string g_last_error;

kd_status status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config: return KD_ERR_CONFIG;
    case ErrorKind::Precondition: return KD_ERR_PRECONDITION;
    case ErrorKind::Convergence: return KD_ERR_CONVERGENCE;
    case ErrorKind::Io: return KD_ERR_IO;
  }
  return KD_ERR_INTERNAL;
}

template <class F>
kd_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return KD_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return KD_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return KD_ERR_INTERNAL;
  }
}

kd_status argument_error(const char* what) {
  g_last_error = what;
  return KD_ERR_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

analytic::CouplingParams from_c(const kd_couplings& c) {
  return {c.alpha_c, c.alpha_s, c.beta, c.global_phase_rate};
}

analytic::SeriesOptions series(double tol) {
  analytic::SeriesOptions o;
  if (tol > 0.0) o.tol = tol;
  return o;
}

fs::path prepare_dir(const char* dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create " + p.string() + ": " + ec.message());
  return p;
}

void write_analysis(const fs::path& out, const diagnostics::DiffractionSpectrum& d,
                    bool json_mirror) {
  io::write_text(out / "spectrum.csv", io::spectrum_csv(d.p_ky));
  io::write_text(out / "orders.csv", io::orders_csv(d.orders, kSignificantOrder));
  io::write_text(out / "orders_all.csv", io::orders_csv(d.orders));
  io::write_text(out / "peaks.csv", io::peaks_csv(d.peaks));
  io::write_text(out / "ewald.json", io::ewald_json(d.ewald));
  if (json_mirror) {
    nlohmann::ordered_json j;
    j["k_y"] = d.p_ky.ky;
    j["P"] = d.p_ky.p;
    nlohmann::ordered_json orders = nlohmann::ordered_json::array();
    for (const auto& [s, p] : d.orders.table.entries)
      orders.push_back({{"l", s.l}, {"o", s.o}, {"P", p}});
    j["orders"] = orders;
    j["residual"] = d.orders.table.residual;
    io::write_text(out / "spectrum.json", j.dump(2) + "\n");
  }
}

}  // namespace

extern "C" {

const char* kd_version(void) { return harness::engine_version(); }
const char* kd_last_error(void) { return g_last_error.c_str(); }
void kd_string_free(char* s) { std::free(s); }

kd_status kd_setup_from_json(const char* json_text, kd_setup** out) {
  if (!json_text || !out) return argument_error("null argument");
  return guarded([&] { *out = new kd_setup{io::parse_setup(json_text)}; });
}

kd_status kd_setup_from_file(const char* path, kd_setup** out) {
  if (!path || !out) return argument_error("null argument");
  return guarded([&] { *out = new kd_setup{io::parse_setup(io::read_text(path))}; });
}

kd_status kd_setup_to_json(const kd_setup* setup, char** out_json) {
  if (!setup || !out_json) return argument_error("null argument");
  return guarded([&] { *out_json = dup_string(io::serialize(setup->value)); });
}

void kd_setup_free(kd_setup* setup) { delete setup; }

kd_status kd_derive_kinematics(const kd_setup* setup, kd_kinematics* out) {
  if (!setup || !out) return argument_error("null argument");
  return guarded([&] {
    const auto d = derive_kinematics(setup->value.beam, setup->value.electron);
    *out = {d.omega, d.k_ph, d.A0, d.T, d.k_el, d.Omega};
  });
}

kd_status kd_coupling_params(const kd_setup* setup, double dt_over_T, double x_m,
                             kd_couplings* out) {
  if (!setup || !out) return argument_error("null argument");
  return guarded([&] {
    const auto& s = setup->value;
    const auto w = InteractionWindow::from_periods(dt_over_T, s.beam);
    const auto cp = x_m < 0.0 ? analytic::coupling_params_at_exit(s.beam, s.electron, w)
                              : analytic::coupling_params(s.beam, s.electron, w, x_m);
    *out = {cp.alpha_c, cp.alpha_s, cp.beta, cp.global_phase_rate};
  });
}

kd_status kd_p_ponderomotive(const kd_setup* setup, int n, double x_m, double* out) {
  if (!setup || !out) return argument_error("null argument");
  return guarded([&] {
    *out = analytic::p_ponderomotive(n, setup->value.beam, setup->value.electron, x_m);
  });
}

kd_status kd_p_absorptive(const kd_couplings* cp, int l, int o, double tol,
                          double* probability, int* truncation) {
  if (!cp || !probability) return argument_error("null argument");
  return guarded([&] {
    const auto r = analytic::p_absorptive({l, o}, from_c(*cp), series(tol));
    *probability = r.probability;
    if (truncation) *truncation = r.truncation;
  });
}

kd_status kd_p_combined(const kd_couplings* cp, int l, int o, double tol, double* probability,
                        int* truncation) {
  if (!cp || !probability) return argument_error("null argument");
  return guarded([&] {
    const auto r = analytic::p_combined({l, o}, from_c(*cp), series(tol));
    *probability = r.probability;
    if (truncation) *truncation = r.truncation;
  });
}

kd_status kd_population_csv(const kd_couplings* cp, int channel, int max_order, double tol,
                            char** out_csv) {
  if (!cp || !out_csv) return argument_error("null argument");
  if (channel < 0 || channel > 2) return argument_error("channel must be 0, 1 or 2");
  return guarded([&] {
    const auto t = analytic::population_table(static_cast<analytic::Channel>(channel),
                                              from_c(*cp), max_order, series(tol));
    *out_csv = dup_string(io::population_csv(t));
  });
}

kd_status kd_interference_criterion(double v_el, double* A0_cross) {
  if (!A0_cross) return argument_error("null argument");
  return guarded([&] {
    ElectronConfig e;
    e.v_el = v_el;
    *A0_cross = analytic::interference_criterion(e);
  });
}

kd_status kd_h1_h2_gap(const kd_setup* setup, double* gap_joule) {
  if (!setup || !gap_joule) return argument_error("null argument");
  return guarded([&] { *gap_joule = harness::h1_h2_gap(setup->value.beam, setup->value.electron); });
}

kd_status kd_scan_run_json(const char* spec_json, int workers, kd_scan** out) {
  if (!spec_json || !out) return argument_error("null argument");
  return guarded([&] {
    *out = new kd_scan{harness::run_scan(io::parse_scan_spec(spec_json), workers)};
  });
}

kd_status kd_scan_run_file(const char* spec_path, int workers, kd_scan** out) {
  if (!spec_path || !out) return argument_error("null argument");
  return guarded([&] {
    *out = new kd_scan{harness::run_scan(io::parse_scan_spec(io::read_text(spec_path)), workers)};
  });
}

kd_status kd_scan_shape(const kd_scan* scan, int* n1, int* n2) {
  if (!scan || !n1 || !n2) return argument_error("null argument");
  *n1 = scan->value.spec.axis1.n_points;
  *n2 = scan->value.spec.axis2.n_points;
  g_last_error.clear();
  return KD_OK;
}

kd_status kd_scan_value(const kd_scan* scan, int i1, int i2, double* value, int* flag) {
  if (!scan || !value) return argument_error("null argument");
  const auto& s = scan->value.spec;
  if (i1 < 0 || i2 < 0 || i1 >= s.axis1.n_points || i2 >= s.axis2.n_points)
    return argument_error("scan index out of range");
  *value = scan->value.at(i1, i2);
  if (flag) *flag = scan->value.flags[static_cast<std::size_t>(i1) * s.axis2.n_points + i2];
  g_last_error.clear();
  return KD_OK;
}

kd_status kd_scan_csv(const kd_scan* scan, char** out_csv) {
  if (!scan || !out_csv) return argument_error("null argument");
  return guarded([&] { *out_csv = dup_string(harness::scan_csv(scan->value)); });
}

kd_status kd_scan_write(const kd_scan* scan, const char* out_dir, int json_mirror) {
  if (!scan || !out_dir) return argument_error("null argument");
  return guarded([&] {
    const auto dir = prepare_dir(out_dir);
    io::write_text(dir / "scan.csv", harness::scan_csv(scan->value));
    // Metadata always goes to JSON; the full mirror adds the value grid.
    io::write_text(dir / (json_mirror ? "scan.json" : "scan_meta.json"), io::scan_json(scan->value));
  });
}

void kd_scan_free(kd_scan* scan) { delete scan; }

kd_status kd_tdse_run_file(const char* config_path, const char* out_dir, int json_mirror) {
  if (!config_path || !out_dir) return argument_error("null argument");
  return guarded([&] {
    const auto cfg = io::parse_tdse_config(io::read_text(config_path));
    const auto dir = prepare_dir(out_dir);
    tdse::RunOptions opt;
    opt.mode = cfg.mode;
    opt.comoving = cfg.comoving;
    opt.expected_orders_x = cfg.expected_orders_x;
    opt.expected_orders_y = cfg.expected_orders_y;
    opt.keep_snapshots = false;
    tdse::Wavefunction2D last;
    std::string timeline = "index,time_s,l,o,P\n";
    opt.on_snapshot = [&](const tdse::Snapshot& s) {
      io::write_snapshot(dir / "snapshots", s, cfg.beam, cfg.electron, cfg.format);
      const double r = cfg.analysis.window_halfwidth > 0.0 ? cfg.analysis.window_halfwidth
                                                           : diagnostics::default_window(cfg.beam);
      const auto bins =
          diagnostics::bin_orders(tdse::to_momentum(s.psi), cfg.beam, cfg.electron, r);
      for (const auto& [st, p] : bins.table.entries) {
        if (p < 1e-12) continue;
        timeline += std::to_string(s.index) + "," + std::to_string(s.psi.time) + "," +
                    std::to_string(st.l) + "," + std::to_string(st.o) + "," +
                    std::to_string(p) + "\n";
      }
      last = s.psi;
    };
    tdse::run(cfg.electron, cfg.beam, cfg.grid, cfg.propagator, cfg.schedule, opt);
    io::write_text(dir / "orders_timeline.csv", timeline);
    write_analysis(dir, diagnostics::analyze(last, cfg.beam, cfg.electron, cfg.analysis),
                   json_mirror != 0);
    io::write_text(dir / "run_config.json", io::serialize(cfg));
  });
}

kd_status kd_analyze_dir(const char* snap_dir, const char* out_dir, int json_mirror) {
  if (!snap_dir || !out_dir) return argument_error("null argument");
  return guarded([&] {
    fs::path src(snap_dir);
    if (fs::is_directory(src / "snapshots")) src /= "snapshots";
    const auto snaps = io::read_snapshots(src);
    if (snaps.empty()) throw IoError("no snapshots found in " + src.string());
    // A run directory carries its analysis settings; bare snapshots use defaults.
    diagnostics::AnalyzeOptions options;
    for (const auto& cfg : {src / "run_config.json", src.parent_path() / "run_config.json"})
      if (fs::exists(cfg)) {
        options = io::parse_tdse_config(io::read_text(cfg)).analysis;
        break;
      }
    const auto dir = prepare_dir(out_dir);
    const auto& s = snaps.back();
    write_analysis(dir, diagnostics::analyze(s.psi, s.beam, s.electron, options), json_mirror != 0);
  });
}

kd_status kd_fields_dump_file(const char* setup_path, const char* out_dir, int json_mirror) {
  if (!setup_path || !out_dir) return argument_error("null argument");
  return guarded([&] {
    const std::string text = io::read_text(setup_path);
    const auto setup = io::parse_setup(text);
    const auto spec = io::parse_field_dump(text);
    const auto dir = prepare_dir(out_dir);
    io::write_text(dir / "fields.csv", io::field_dump_csv(setup.beam, spec));
    if (json_mirror) io::write_text(dir / "fields_setup.json", io::serialize(setup));
  });
}

kd_status kd_check(int* failed, char** report) {
  if (!failed) return argument_error("null argument");
  return guarded([&] {
    const auto results = harness::self_check();
    std::string text;
    int bad = 0;
    for (const auto& r : results) {
      bad += r.passed ? 0 : 1;
      text += std::string(r.passed ? "PASS " : "FAIL ") + r.name;
      if (!r.detail.empty()) text += " (" + r.detail + ")";
      text += "\n";
    }
    *failed = bad;
    if (report) *report = dup_string(text);
  });
}

}  // extern "C"
