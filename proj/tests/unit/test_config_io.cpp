#include <doctest.h>

#include <filesystem>
#include <random>

#include "kapdirac/config_io.hpp"
#include "kapdirac/errors.hpp"

using namespace kapdirac;
namespace fs = std::filesystem;

namespace {

std::string data(const char* name) { return io::read_text(fs::path(KAPDIRAC_TEST_DATA) / name); }

fs::path fresh_dir(const char* tag) {
  auto d = fs::temp_directory_path() / (std::string("kapdirac_test_") + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_SUITE("config_io") {
  TEST_CASE("setup round trip is idempotent") {
    const auto s = io::parse_setup(data("setup.json"));
    CHECK(s.beam.E0 == 200e9);
    CHECK(s.beam.phi.degrees() == doctest::Approx(50.0));
    CHECK(s.electron.plane_wave);
    const auto once = io::serialize(s);
    const auto back = io::parse_setup(once);
    CHECK(io::serialize(back) == once);
    CHECK(back.beam.lambda_ph == s.beam.lambda_ph);
    CHECK(back.electron.v_el == s.electron.v_el);
  }

  TEST_CASE("Gaussian envelope survives a round trip") {
    BeamConfig b;
    b.E0 = 1e9;
    b.lambda_ph = 800e-9;
    b.phi = Angle::from_degrees(30.0);
    b.envelope = GaussianParaxialEnvelope{2e-6, {1e-7, -2e-7}};
    b.carrier_phase = 0.25;
    const auto text = io::serialize(b);
    const auto back = io::parse_beam(text);
    REQUIRE(!back.is_plane_wave());
    const auto& g = std::get<GaussianParaxialEnvelope>(back.envelope);
    CHECK(g.waist == 2e-6);
    CHECK(g.focus_center.y == -2e-7);
    CHECK(back.carrier_phase == 0.25);
    CHECK(io::serialize(back) == text);
  }

  TEST_CASE("scan spec round trip") {
    const auto s = io::parse_scan_spec(data("scan_interference.json"));
    CHECK(s.axis1.parameter == harness::Parameter::E0);
    CHECK(s.axis2.n_points == 101);
    CHECK(s.observable.kind == harness::ObservableKind::PCombined);
    CHECK(s.observable.state.o == -1);
    const auto text = io::serialize(s);
    CHECK(io::serialize(io::parse_scan_spec(text)) == text);
  }

  TEST_CASE("tdse config round trip") {
    const auto c = io::parse_tdse_config(data("tdse_kd_comb.json"));
    CHECK(c.grid.nx == 64);
    CHECK(c.grid.x_min == doctest::Approx(-128e-9));
    CHECK(c.mode == tdse::HamiltonianMode::PonderomotiveOnly);
    CHECK(c.propagator.dt == doctest::Approx(0.0249 * c.beam.period()));
    const auto text = io::serialize(c);
    CHECK(io::serialize(io::parse_tdse_config(text)) == text);
  }

  TEST_CASE("malformed input is a config error") {
    CHECK_THROWS_AS(io::parse_setup("{"), ConfigError);
    CHECK_THROWS_AS(io::parse_setup("[]"), ConfigError);
    CHECK_THROWS_AS(io::parse_beam(R"({"E0_V_per_m": 1, "lambda_ph_m": 1e-6, "phi_deg": 10, "colour": 3})"),
                    ConfigError);
    CHECK_THROWS_AS(io::parse_beam(R"({"E0_V_per_m": 1, "phi_deg": 10})"), ConfigError);
    CHECK_THROWS_AS(io::parse_beam(R"({"E0_V_per_m": "big", "lambda_ph_m": 1e-6, "phi_deg": 10})"),
                    ConfigError);
    CHECK_THROWS_AS(io::parse_beam(R"({"E0_V_per_m": 1, "lambda_ph_m": 1e-6, "phi_deg": 10,
                                       "envelope": {"type": "bessel"}})"),
                    ConfigError);
    auto scan = data("scan_interference.json");
    scan.replace(scan.find("P_combined"), 10, "P_nothing!");
    CHECK_THROWS_AS(io::parse_scan_spec(scan), ConfigError);
  }

  TEST_CASE("physically invalid input is a precondition error") {
    CHECK_THROWS_AS(io::parse_electron(R"({"v_el_m_per_s": 4e8})"), PreconditionError);
    CHECK_THROWS_AS(io::parse_beam(R"({"E0_V_per_m": -1, "lambda_ph_m": 1e-6, "phi_deg": 10})"),
                    PreconditionError);
  }

  TEST_CASE("missing file is an I/O error") {
    CHECK_THROWS_AS(io::read_text("/nonexistent/kapdirac.json"), IoError);
    CHECK_THROWS_AS(io::read_snapshots("/nonexistent/dir"), IoError);
  }

  TEST_CASE("snapshots round trip in both formats") {
    const auto c = io::parse_tdse_config(data("tdse_free.json"));
    tdse::Snapshot snap;
    snap.index = 3;
    snap.psi = tdse::init_gaussian(c.electron, c.grid, c.electron.k_el());
    snap.psi.time = 1.25e-16;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1e-3, 1e-3);
    for (auto& a : snap.psi.amplitudes) a += cdouble(u(rng), u(rng));
    for (auto fmt : {io::SnapshotFormat::Binary, io::SnapshotFormat::Csv}) {
      const auto dir = fresh_dir(fmt == io::SnapshotFormat::Csv ? "csv" : "bin");
      io::write_snapshot(dir, snap, c.beam, c.electron, fmt);
      CHECK(fs::exists(dir / "snap_3.json"));
      const auto loaded = io::read_snapshots(dir);
      REQUIRE(loaded.size() == 1);
      const auto& p = loaded[0].psi;
      CHECK(loaded[0].index == 3);
      CHECK(p.grid == snap.psi.grid);
      CHECK(p.time == snap.psi.time);
      CHECK(p.carrier_kx == snap.psi.carrier_kx);
      CHECK(loaded[0].beam.lambda_ph == c.beam.lambda_ph);
      double diff = 0;
      for (std::size_t q = 0; q < p.amplitudes.size(); ++q)
        diff = std::max(diff, std::abs(p.amplitudes[q] - snap.psi.amplitudes[q]));
      CHECK(diff == 0.0);
      fs::remove_all(dir);
    }
  }

  TEST_CASE("output writers") {
    analytic::PopulationTable t;
    t.entries[{0, 0}] = 0.5;
    t.entries[{1, -1}] = 0.25;
    t.residual = 0.25;
    const auto csv = io::population_csv(t);
    CHECK(csv.rfind("l,o,probability,truncation,residual\n", 0) == 0);
    CHECK(csv.find("1,-1,0.25,") != std::string::npos);
    CHECK(io::ewald_json(std::nullopt).find("\"status\"") != std::string::npos);
    const auto fd = io::field_dump_csv(io::parse_setup(data("setup.json")).beam,
                                       io::parse_field_dump(data("setup.json")));
    CHECK(fd.rfind("x,y,Ax,Ay,Ex,Ey\n", 0) == 0);
    CHECK(std::count(fd.begin(), fd.end(), '\n') == 1 + 41 * 41);
  }
}
