#ifndef KAPDIRAC_CONFIG_IO_HPP_
#define KAPDIRAC_CONFIG_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "kapdirac/diagnostics.hpp"
#include "kapdirac/harness.hpp"
#include "kapdirac/model.hpp"
#include "kapdirac/tdse.hpp"

// JSON configuration and output formats. Keys carry their SI unit
// (E0_V_per_m, lambda_ph_m, phi_deg, ...). Unknown keys are rejected.
namespace kapdirac::io {

struct Setup {
  BeamConfig beam;
  ElectronConfig electron;
};

struct FieldDumpSpec {
  int nx = 101;
  int ny = 101;
  double x_min = 0.0, x_max = 0.0;  // equal bounds pick +-2 lambda around 0
  double y_min = 0.0, y_max = 0.0;
  double t = 0.0;
};

enum class SnapshotFormat { Binary, Csv };

struct TdseRunConfig {
  BeamConfig beam;
  ElectronConfig electron;
  tdse::Grid2D grid;
  tdse::PropagatorConfig propagator;
  tdse::RunSchedule schedule;
  tdse::HamiltonianMode mode = tdse::HamiltonianMode::Full;
  bool comoving = true;
  int expected_orders_x = 8;
  int expected_orders_y = 8;
  SnapshotFormat format = SnapshotFormat::Binary;
  diagnostics::AnalyzeOptions analysis;
};

Setup parse_setup(std::string_view json_text);
std::string serialize(const Setup& setup);
BeamConfig parse_beam(std::string_view json_text);
std::string serialize(const BeamConfig& beam);
ElectronConfig parse_electron(std::string_view json_text);
std::string serialize(const ElectronConfig& electron);

harness::ScanSpec parse_scan_spec(std::string_view json_text);
std::string serialize(const harness::ScanSpec& spec);

TdseRunConfig parse_tdse_config(std::string_view json_text);
std::string serialize(const TdseRunConfig& config);

/// Optional "field_dump" block of a setup file.
FieldDumpSpec parse_field_dump(std::string_view json_text);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

// ----------------------------------------------------------------- outputs

std::string scan_json(const harness::ScanResult& result);
std::string population_csv(const analytic::PopulationTable& table);
std::string spectrum_csv(const diagnostics::TransverseSpectrum& spectrum);
/// Orders with population >= min_probability; 0 lists every bin.
std::string orders_csv(const diagnostics::OrderBins& bins, double min_probability = 0.0);
std::string ewald_json(const std::optional<diagnostics::EwaldFit>& fit);
std::string peaks_csv(const std::vector<diagnostics::Peak>& peaks);

/// x, y, Ax, Ay, Ex, Ey on the requested grid.
std::string field_dump_csv(const BeamConfig& beam, const FieldDumpSpec& spec);

/// Writes snap_{index}_real.{bin|csv}, snap_{index}_momentum.{bin|csv} and
/// the sidecar snap_{index}.json.
void write_snapshot(const std::filesystem::path& dir, const tdse::Snapshot& snap,
                    const BeamConfig& beam, const ElectronConfig& electron,
                    SnapshotFormat format);

struct LoadedSnapshot {
  int index = 0;
  bool after_free_flight = false;
  tdse::Wavefunction2D psi;
  BeamConfig beam;
  ElectronConfig electron;
};

/// Real-space snapshots found in dir, sorted by index.
std::vector<LoadedSnapshot> read_snapshots(const std::filesystem::path& dir);

}  // namespace kapdirac::io

#endif  // KAPDIRAC_CONFIG_IO_HPP_
