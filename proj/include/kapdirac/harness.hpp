#ifndef KAPDIRAC_HARNESS_HPP_
#define KAPDIRAC_HARNESS_HPP_

#include <string>
#include <vector>

#include "kapdirac/analytic.hpp"
#include "kapdirac/model.hpp"

namespace kapdirac::harness {

enum class Parameter { E0, v_el, lambda_ph, phi, dt_over_T };
enum class Scale { Linear, Log };

struct Axis {
  Parameter parameter = Parameter::E0;
  double min = 0.0;  // SI; phi in degrees, dt_over_T dimensionless
  double max = 0.0;
  int n_points = 101;
  Scale scale = Scale::Linear;

  double value(int i) const;
};

enum class ObservableKind { PPonderomotive, PAbsorptive, PCombined, H1H2Gap };

struct Observable {
  ObservableKind kind = ObservableKind::PCombined;
  int n = 0;  // ponderomotive order
  analytic::OrderState state;
};

/// Non-swept parameters. dt_over_T fixes the interaction window in optical
/// periods; the ponderomotive length is x = v_el * delta_t.
struct FixedParameters {
  BeamConfig beam;
  ElectronConfig electron;
  double dt_over_T = 0.3;
};

struct ScanSpec {
  Axis axis1;
  Axis axis2;
  FixedParameters fixed;
  Observable observable;
  analytic::SeriesOptions series;

  void validate() const;
};

struct ScanMetadata {
  std::string engine_version;
  int max_truncation = 0;
  int flagged_cells = 0;
  int workers = 1;
  double wall_seconds = 0.0;
};

struct ScanResult {
  ScanSpec spec;
  std::vector<double> values;  // axis1-major: index i1 * n2 + i2
  std::vector<int> truncation;
  std::vector<unsigned char> flags;  // 1 = convergence failure, value is best effort / NaN
  ScanMetadata metadata;

  double at(int i1, int i2) const {
    return values[static_cast<std::size_t>(i1) * spec.axis2.n_points + i2];
  }
};

/// Worker count: `requested` if > 0, else KAPDIRAC_THREADS, else hardware
/// concurrency. The environment variable overrides a positive request too.
int resolve_workers(int requested);

/// Every cell is independent; results land in a preallocated grid so the
/// output does not depend on the schedule.
ScanResult run_scan(const ScanSpec& spec, int workers = 0);

/// |e^2 A0^2 / 2 m0 - e A0 hbar k_el / m0|, J.
double h1_h2_gap(const BeamConfig& beam, const ElectronConfig& electron);

const char* parameter_name(Parameter p);
std::string observable_name(const Observable& o);

/// `<axis1>,<axis2>,<observable>,flag` followed by one row per cell, numbers
/// in shortest round-trip form.
std::string scan_csv(const ScanResult& result);

const char* engine_version();

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Quick invariant suite used by the `check` subcommand.
std::vector<CheckResult> self_check();

}  // namespace kapdirac::harness

#endif  // KAPDIRAC_HARNESS_HPP_
