// Command-line front end. Talks to the library only through kapdirac.h.
#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "kapdirac/kapdirac.h"

namespace {

enum Exit : int {
  kOk = 0,
  kUsage = 2,
  kConfig = 3,
  kPrecondition = 4,
  kConvergence = 5,
  kIo = 6,
  kArgument = 7,
  kInternal = 8,
  kCheckFailed = 9,
};

int report(kd_status s) {
  if (s == KD_OK) return kOk;
  const char* cls = "internal";
  int code = kInternal;
  switch (s) {
    case KD_ERR_CONFIG: cls = "config"; code = kConfig; break;
    case KD_ERR_PRECONDITION: cls = "precondition"; code = kPrecondition; break;
    case KD_ERR_CONVERGENCE: cls = "convergence"; code = kConvergence; break;
    case KD_ERR_IO: cls = "io"; code = kIo; break;
    case KD_ERR_ARGUMENT: cls = "argument"; code = kArgument; break;
    default: break;
  }
  std::fprintf(stderr, "error[%s]: %s\n", cls, kd_last_error());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kapitza-Dirac diffraction toolkit"};
  app.set_version_flag("--version", std::string(kd_version()));
  app.require_subcommand(1);

  std::string config, out = ".";
  int workers = 0;
  bool json = false;
  auto common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config, "input file");
    if (needs_config) opt->required();
    sub->add_option("--out", out, "output directory");
    sub->add_option("--workers", workers, "worker threads (KAPDIRAC_THREADS overrides)");
    sub->add_flag("--json", json, "mirror outputs as JSON");
  };

  auto* scan = app.add_subcommand("scan", "analytic parameter map from a scan spec");
  common(scan, true);
  auto* tdse = app.add_subcommand("tdse", "wavepacket propagation from a run config");
  common(tdse, true);
  std::string snapshots;
  auto* analyze = app.add_subcommand("analyze", "diagnostics for a snapshot directory");
  analyze->add_option("snapshots", snapshots, "snapshot directory")->required();
  common(analyze, false);
  auto* fields = app.add_subcommand("fields", "dump A and E on a grid");
  common(fields, true);
  auto* check = app.add_subcommand("check", "run the invariant suite");
  common(check, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error[usage]: %s\n\n%s", e.what(), app.help().c_str());
    return kUsage;
  }

  if (*scan) {
    kd_scan* result = nullptr;
    if (int rc = report(kd_scan_run_file(config.c_str(), workers, &result))) return rc;
    const int rc = report(kd_scan_write(result, out.c_str(), json ? 1 : 0));
    kd_scan_free(result);
    return rc;
  }
  if (*tdse) return report(kd_tdse_run_file(config.c_str(), out.c_str(), json ? 1 : 0));
  if (*analyze) return report(kd_analyze_dir(snapshots.c_str(), out.c_str(), json ? 1 : 0));
  if (*fields) return report(kd_fields_dump_file(config.c_str(), out.c_str(), json ? 1 : 0));
  if (*check) {
    int failed = 0;
    char* text = nullptr;
    if (int rc = report(kd_check(&failed, &text))) return rc;
    std::fputs(text, stdout);
    kd_string_free(text);
    return failed == 0 ? kOk : kCheckFailed;
  }
  return kUsage;
}
