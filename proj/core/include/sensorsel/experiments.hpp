#ifndef SENSORSEL_EXPERIMENTS_HPP
#define SENSORSEL_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <sensorsel/io.hpp>

namespace sensorsel {

/// Names accepted by run_demo: spring-mass, membrane, dmd-synthetic.
const std::vector<std::string>& demo_names();

/// Demo parameters as strings keyed by name. Unset keys take the demo's
/// defaults; unknown keys are rejected. The full resolved set is written to
/// the manifest so a run can be repeated from it alone.
using DemoParameters = std::map<std::string, std::string>;

/// Default parameters of a demo.
DemoParameters demo_defaults(const std::string& name);

struct RunResult {
  RunManifest manifest;
  /// Human-readable summary lines (also useful for logs).
  std::vector<std::string> summary;
};

/// Runs a demo, writing its fixed-name outputs and `manifest.yaml` under
/// `out_dir`. Throws InvalidArgument for unknown names or parameters.
RunResult run_demo(const std::string& name, const DemoParameters& overrides, std::uint64_t seed,
                   const std::filesystem::path& out_dir);

/// Runs a configured experiment on a snapshot matrix: builds the basis, sweeps
/// gamma (pareto.csv), records the gamma = first selection (selection.csv),
/// the random baseline (random.csv, when trials > 0) and the basis
/// (basis.csv). `out_dir` overrides the configured output directory when
/// non-empty.
RunResult run_experiment(const std::filesystem::path& config_path,
                         const std::filesystem::path& out_dir = {});

struct ReplayResult {
  bool identical = true;
  /// One line per output whose digest differs or that is missing.
  std::vector<std::string> mismatches;
  RunManifest rerun;
};

/// Re-runs the command recorded in a manifest into `out_dir` and compares the
/// output digests against the recorded ones.
ReplayResult replay(const std::filesystem::path& manifest_path,
                    const std::filesystem::path& out_dir);

}  // namespace sensorsel

#endif  // SENSORSEL_EXPERIMENTS_HPP
