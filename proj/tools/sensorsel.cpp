// Command-line front end: sensor selection on a stored basis, basis builds,
// demos, configured experiments and manifest replays.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure, 1 replay
// mismatch.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <sensorsel/bases.hpp>
#include <sensorsel/dmd.hpp>
#include <sensorsel/errors.hpp>
#include <sensorsel/experiments.hpp>
#include <sensorsel/io.hpp>
#include <sensorsel/reconstruction.hpp>

namespace fs = std::filesystem;
using namespace sensorsel;

namespace {

constexpr int kOk = 0;
constexpr int kMismatch = 1;
constexpr int kUserError = 2;
constexpr int kNumericalError = 3;

struct SelectArgs {
  std::string basis;
  Index p = 0;
  std::string cost;
  double gamma = 0.0;
  std::string restrict_to;
  std::string out;
  std::uint64_t seed = 0;
};

int run_select(const SelectArgs& a) {
  if (a.p < 1) throw InvalidArgument("--p must be at least 1 (got " + std::to_string(a.p) + ")");
  if (!(a.gamma >= 0.0)) throw InvalidArgument("--gamma must be non-negative");
  const Basis basis = load_basis(a.basis);
  CostField cost = CostField::uniform(basis.rows(), 0.0, a.gamma);
  if (!a.cost.empty()) {
    cost.eta = load_vector(a.cost);
    if (cost.eta.size() != basis.rows()) {
      throw InvalidArgument("--cost has " + std::to_string(cost.eta.size()) + " entries, basis has " +
                            std::to_string(basis.rows()) + " rows");
    }
  }
  Selection sel;
  if (a.restrict_to.empty()) {
    sel = select_on_basis(basis, cost, a.p);
  } else {
    sel = select_on_basis(basis, cost, a.p, load_index_list(a.restrict_to));
  }
  if (sel.rank_deficient) {
    std::cerr << "warning: basis became rank deficient before " << a.p << " pivots\n";
  }
  std::ostringstream out;
  write_selection_csv(out, sel);
  write_text(a.out, out.str());
  return kOk;
}

struct BasisArgs {
  std::string data;
  std::string kind = "svd";
  Index rank = 0;
  Index oversample = 10;
  double dt = 1.0;
  std::uint64_t seed = 0;
  std::string out;
};

int run_basis(const BasisArgs& a) {
  if (a.rank < 1) throw InvalidArgument("--rank must be at least 1");
  const Eigen::MatrixXd x = load_matrix(a.data);
  const BasisKind kind = basis_kind_from_string(a.kind);
  std::optional<Basis> basis;
  switch (kind) {
    case BasisKind::svd:
      basis = svd_basis(x, a.rank);
      break;
    case BasisKind::randomized:
      basis = randomized_basis(x, a.rank, RandomizedOptions{a.oversample, 1, a.seed});
      break;
    case BasisKind::dmd: {
      const DMDModel model = fit_dmd(x, a.rank, a.dt);
      for (const auto& w : model.warnings) std::cerr << "warning: " << w << '\n';
      basis = model.basis();
      break;
    }
    default:
      throw InvalidArgument("--kind must be svd, randomized or dmd");
  }
  save_basis(a.out, *basis);
  return kOk;
}

struct DemoArgs {
  std::string name;
  std::optional<Index> p;
  std::optional<std::string> gammas;
  std::optional<Index> trials;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  bool full_enumeration = false;
  std::vector<std::string> set;
};

int run_demo_command(const DemoArgs& a) {
  DemoParameters params;
  if (a.p) params[a.name == "spring-mass" ? "sensors" : "p"] = std::to_string(*a.p);
  if (a.gammas) params["gammas"] = *a.gammas;
  if (a.trials) params["trials"] = std::to_string(*a.trials);
  if (a.full_enumeration) {
    if (a.name != "spring-mass") throw InvalidArgument("--full-enumeration applies to spring-mass only");
    params["full_enumeration"] = "true";
  }
  for (const auto& kv : a.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidArgument("--set expects key=value, got '" + kv + "'");
    params[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  const RunResult r = run_demo(a.name, params, a.seed, a.out_dir);
  for (const auto& line : r.summary) std::cout << line << '\n';
  std::cout << "wrote " << r.manifest.outputs.size() << " files and manifest.yaml to " << a.out_dir << '\n';
  return kOk;
}

int run_experiment_command(const std::string& config, const std::string& out_dir) {
  const RunResult r = run_experiment(config, out_dir);
  for (const auto& line : r.summary) std::cout << line << '\n';
  return kOk;
}

int run_replay(const std::string& manifest, const std::string& out_dir) {
  const ReplayResult r = replay(manifest, out_dir);
  if (r.identical) {
    std::cout << "identical: " << r.rerun.outputs.size() << " outputs match\n";
    return kOk;
  }
  for (const auto& m : r.mismatches) std::cout << "mismatch: " << m << '\n';
  return kMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cost-constrained QR sensor and actuator selection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(library_version()));

  SelectArgs sel;
  auto* select = app.add_subcommand("select", "Select sensors on a stored basis");
  select->add_option("--basis", sel.basis, "Basis matrix file (rows are locations)")->required();
  select->add_option("--p", sel.p, "Number of sensors")->required();
  select->add_option("--cost", sel.cost, "Per-location cost vector file");
  select->add_option("--gamma", sel.gamma, "Cost weighting (default 0)");
  select->add_option("--restrict", sel.restrict_to, "File listing the allowed location indices");
  select->add_option("--out", sel.out, "Output CSV (rank,index,cost)")->required();
  select->add_option("--seed", sel.seed, "Recorded for pipelines; the selection itself is deterministic");

  BasisArgs bas;
  auto* basis = app.add_subcommand("basis", "Build a basis from snapshot data");
  basis->add_option("--data", bas.data, "Snapshot matrix file (columns are snapshots)")->required();
  basis->add_option("--kind", bas.kind, "svd, randomized or dmd");
  basis->add_option("--rank", bas.rank, "Number of modes")->required();
  basis->add_option("--oversample", bas.oversample, "Randomized sketch oversampling");
  basis->add_option("--dt", bas.dt, "Snapshot spacing (dmd)");
  basis->add_option("--seed", bas.seed, "Sketch seed (randomized)");
  basis->add_option("--out", bas.out, "Output basis file")->required();

  DemoArgs dem;
  auto* demo = app.add_subcommand("demo", "Run a built-in demo: spring-mass, membrane, dmd-synthetic");
  demo->add_option("name", dem.name, "Demo name")->required();
  demo->add_option("--p", dem.p, "Number of sensors");
  demo->add_option("--gammas", dem.gammas, "Gamma grid, start:stop:count or a comma list");
  demo->add_option("--trials", dem.trials, "Random baseline arrays");
  demo->add_option("--seed", dem.seed, "Root seed");
  demo->add_option("--out-dir", dem.out_dir, "Output directory");
  demo->add_flag("--full-enumeration", dem.full_enumeration, "Enumerate every sensor subset (spring-mass)");
  demo->add_option("--set", dem.set, "Override a demo parameter, key=value (repeatable)");

  std::string config, exp_out;
  auto* experiment = app.add_subcommand("experiment", "Run a YAML-configured experiment");
  experiment->add_option("config", config, "Experiment configuration file")->required();
  experiment->add_option("--out-dir", exp_out, "Override the configured output directory");

  std::string manifest, replay_out;
  auto* rep = app.add_subcommand("replay", "Re-run a manifest and compare output digests");
  rep->add_option("manifest", manifest, "manifest.yaml of an earlier run")->required();
  rep->add_option("--out-dir", replay_out, "Where to write the re-run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    return kUserError;
  }

  try {
    if (*select) return run_select(sel);
    if (*basis) return run_basis(bas);
    if (*demo) return run_demo_command(dem);
    if (*experiment) return run_experiment_command(config, exp_out);
    if (*rep) return run_replay(manifest, replay_out);
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kUserError;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUserError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUserError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUserError;
  }
  return kUserError;
}
