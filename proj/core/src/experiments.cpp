#include <sensorsel/experiments.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <sensorsel/balanced.hpp>
#include <sensorsel/bases.hpp>
#include <sensorsel/dmd.hpp>
#include <sensorsel/errors.hpp>
#include <sensorsel/format.hpp>
#include <sensorsel/membrane.hpp>
#include <sensorsel/parallel.hpp>
#include <sensorsel/reconstruction.hpp>
#include <sensorsel/rng.hpp>

namespace sensorsel {

namespace fs = std::filesystem;

namespace {

/// Resolved demo parameters with typed accessors.
class Params {
 public:
  Params(const std::string& demo, DemoParameters defaults, const DemoParameters& overrides)
      : values_(std::move(defaults)) {
    for (const auto& [key, value] : overrides) {
      const auto it = values_.find(key);
      if (it == values_.end()) {
        throw InvalidArgument("demo " + demo + ": unknown parameter '" + key + "'");
      }
      it->second = value;
    }
  }

  const DemoParameters& all() const noexcept { return values_; }

  Index index(const std::string& key, Index min = 1) const {
    const std::string& text = values_.at(key);
    Index value = 0;
    std::size_t used = 0;
    try {
      value = static_cast<Index>(std::stoll(text, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) throw InvalidArgument(key + ": expected an integer, got '" + text + "'");
    if (value < min) throw InvalidArgument(key + " must be >= " + std::to_string(min));
    return value;
  }

  double real(const std::string& key) const {
    const auto v = parse_double(values_.at(key));
    if (!v) throw InvalidArgument(key + ": expected a number, got '" + values_.at(key) + "'");
    return *v;
  }

  bool flag(const std::string& key) const {
    const std::string& text = values_.at(key);
    if (text == "true") return true;
    if (text == "false") return false;
    throw InvalidArgument(key + ": expected true or false, got '" + text + "'");
  }

  std::vector<double> gammas(const std::string& key) const { return parse_gamma_grid(values_.at(key)); }

 private:
  DemoParameters values_;
};

/// Writes outputs under a directory and records their digests.
class OutputSet {
 public:
  OutputSet(fs::path dir, RunManifest& manifest) : dir_(std::move(dir)), manifest_(manifest) {
    fs::create_directories(dir_);
  }

  void write(const std::string& name, const std::string& text) {
    write_text(dir_ / name, text);
    manifest_.outputs[name] = digest(text);
  }

  /// Records a file written by someone else.
  void adopt(const std::string& name) { manifest_.outputs[name] = digest(read_text(dir_ / name)); }

  const fs::path& dir() const noexcept { return dir_; }

 private:
  fs::path dir_;
  RunManifest& manifest_;
};

std::string pareto_text(const std::vector<ParetoPoint>& points) {
  std::ostringstream out;
  write_pareto_csv(out, points);
  return out.str();
}

std::string selection_text(const Selection& sel) {
  std::ostringstream out;
  write_selection_csv(out, sel);
  return out.str();
}

std::string join_indices(const std::vector<Index>& indices) {
  std::string out;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(indices[i]);
  }
  return out;
}

std::string percent(double fraction) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(3);
  out << 100.0 * fraction;
  return out.str();
}

const std::vector<std::string> kDemoNames{"spring-mass", "membrane", "dmd-synthetic"};

// ---------------------------------------------------------------------------
// spring-mass

struct LQGMean {
  double recon_error = 0.0;
  double control_cost = 0.0;
  Index infeasible = 0;
};

LQGMean mean_lqg(const std::vector<LQGResult>& runs) {
  LQGMean m;
  Index ok = 0;
  for (const auto& r : runs) {
    if (!r.feasible) {
      ++m.infeasible;
      continue;
    }
    m.recon_error += r.recon_error;
    m.control_cost += r.control_cost;
    ++ok;
  }
  if (ok == 0) {
    m.recon_error = m.control_cost = std::numeric_limits<double>::quiet_NaN();
  } else {
    m.recon_error /= static_cast<double>(ok);
    m.control_cost /= static_cast<double>(ok);
  }
  return m;
}

void spring_mass_demo(const Params& prm, std::uint64_t seed, OutputSet& out,
                      std::vector<std::string>& summary) {
  const Index n_mass = prm.index("masses", 2);
  const Index ps = prm.index("sensors");
  const Index pa = prm.index("actuators");
  const Index rs = prm.index("sensor_rank", 0) == 0 ? ps : prm.index("sensor_rank");
  const Index ra = prm.index("actuator_rank", 0) == 0 ? 2 * pa : prm.index("actuator_rank");
  const auto gammas = prm.gammas("gammas");
  const Index realizations = prm.index("realizations");
  const Index trials = prm.index("trials", 0);
  const Index x0_coord = prm.index("x0_coordinate");
  const Index traj_coord = prm.index("trajectory_coordinate");
  const bool full_enum = prm.flag("full_enumeration");
  const Index n = 2 * n_mass;
  if (x0_coord > n || traj_coord > n) throw InvalidArgument("coordinates are 1-based and at most 2N");

  const auto sys = build_spring_mass(n_mass);
  const Gramians g = gramians(sys);
  const BalancedModes bs = balance(g, rs);
  const BalancedModes ba = balance(g, ra);
  const Eigen::VectorXd eta_s = spring_mass_sensor_cost(n_mass);
  const Eigen::VectorXd eta_a = spring_mass_actuator_cost(n_mass);
  const std::vector<Index> allowed = velocity_block(n_mass);

  const auto sensors = pareto_sweep(
      [&](double gamma) { return select_sensors(bs, CostField(eta_s, gamma), ps); }, gammas,
      Evaluator{"log_det_CWcC", [&](const Selection& s) { return h2_proxy_sensors(s, g.controllability); }});
  const auto actuators = pareto_sweep(
      [&](double gamma) { return select_actuators(ba, CostField(eta_a, gamma), pa, allowed); }, gammas,
      Evaluator{"log_det_BWoB", [&](const Selection& s) { return h2_proxy_actuators(s, g.observability); }});
  out.write("sensor_pareto.csv", pareto_text(sensors));
  out.write("actuator_pareto.csv", pareto_text(actuators));

  // Enumeration summary.
  std::ostringstream en;
  const SubsetEnumeration act_enum(g.observability, allowed, pa);
  std::vector<double> allowed_costs;
  for (Index j : allowed) allowed_costs.push_back(eta_a(j));
  std::sort(allowed_costs.begin(), allowed_costs.end());
  const double min_act_cost =
      std::accumulate(allowed_costs.begin(), allowed_costs.begin() + pa, 0.0);
  en << "actuator_subsets: " << act_enum.size() << '\n';
  for (const auto* pt : {&actuators.front(), &actuators.back()}) {
    en << "actuators gamma=" << format_double(pt->gamma) << ": proxy=" << format_double(pt->error)
       << " percentile=" << percent(act_enum.percentile_of(pt->error))
       << " better_subsets=" << act_enum.count_better(pt->error)
       << " cost=" << format_double(pt->total_cost) << '\n';
  }
  en << "actuator_minimum_cost: " << format_double(min_act_cost) << '\n';
  if (full_enum) {
    std::vector<Index> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), Index{0});
    const SubsetEnumeration sen_enum(g.controllability, all, ps);
    std::vector<double> costs(eta_s.data(), eta_s.data() + n);
    std::sort(costs.begin(), costs.end());
    en << "sensor_subsets: " << sen_enum.size() << '\n';
    for (const auto* pt : {&sensors.front(), &sensors.back()}) {
      en << "sensors gamma=" << format_double(pt->gamma) << ": proxy=" << format_double(pt->error)
         << " percentile=" << percent(sen_enum.percentile_of(pt->error))
         << " better_subsets=" << sen_enum.count_better(pt->error)
         << " cost=" << format_double(pt->total_cost) << '\n';
    }
    en << "sensor_minimum_cost: "
       << format_double(std::accumulate(costs.begin(), costs.begin() + ps, 0.0)) << '\n';
    summary.push_back("sensor proxy at gamma=" + format_double(gammas.front()) + " beats " +
                      percent(sen_enum.percentile_of(sensors.front().error)) + "% of " +
                      std::to_string(sen_enum.size()) + " subsets");
  }
  summary.push_back("actuator proxy at gamma=" + format_double(gammas.front()) + " has " +
                    std::to_string(act_enum.count_better(actuators.front().error)) + " better subsets of " +
                    std::to_string(act_enum.size()));
  out.write("enumeration.txt", en.str());

  // LQG sweep with common random numbers across gamma.
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
  x0(x0_coord - 1) = 1.0;
  LQGOptions base;
  base.seed = seed;
  base.record_trajectory = false;
  const auto ng = static_cast<std::size_t>(gammas.size());
  const auto nr = static_cast<std::size_t>(realizations);
  std::vector<LQGResult> runs(ng * nr);
  parallel_for(runs.size(), [&](std::size_t i) {
    LQGOptions o = base;
    o.realization = i % nr;
    runs[i] = lqg_simulate(sys, sensors[i / nr].selection, actuators[i / nr].selection, x0, o);
  });
  std::vector<ParetoPoint> lqg_sensors, lqg_actuators;
  for (std::size_t gi = 0; gi < ng; ++gi) {
    const LQGMean m = mean_lqg({runs.begin() + static_cast<std::ptrdiff_t>(gi * nr),
                                runs.begin() + static_cast<std::ptrdiff_t>((gi + 1) * nr)});
    lqg_sensors.push_back({gammas[gi], sensors[gi].total_cost, m.recon_error, "recon_error",
                           sensors[gi].selection});
    lqg_actuators.push_back({gammas[gi], actuators[gi].total_cost, m.control_cost, "lqr_cost",
                             actuators[gi].selection});
  }
  out.write("lqg_sensor_pareto.csv", pareto_text(lqg_sensors));
  out.write("lqg_actuator_pareto.csv", pareto_text(lqg_actuators));
  summary.push_back("mean reconstruction error: gamma=" + format_double(gammas.front()) + " -> " +
                    format_double(lqg_sensors.front().error) + ", gamma=" + format_double(gammas.back()) +
                    " -> " + format_double(lqg_sensors.back().error));

  // Random baseline: random actuators on the velocity block paired with random sensors.
  if (trials > 0) {
    const auto nt = static_cast<std::size_t>(trials);
    std::vector<Selection> rs_sel(nt), ra_sel(nt);
    std::vector<Index> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), Index{0});
    for (std::size_t t = 0; t < nt; ++t) {
      auto se = make_engine(seed, Stream::lqg_random_sensors, t);
      rs_sel[t] = Selection::from_indices(sample_without_replacement(all, ps, se), n, eta_s);
      auto ae = make_engine(seed, Stream::random_arrays, t);
      ra_sel[t] = Selection::from_indices(sample_without_replacement(allowed, pa, ae), n, eta_a);
    }
    std::vector<LQGResult> base_runs(nt * nr);
    parallel_for(base_runs.size(), [&](std::size_t i) {
      LQGOptions o = base;
      o.realization = i % nr;
      base_runs[i] = lqg_simulate(sys, rs_sel[i / nr], ra_sel[i / nr], x0, o);
    });
    std::ostringstream rb;
    rb << "trial,sensor_cost,recon_error,actuator_cost,lqr_cost,infeasible,sensors,actuators\n";
    for (std::size_t t = 0; t < nt; ++t) {
      const LQGMean m = mean_lqg({base_runs.begin() + static_cast<std::ptrdiff_t>(t * nr),
                                  base_runs.begin() + static_cast<std::ptrdiff_t>((t + 1) * nr)});
      rb << t << ',' << format_double(rs_sel[t].total_cost) << ',' << format_double(m.recon_error) << ','
         << format_double(ra_sel[t].total_cost) << ',' << format_double(m.control_cost) << ','
         << m.infeasible << ',' << join_indices(rs_sel[t].indices) << ','
         << join_indices(ra_sel[t].indices) << '\n';
    }
    out.write("lqg_random.csv", rb.str());
  }

  // Trajectory of one coordinate with the first-gamma arrays and noise realization 0.
  LQGOptions o = base;
  o.record_trajectory = true;
  const LQGResult traj = lqg_simulate(sys, sensors.front().selection, actuators.front().selection, x0, o);
  std::ostringstream tr;
  const std::string tag = std::to_string(traj_coord);
  tr << "t,x_" << tag << ",xhat_" << tag << '\n';
  for (Index k = 0; k < traj.trajectory.cols(); ++k) {
    tr << format_double(static_cast<double>(k) * o.dt) << ','
       << format_double(traj.trajectory(traj_coord - 1, k)) << ','
       << format_double(traj.estimate(traj_coord - 1, k)) << '\n';
  }
  out.write("trajectory.csv", tr.str());
}

// ---------------------------------------------------------------------------
// membrane

void membrane_demo(const Params& prm, std::uint64_t seed, OutputSet& out,
                   std::vector<std::string>& summary) {
  const MembraneModel model(static_cast<int>(prm.index("max_order", 0)),
                            static_cast<int>(prm.index("radial_modes")), prm.real("radius"),
                            prm.real("wave_speed"), prm.index("r_points", 2), prm.index("theta_points", 2));
  const Index p = prm.index("p");
  const auto gammas = prm.gammas("gammas");
  const Index n_ic = prm.index("initial_conditions");
  const Index trials = prm.index("trials", 0);
  const auto times = time_grid(prm.real("time_step"), prm.real("t_end"));
  const double snapshot_time = prm.real("snapshot_time");

  const auto points = membrane_benchmark(model, p, gammas, n_ic, times, seed);
  out.write("pareto.csv", pareto_text(points));
  out.write("sensors.csv", selection_text(points.front().selection));
  summary.push_back("gamma=" + format_double(points.front().gamma) +
                    ": error=" + format_double(points.front().error) +
                    " cost=" + format_double(points.front().total_cost));
  summary.push_back("gamma=" + format_double(points.back().gamma) +
                    ": error=" + format_double(points.back().error) +
                    " cost=" + format_double(points.back().total_cost));

  const Basis basis = membrane_basis(model);
  const Eigen::VectorXd eta = radial_cost(model);
  if (trials > 0) {
    std::vector<Eigen::VectorXd> ics;
    for (Index i = 0; i < n_ic; ++i) ics.push_back(sample_coefficients(model, seed, static_cast<std::uint64_t>(i)));
    const MembraneErrorEvaluator evaluator(model, basis.real_modes(), ics, times);
    const auto random = random_selections(model.grid_size(), p, trials, seed, eta);
    std::vector<double> errors(random.size());
    parallel_for(random.size(), [&](std::size_t t) { errors[t] = evaluator.mean_error(random[t]); });
    std::ostringstream rb;
    rb << "trial,total_cost,error,indices\n";
    for (std::size_t t = 0; t < random.size(); ++t) {
      rb << t << ',' << format_double(random[t].total_cost) << ',' << format_double(errors[t]) << ','
         << join_indices(random[t].indices) << '\n';
    }
    out.write("random.csv", rb.str());
    summary.push_back("best of " + std::to_string(trials) + " random arrays: error=" +
                      format_double(*std::min_element(errors.begin(), errors.end())));
  }

  const Selection& sel = points.front().selection;
  const Eigen::VectorXd u = evolve(model, basis.real_modes(), sample_coefficients(model, seed, 0), snapshot_time);
  const Eigen::MatrixXd u_hat = reconstruct(measure(Eigen::MatrixXd(u), sel), basis, sel);
  std::ostringstream sn;
  sn << "r,theta,u,uhat\n";
  for (Index row = 0; row < model.grid_size(); ++row) {
    sn << format_double(model.row_radius(row)) << ',' << format_double(model.row_theta(row)) << ','
       << format_double(u(row)) << ',' << format_double(u_hat(row, 0)) << '\n';
  }
  out.write("snapshot.csv", sn.str());
}

// ---------------------------------------------------------------------------
// dmd-synthetic

void dmd_demo(const Params& prm, std::uint64_t seed, OutputSet& out, std::vector<std::string>& summary) {
  SyntheticFieldOptions field;
  field.points = prm.index("points", 2);
  field.snapshots = prm.index("snapshots", 3);
  field.dt = prm.real("dt");
  field.seed = seed;
  const double level = prm.real("noise_level");
  const double frac = prm.real("train_fraction");
  const Index rank = prm.index("rank");
  const Index p = prm.index("p");
  const Index r_max = prm.index("max_rank");
  if (!(level >= 0.0)) throw InvalidArgument("noise_level must be non-negative");
  if (!(frac > 0.0 && frac < 1.0)) throw InvalidArgument("train_fraction must lie in (0, 1)");

  const Eigen::MatrixXd clean = synthetic_quasi_periodic_field(field);
  const auto m_train = static_cast<Index>(std::floor(frac * static_cast<double>(clean.cols())));
  if (m_train < 2 || m_train >= clean.cols()) throw InvalidArgument("train_fraction leaves an empty block");
  const double noise_var = relative_noise_variance(clean.leftCols(m_train), level);

  // Rank sweep on the noisy field, sensors = modes.
  SyntheticFieldOptions noisy_opts = field;
  noisy_opts.noise = std::sqrt(noise_var);
  const Eigen::MatrixXd noisy = synthetic_quasi_periodic_field(noisy_opts);
  const auto nr = static_cast<std::size_t>(r_max);
  std::vector<SplitErrors> sweep(nr);
  std::vector<std::string> sweep_error(nr);
  parallel_for(nr, [&](std::size_t i) {
    const auto r = static_cast<Index>(i) + 1;
    try {
      sweep[i] = train_test_split_errors(noisy, frac, r, r, CostField::uniform(noisy.rows()), field.dt);
    } catch (const NumericalError& e) {
      sweep_error[i] = e.what();
    } catch (const InvalidArgument& e) {
      sweep_error[i] = e.what();
    }
  });
  std::ostringstream rs;
  rs << "r,interpolation,extrapolation\n";
  for (std::size_t i = 0; i < nr; ++i) {
    if (!sweep_error[i].empty()) continue;
    rs << i + 1 << ',' << format_double(sweep[i].interpolation) << ','
       << format_double(sweep[i].extrapolation) << '\n';
  }
  out.write("rank_sweep.csv", rs.str());

  // Model on the clean training block; noisy measurements of the whole record.
  const DMDModel model = fit_dmd(clean.leftCols(m_train), rank, field.dt);
  save_dmd_model(out.dir() / "model", model);
  for (const char* name : {"model/modes_re.csv", "model/modes_im.csv", "model/eigenvalues.csv", "model/meta.yaml"}) {
    out.adopt(name);
  }
  const Basis basis = model.basis();
  const Selection sel = select_on_basis(basis, CostField::uniform(clean.rows()), p);
  out.write("sensors.csv", selection_text(sel));

  Eigen::MatrixXd y = measure(clean, sel);
  auto engine = make_engine(seed, Stream::dmd_noise, 0);
  std::normal_distribution<double> normal(0.0, std::sqrt(noise_var));
  for (Index k = 0; k < y.cols(); ++k) {
    for (Index i = 0; i < y.rows(); ++i) y(i, k) += normal(engine);
  }
  const Eigen::MatrixXd ls = reconstruct(y, basis, sel);
  const KalmanResult kf = kalman_estimate(model, sel, y, noise_var);
  const Index m_test = clean.cols() - m_train;
  auto errors = [&](const Eigen::MatrixXd& est) {
    return format_double(fractional_error(clean, est)) + ',' +
           format_double(fractional_error(clean.leftCols(m_train), est.leftCols(m_train))) + ',' +
           format_double(fractional_error(clean.rightCols(m_test), est.rightCols(m_test)));
  };
  std::ostringstream rc;
  rc << "method,error_all,error_train,error_test\n";
  rc << "least_squares," << errors(ls) << '\n';
  rc << "kalman," << errors(kf.states) << '\n';
  out.write("reconstruction.csv", rc.str());

  summary.push_back("noise variance " + format_double(noise_var) + "; reconstruction error least-squares=" +
                    format_double(fractional_error(clean, ls)) +
                    " kalman=" + format_double(fractional_error(clean, kf.states)));
  for (const auto& w : model.warnings) summary.push_back("warning: " + w);
}

}  // namespace

const std::vector<std::string>& demo_names() { return kDemoNames; }

DemoParameters demo_defaults(const std::string& name) {
  if (name == "spring-mass") {
    return {{"masses", "16"},        {"sensors", "6"},          {"actuators", "4"},
            {"sensor_rank", "0"},    {"actuator_rank", "0"},    {"gammas", "0:10:11"},
            {"realizations", "25"},  {"trials", "20"},          {"x0_coordinate", "1"},
            {"trajectory_coordinate", "3"}, {"full_enumeration", "false"}};
  }
  if (name == "membrane") {
    return {{"max_order", "5"},      {"radial_modes", "5"},  {"radius", "10"},
            {"wave_speed", "1"},     {"r_points", "101"},    {"theta_points", "101"},
            {"p", "30"},             {"gammas", "0:20:11"},  {"initial_conditions", "50"},
            {"trials", "100"},       {"time_step", "0.1"},   {"t_end", "10"},
            {"snapshot_time", "5"}};
  }
  if (name == "dmd-synthetic") {
    return {{"points", "128"}, {"snapshots", "400"},     {"dt", "0.05"},  {"noise_level", "0.02"},
            {"train_fraction", "0.8"}, {"rank", "12"},   {"p", "12"},     {"max_rank", "60"}};
  }
  throw InvalidArgument("unknown demo '" + name + "' (expected spring-mass, membrane or dmd-synthetic)");
}

RunResult run_demo(const std::string& name, const DemoParameters& overrides, std::uint64_t seed,
                   const fs::path& out_dir) {
  const Params prm(name, demo_defaults(name), overrides);
  RunResult result;
  RunManifest& man = result.manifest;
  man.command = "demo";
  man.name = name;
  man.parameters = prm.all();
  man.seed = seed;
  man.version = std::string(library_version());
  OutputSet out(out_dir, man);
  if (name == "spring-mass") {
    spring_mass_demo(prm, seed, out, result.summary);
  } else if (name == "membrane") {
    membrane_demo(prm, seed, out, result.summary);
  } else {
    dmd_demo(prm, seed, out, result.summary);
  }
  save_manifest(out_dir / "manifest.yaml", man);
  return result;
}

RunResult run_experiment(const fs::path& config_path, const fs::path& out_dir) {
  const std::string config_text = read_text(config_path);
  const ExperimentConfig cfg = parse_experiment_config(config_text, config_path.parent_path());
  const Eigen::MatrixXd x = load_matrix(cfg.data);
  const Index n = x.rows();
  const Index rank = cfg.rank == 0 ? cfg.p : cfg.rank;

  const BasisKind kind = basis_kind_from_string(cfg.basis_kind);
  const Basis basis = [&]() -> Basis {
    switch (kind) {
      case BasisKind::svd:
        return svd_basis(x, rank);
      case BasisKind::randomized:
        return randomized_basis(x, rank, RandomizedOptions{cfg.oversample, 1, cfg.seed});
      case BasisKind::dmd:
        return fit_dmd(x, rank, cfg.dt).basis();
      default:
        throw InvalidArgument("basis kind '" + cfg.basis_kind +
                              "' cannot be built from snapshot data; use svd, randomized or dmd");
    }
  }();

  Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
  if (cfg.cost) {
    eta = load_vector(*cfg.cost);
    if (eta.size() != n) {
      throw InvalidArgument("cost vector has " + std::to_string(eta.size()) + " entries, data has " +
                            std::to_string(n) + " rows");
    }
  }
  std::vector<Index> allowed(static_cast<std::size_t>(n));
  std::iota(allowed.begin(), allowed.end(), Index{0});
  if (cfg.restrict_to) allowed = load_index_list(*cfg.restrict_to);

  const auto points = pareto_sweep(
      [&](double gamma) { return select_on_basis(basis, CostField(eta, gamma), cfg.p, allowed); },
      cfg.gammas, Evaluator{"fractional_error", [&](const Selection& s) {
                              return fractional_error(x, reconstruct(measure(x, s), basis, s));
                            }});

  RunResult result;
  RunManifest& man = result.manifest;
  man.command = "experiment";
  man.name = fs::absolute(config_path).lexically_normal().string();
  man.seed = cfg.seed;
  man.version = std::string(library_version());
  man.parameters = {{"config_digest", digest(config_text)},
                    {"basis", cfg.basis_kind},
                    {"rank", std::to_string(rank)},
                    {"p", std::to_string(cfg.p)},
                    {"trials", std::to_string(cfg.trials)}};
  const fs::path dir = out_dir.empty() ? cfg.output_dir : out_dir;
  OutputSet out(dir, man);
  out.write("pareto.csv", pareto_text(points));
  out.write("selection.csv", selection_text(points.front().selection));
  save_basis(dir / "basis.csv", basis);
  out.adopt("basis.csv");

  if (cfg.trials > 0) {
    const auto nt = static_cast<std::size_t>(cfg.trials);
    std::vector<Selection> random(nt);
    std::vector<double> errors(nt);
    for (std::size_t t = 0; t < nt; ++t) {
      auto engine = make_engine(cfg.seed, Stream::random_arrays, t);
      random[t] = Selection::from_indices(sample_without_replacement(allowed, cfg.p, engine), n, eta);
    }
    parallel_for(nt, [&](std::size_t t) {
      errors[t] = fractional_error(x, reconstruct(measure(x, random[t]), basis, random[t]));
    });
    std::ostringstream rb;
    rb << "trial,total_cost,error,indices\n";
    for (std::size_t t = 0; t < nt; ++t) {
      rb << t << ',' << format_double(random[t].total_cost) << ',' << format_double(errors[t]) << ','
         << join_indices(random[t].indices) << '\n';
    }
    out.write("random.csv", rb.str());
  }
  for (const auto& pt : points) {
    result.summary.push_back("gamma=" + format_double(pt.gamma) + ": cost=" + format_double(pt.total_cost) +
                             " error=" + format_double(pt.error));
  }
  save_manifest(dir / "manifest.yaml", man);
  return result;
}

ReplayResult replay(const fs::path& manifest_path, const fs::path& out_dir) {
  const RunManifest recorded = load_manifest(manifest_path);
  ReplayResult result;
  if (recorded.command == "demo") {
    result.rerun = run_demo(recorded.name, recorded.parameters, recorded.seed, out_dir).manifest;
  } else if (recorded.command == "experiment") {
    const auto it = recorded.parameters.find("config_digest");
    if (it != recorded.parameters.end() && it->second != digest(read_text(recorded.name))) {
      result.identical = false;
      result.mismatches.push_back("config " + recorded.name + " changed since the recorded run");
    }
    result.rerun = run_experiment(recorded.name, out_dir).manifest;
  } else {
    throw InvalidArgument("manifest command '" + recorded.command + "' cannot be replayed");
  }
  for (const auto& [name, hash] : recorded.outputs) {
    const auto it = result.rerun.outputs.find(name);
    if (it == result.rerun.outputs.end()) {
      result.identical = false;
      result.mismatches.push_back(name + ": not produced");
    } else if (it->second != hash) {
      result.identical = false;
      result.mismatches.push_back(name + ": digest " + it->second + " != recorded " + hash);
    }
  }
  for (const auto& [name, hash] : result.rerun.outputs) {
    if (!recorded.outputs.count(name)) {
      result.identical = false;
      result.mismatches.push_back(name + ": not in the recorded manifest");
    }
  }
  return result;
}

}  // namespace sensorsel
