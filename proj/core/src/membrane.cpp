#include <sensorsel/membrane.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <sensorsel/bessel.hpp>
#include <sensorsel/errors.hpp>
#include <sensorsel/linalg.hpp>
#include <sensorsel/parallel.hpp>
#include <sensorsel/rng.hpp>

namespace sensorsel {

MembraneModel::MembraneModel(int max_order, int radial_modes, double radius, double wave_speed,
                             Index r_points, Index theta_points)
    : max_order_(max_order),
      radial_modes_(radial_modes),
      radius_(radius),
      wave_speed_(wave_speed) {
  if (max_order < 0 || radial_modes < 1) throw InvalidArgument("membrane needs M >= 0 and N >= 1");
  if (!(radius > 0.0) || !(wave_speed > 0.0) || !std::isfinite(radius) || !std::isfinite(wave_speed)) {
    throw InvalidArgument("membrane radius and wave speed must be positive");
  }
  if (r_points < 2 || theta_points < 2) throw InvalidArgument("membrane grid needs >= 2 points per axis");
  r_grid_.resize(r_points);
  for (Index i = 0; i < r_points; ++i) {
    r_grid_(i) = radius * static_cast<double>(i) / static_cast<double>(r_points - 1);
  }
  theta_grid_.resize(theta_points);
  for (Index j = 0; j < theta_points; ++j) {
    theta_grid_(j) = -std::numbers::pi +
                     2.0 * std::numbers::pi * static_cast<double>(j + 1) / static_cast<double>(theta_points);
  }
  zeros_.resize(max_order + 1, radial_modes);
  for (int m = 0; m <= max_order; ++m) {
    for (int n = 1; n <= radial_modes; ++n) zeros_(m, n - 1) = bessel_zero(m, n);
  }
}

double MembraneModel::lambda(int m, int n) const {
  if (m < 0 || m > max_order_ || n < 1 || n > radial_modes_) {
    throw InvalidArgument("membrane mode index out of range");
  }
  const double k = zeros_(m, n - 1) / radius_;
  return k * k;
}

Eigen::VectorXd MembraneModel::column_frequencies() const {
  Eigen::VectorXd w(coefficient_count());
  Index col = 0;
  for (int n = 1; n <= radial_modes_; ++n) w(col++) = wave_speed_ * zeros_(0, n - 1) / radius_;
  for (int m = 1; m <= max_order_; ++m) {
    for (int n = 1; n <= radial_modes_; ++n) {
      const double f = wave_speed_ * zeros_(m, n - 1) / radius_;
      w(col++) = f;
      w(col++) = f;
    }
  }
  return w;
}

Eigen::VectorXd MembraneModel::coefficient_envelope() const {
  Eigen::VectorXd e(coefficient_count());
  Index col = 0;
  for (int n = 1; n <= radial_modes_; ++n) e(col++) = 1.5 / n;
  for (int m = 1; m <= max_order_; ++m) {
    for (int n = 1; n <= radial_modes_; ++n) {
      const double v = 1.5 / (static_cast<double>(n) * (m + 1));
      e(col++) = v;
      e(col++) = v;
    }
  }
  return e;
}

Eigen::MatrixXd membrane_modes(const MembraneModel& model) {
  const Index nr = model.r_grid().size();
  const Index nt = model.theta_grid().size();
  const int big_m = model.max_order();
  const int big_n = model.radial_modes();
  Eigen::MatrixXd psi(model.grid_size(), model.coefficient_count());

  // Radial profiles J_m(z_mn r / a) on the r grid, reused across theta.
  std::vector<Eigen::VectorXd> radial(static_cast<std::size_t>((big_m + 1) * big_n));
  parallel_for(radial.size(), [&](std::size_t idx) {
    const int m = static_cast<int>(idx) / big_n;
    const int n = static_cast<int>(idx) % big_n;
    Eigen::VectorXd prof(nr);
    for (Index i = 0; i < nr; ++i) {
      prof(i) = bessel_j(m, model.zeros()(m, n) * model.r_grid()(i) / model.radius());
    }
    // the rim is a zero by construction; pin it against round-off
    prof(nr - 1) = 0.0;
    radial[idx] = std::move(prof);
  });

  for (Index j = 0; j < nt; ++j) {
    const double theta = model.theta_grid()(j);
    auto block = psi.middleRows(j * nr, nr);
    Index col = 0;
    for (int n = 0; n < big_n; ++n) block.col(col++) = radial[static_cast<std::size_t>(n)];
    for (int m = 1; m <= big_m; ++m) {
      const double cm = std::cos(m * theta);
      const double sm = std::sin(m * theta);
      for (int n = 0; n < big_n; ++n) {
        const auto& prof = radial[static_cast<std::size_t>(m * big_n + n)];
        block.col(col++) = cm * prof;
        block.col(col++) = sm * prof;
      }
    }
  }
  return psi;
}

Basis membrane_basis(const MembraneModel& model) {
  Provenance meta{
      {"source", "membrane"},
      {"row_order", "theta-major"},
      {"theta_range", "(-pi, pi]"},
      {"r_points", std::to_string(model.r_grid().size())},
      {"theta_points", std::to_string(model.theta_grid().size())},
      {"max_order", std::to_string(model.max_order())},
      {"radial_modes", std::to_string(model.radial_modes())},
  };
  return Basis(membrane_modes(model), BasisKind::analytic, std::move(meta));
}

namespace {

void check_coefficients(const MembraneModel& model, const Eigen::VectorXd& b) {
  if (b.size() != model.coefficient_count()) {
    throw InvalidArgument("coefficient vector has length " + std::to_string(b.size()) +
                          ", expected " + std::to_string(model.coefficient_count()));
  }
  if (!b.allFinite()) throw InvalidArgument("coefficients must be finite");
}

}  // namespace

Eigen::VectorXd evolve(const MembraneModel& model, const Eigen::MatrixXd& psi,
                       const Eigen::VectorXd& b, double t) {
  check_coefficients(model, b);
  if (!(t >= 0.0)) throw InvalidArgument("evolve needs t >= 0");
  if (psi.cols() != b.size()) throw InvalidArgument("basis does not match coefficient vector");
  const Eigen::VectorXd w = model.column_frequencies();
  return psi * (w * t).array().cos().matrix().cwiseProduct(b);
}

Eigen::VectorXd evolve(const MembraneModel& model, const Eigen::VectorXd& b, double t) {
  return evolve(model, membrane_modes(model), b, t);
}

Eigen::MatrixXd membrane_snapshots(const MembraneModel& model, const Eigen::MatrixXd& psi,
                                   const Eigen::VectorXd& b, const std::vector<double>& times) {
  check_coefficients(model, b);
  const Eigen::VectorXd w = model.column_frequencies();
  Eigen::MatrixXd c(b.size(), static_cast<Index>(times.size()));
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] >= 0.0)) throw InvalidArgument("snapshot times must be non-negative");
    c.col(static_cast<Index>(k)) = (w * times[k]).array().cos().matrix().cwiseProduct(b);
  }
  return psi * c;
}

Eigen::VectorXd sample_coefficients(const MembraneModel& model, std::uint64_t seed,
                                    std::uint64_t draw) {
  auto engine = make_engine(seed, Stream::membrane_coefficients, draw);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd b = model.coefficient_envelope();
  for (Index i = 0; i < b.size(); ++i) b(i) *= normal(engine);
  return b;
}

double radial_cost_at(double r) { return 0.6 + 0.5 * std::cos(2.0 * std::numbers::pi * r / 13.0); }

Eigen::VectorXd radial_cost(const MembraneModel& model) {
  Eigen::VectorXd eta(model.grid_size());
  for (Index row = 0; row < eta.size(); ++row) eta(row) = radial_cost_at(model.row_radius(row));
  return eta;
}

std::vector<double> time_grid(double step, double t_end) {
  if (!(step > 0.0) || !(t_end >= 0.0)) throw InvalidArgument("time grid needs step > 0, t_end >= 0");
  const auto count = static_cast<std::size_t>(std::floor(t_end / step + 1e-9)) + 1;
  std::vector<double> t(count);
  for (std::size_t k = 0; k < count; ++k) t[k] = static_cast<double>(k) * step;
  return t;
}

MembraneErrorEvaluator::MembraneErrorEvaluator(const MembraneModel& model, const Eigen::MatrixXd& psi,
                                               const std::vector<Eigen::VectorXd>& initial_conditions,
                                               const std::vector<double>& times)
    : psi_(psi) {
  if (psi.cols() != model.coefficient_count() || psi.rows() != model.grid_size()) {
    throw InvalidArgument("basis does not match the membrane model");
  }
  if (initial_conditions.empty() || times.empty()) {
    throw InvalidArgument("error evaluator needs initial conditions and times");
  }
  gram_ = psi.transpose() * psi;
  const Eigen::VectorXd w = model.column_frequencies();
  for (const auto& b : initial_conditions) {
    check_coefficients(model, b);
    Eigen::MatrixXd c(b.size(), static_cast<Index>(times.size()));
    for (std::size_t k = 0; k < times.size(); ++k) {
      c.col(static_cast<Index>(k)) = (w * times[k]).array().cos().matrix().cwiseProduct(b);
    }
    Eigen::MatrixXd s = c * c.transpose();
    const double norm2 = gram_.cwiseProduct(s).sum();
    if (!(norm2 > 0.0)) throw InvalidArgument("initial condition has zero energy on the grid");
    second_moments_.push_back(std::move(s));
    norms_.push_back(norm2);
  }
}

std::vector<double> MembraneErrorEvaluator::errors(const Selection& sel) const {
  Eigen::MatrixXd theta(sel.size(), psi_.cols());
  for (Index k = 0; k < sel.size(); ++k) {
    const Index row = sel.indices[static_cast<std::size_t>(k)];
    if (row < 0 || row >= psi_.rows()) throw InvalidArgument("sensor index out of range");
    theta.row(k) = psi_.row(row);
  }
  if (theta.cwiseAbs().maxCoeff() == 0.0) throw NumericalError("measurement matrix is all zero");
  const Index r = psi_.cols();
  const Eigen::MatrixXd e = Eigen::MatrixXd::Identity(r, r) - pseudo_inverse(theta) * theta;
  const Eigen::MatrixXd k = e.transpose() * gram_ * e;
  std::vector<double> out(second_moments_.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::sqrt(std::max(0.0, k.cwiseProduct(second_moments_[i]).sum() / norms_[i]));
  }
  return out;
}

double MembraneErrorEvaluator::mean_error(const Selection& sel) const {
  const auto e = errors(sel);
  double acc = 0.0;
  for (const double v : e) acc += v;
  return acc / static_cast<double>(e.size());
}

std::vector<ParetoPoint> membrane_benchmark(const MembraneModel& model, Index p,
                                            const std::vector<double>& gammas, Index n_ic,
                                            const std::vector<double>& times, std::uint64_t seed) {
  if (p < 1 || p > model.coefficient_count()) {
    throw InvalidArgument("membrane benchmark needs 1 <= p <= " +
                          std::to_string(model.coefficient_count()));
  }
  if (n_ic < 1) throw InvalidArgument("membrane benchmark needs at least one initial condition");
  const Basis basis = membrane_basis(model);
  std::vector<Eigen::VectorXd> ics;
  for (Index i = 0; i < n_ic; ++i) ics.push_back(sample_coefficients(model, seed, static_cast<std::uint64_t>(i)));
  const MembraneErrorEvaluator evaluator(model, basis.real_modes(), ics, times);
  const CostField cost(radial_cost(model), 0.0);
  return pareto_sweep(basis, cost, gammas, p,
                      Evaluator{"fractional_error",
                                [&](const Selection& s) { return evaluator.mean_error(s); }});
}

}  // namespace sensorsel
