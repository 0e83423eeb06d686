#include <sensorsel/dmd.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <sensorsel/errors.hpp>
#include <sensorsel/rng.hpp>

namespace sensorsel {

Basis DMDModel::basis() const {
  return Basis(modes, BasisKind::dmd,
               {{"rank", std::to_string(rank())}, {"snapshots", std::to_string(snapshots)}});
}

namespace {

// |lambda| descending; within a magnitude tie, imaginary part descending so
// conjugate pairs sit next to each other with the positive member first.
std::vector<Index> eigen_order(const Eigen::VectorXcd& lambda) {
  std::vector<Index> order(static_cast<std::size_t>(lambda.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(lambda(a)) > std::abs(lambda(b));
  });
  std::size_t begin = 0;
  while (begin < order.size()) {
    std::size_t end = begin + 1;
    const double mag = std::abs(lambda(order[begin]));
    while (end < order.size() &&
           std::abs(std::abs(lambda(order[end])) - mag) <= 1e-12 * std::max(1.0, mag)) {
      ++end;
    }
    std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(begin),
                     order.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](Index a, Index b) { return lambda(a).imag() > lambda(b).imag(); });
    begin = end;
  }
  return order;
}

}  // namespace

DMDModel fit_dmd(const Eigen::MatrixXd& x, Index r, double dt) {
  const Index n = x.rows();
  const Index m = x.cols();
  if (m < 2) throw InvalidArgument("DMD needs at least two snapshots");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("DMD time step must be positive");
  if (r < 1 || r > std::min(n, m - 1)) {
    throw InvalidArgument("DMD rank r=" + std::to_string(r) + " must lie in [1, " +
                          std::to_string(std::min(n, m - 1)) + "]");
  }
  if (!x.allFinite()) throw InvalidArgument("DMD input has non-finite entries");

  const Eigen::MatrixXd x1 = x.leftCols(m - 1);
  const Eigen::MatrixXd x2 = x.rightCols(m - 1);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x1, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (!(s(0) > 0.0)) throw NumericalError("DMD input snapshots are all zero");

  DMDModel model;
  model.dt = dt;
  model.snapshots = m;
  Index rank = r;
  while (rank > 1 && s(rank - 1) <= 1e-12 * s(0)) --rank;
  if (rank < r) {
    model.warnings.push_back("rank reduced from " + std::to_string(r) + " to " +
                             std::to_string(rank) + ": X1 is numerically rank deficient");
  }

  const Eigen::MatrixXd u = svd.matrixU().leftCols(rank);
  const Eigen::MatrixXd v = svd.matrixV().leftCols(rank);
  const Eigen::VectorXd inv_s = s.head(rank).cwiseInverse();
  const Eigen::MatrixXd x2_v_sinv = x2 * v * inv_s.asDiagonal();
  model.reduced_operator = u.transpose() * x2_v_sinv;

  Eigen::EigenSolver<Eigen::MatrixXd> eig(model.reduced_operator, true);
  if (eig.info() != Eigen::Success) throw NumericalError("DMD eigendecomposition failed");
  const Eigen::VectorXcd raw_lambda = eig.eigenvalues();
  const Eigen::MatrixXcd raw_w = eig.eigenvectors();

  const auto order = eigen_order(raw_lambda);
  model.lambda.resize(rank);
  model.eigenvectors.resize(rank, rank);
  for (Index i = 0; i < rank; ++i) {
    model.lambda(i) = raw_lambda(order[static_cast<std::size_t>(i)]);
    model.eigenvectors.col(i) = raw_w.col(order[static_cast<std::size_t>(i)]);
  }

  model.modes = x2_v_sinv.cast<Complex>() * model.eigenvectors;
  model.omega.resize(rank);
  model.nyquist_adjacent.assign(static_cast<std::size_t>(rank), false);
  for (Index i = 0; i < rank; ++i) {
    model.omega(i) = std::log(model.lambda(i)) / dt;
    if (std::abs(std::arg(model.lambda(i))) > std::numbers::pi - 1e-6) {
      model.nyquist_adjacent[static_cast<std::size_t>(i)] = true;
    }
  }
  if (std::any_of(model.nyquist_adjacent.begin(), model.nyquist_adjacent.end(),
                  [](bool b) { return b; })) {
    model.warnings.push_back("eigenvalues near the negative real axis; omega is branch sensitive");
  }
  model.amplitudes = pseudo_inverse(model.modes) * x.col(0).cast<Complex>();
  return model;
}

Eigen::VectorXd dmd_predict(const DMDModel& model, Index k) {
  if (k < 1) throw InvalidArgument("DMD prediction index k must be >= 1");
  Eigen::VectorXcd coeff(model.rank());
  for (Index i = 0; i < model.rank(); ++i) {
    coeff(i) = std::pow(model.lambda(i), static_cast<double>(k - 1)) * model.amplitudes(i);
  }
  return (model.modes * coeff).real();
}

Eigen::VectorXd dmd_predict_time(const DMDModel& model, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("DMD prediction time must be non-negative");
  Eigen::VectorXcd coeff(model.rank());
  for (Index i = 0; i < model.rank(); ++i) {
    coeff(i) = std::exp(model.omega(i) * t) * model.amplitudes(i);
  }
  return (model.modes * coeff).real();
}

namespace {

std::pair<Index, Index> split_sizes(Index m, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("train fraction must lie in (0, 1)");
  }
  const auto train = static_cast<Index>(std::floor(train_fraction * static_cast<double>(m)));
  if (train < 2) throw InvalidArgument("training block needs at least two snapshots");
  if (m - train < 1) throw InvalidArgument("test block needs at least one snapshot");
  return {train, m - train};
}

SplitErrors split_errors_with(const Eigen::MatrixXd& x, Index train, const DMDModel& model,
                              const Selection& selection) {
  const Reconstructor rec(model.basis(), selection);
  const Eigen::MatrixXd x_tr = x.leftCols(train);
  const Eigen::MatrixXd x_te = x.rightCols(x.cols() - train);
  SplitErrors out;
  out.interpolation = fractional_error(x_tr, rec.reconstruct(measure(x_tr, selection)));
  out.extrapolation = fractional_error(x_te, rec.reconstruct(measure(x_te, selection)));
  out.selection = selection;
  out.train_snapshots = train;
  out.test_snapshots = x.cols() - train;
  return out;
}

}  // namespace

SplitErrors train_test_split_errors(const Eigen::MatrixXd& x, double train_fraction, Index r,
                                    const Selection& selection, double dt) {
  const auto [train, test] = split_sizes(x.cols(), train_fraction);
  (void)test;
  const DMDModel model = fit_dmd(x.leftCols(train), r, dt);
  return split_errors_with(x, train, model, selection);
}

SplitErrors train_test_split_errors(const Eigen::MatrixXd& x, double train_fraction, Index r,
                                    Index p, const CostField& cost, double dt) {
  const auto [train, test] = split_sizes(x.cols(), train_fraction);
  (void)test;
  const DMDModel model = fit_dmd(x.leftCols(train), r, dt);
  const Selection sel = select_on_basis(model.basis(), cost, p);
  return split_errors_with(x, train, model, sel);
}

Eigen::MatrixXd realified_propagator(const Eigen::VectorXcd& lambda) {
  const Index r = lambda.size();
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(2 * r, 2 * r);
  for (Index i = 0; i < r; ++i) {
    f(i, i) = lambda(i).real();
    f(i, r + i) = -lambda(i).imag();
    f(r + i, i) = lambda(i).imag();
    f(r + i, r + i) = lambda(i).real();
  }
  return f;
}

Eigen::MatrixXd realified_measurement(const Eigen::MatrixXcd& theta) {
  Eigen::MatrixXd h(theta.rows(), 2 * theta.cols());
  h.leftCols(theta.cols()) = theta.real();
  h.rightCols(theta.cols()) = -theta.imag();
  return h;
}

double relative_noise_variance(const Eigen::MatrixXd& x, double level) {
  if (x.cols() < 1) throw InvalidArgument("noise level needs at least one snapshot");
  const Eigen::VectorXd mean = x.rowwise().mean();
  const double var = (x.colwise() - mean).squaredNorm() / static_cast<double>(x.size());
  return level * var;
}

KalmanResult kalman_estimate(const DMDModel& model, const Selection& sel,
                             const Eigen::MatrixXd& measurements, double noise_var,
                             const KalmanOptions& options) {
  if (!(noise_var > 0.0) || !std::isfinite(noise_var)) {
    throw InvalidArgument("measurement noise variance must be positive");
  }
  if (measurements.rows() != sel.size()) {
    throw InvalidArgument("measurement rows do not match the sensor count");
  }
  const Index r = model.rank();
  const Index dim = 2 * r;
  const Index p = sel.size();

  Eigen::MatrixXcd theta(p, r);
  for (Index k = 0; k < p; ++k) {
    const Index j = sel.indices[static_cast<std::size_t>(k)];
    if (j < 0 || j >= model.states()) throw InvalidArgument("sensor index out of range");
    theta.row(k) = model.modes.row(j);
  }
  const Eigen::MatrixXd f = realified_propagator(model.lambda);
  const Eigen::MatrixXd h = realified_measurement(theta);
  const Eigen::MatrixXd q = options.process_noise * Eigen::MatrixXd::Identity(dim, dim);
  const Eigen::MatrixXd noise = noise_var * Eigen::MatrixXd::Identity(p, p);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);

  KalmanResult out;
  out.amplitudes.resize(r, measurements.cols());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  Eigen::MatrixXd cov = options.initial_covariance * eye;
  out.min_eigenvalue = options.initial_covariance;

  for (Index k = 0; k < measurements.cols(); ++k) {
    if (k > 0) {
      mean = f * mean;
      cov = f * cov * f.transpose() + q;
    }
    const Eigen::MatrixXd s = h * cov * h.transpose() + noise;
    const Eigen::LDLT<Eigen::MatrixXd> s_fact(s);
    const Eigen::MatrixXd gain = s_fact.solve(h * cov).transpose();
    mean += gain * (measurements.col(k) - h * mean);
    const Eigen::MatrixXd joseph = eye - gain * h;
    cov = joseph * cov * joseph.transpose() + gain * noise * gain.transpose();

    out.max_asymmetry = std::max(out.max_asymmetry, (cov - cov.transpose()).cwiseAbs().maxCoeff());
    cov = 0.5 * (cov + cov.transpose());
    if (!cov.allFinite() || cov.trace() > options.divergence_trace) {
      throw NumericalError("Kalman filter diverged at step " + std::to_string(k));
    }
    out.amplitudes.col(k) = mean.head(r).cast<Complex>() + Complex(0.0, 1.0) * mean.tail(r).cast<Complex>();
  }

  if (dim <= 64) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
    out.min_eigenvalue = es.eigenvalues().minCoeff();
  }
  out.states = (model.modes * out.amplitudes).real();
  out.final_state = KalmanState{mean, cov};
  return out;
}

Eigen::MatrixXd synthetic_quasi_periodic_field(const SyntheticFieldOptions& options) {
  if (options.points < 2 || options.snapshots < 2) {
    throw InvalidArgument("synthetic field needs at least two points and two snapshots");
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  struct Wave {
    double amplitude, wavenumber, frequency, phase;
  };
  const Wave waves[] = {
      {1.0, 1.0, 0.9, 0.0},
      {0.6, 3.0, 2.0 * std::numbers::sqrt2, 0.7},
      {0.35, 7.0, std::numbers::pi * 1.3, 1.9},
  };
  const double bump_amplitude = 0.8;
  const double bump_width = 0.05;
  const double bump_start = 0.2;
  const double bump_speed = 0.5 / (static_cast<double>(options.snapshots) * options.dt);

  Eigen::MatrixXd x(options.points, options.snapshots);
  for (Index k = 0; k < options.snapshots; ++k) {
    const double t = static_cast<double>(k) * options.dt;
    for (Index i = 0; i < options.points; ++i) {
      const double s = static_cast<double>(i) / static_cast<double>(options.points);
      double value = 0.0;
      for (const auto& w : waves) {
        value += w.amplitude * std::sin(two_pi * w.wavenumber * s - w.frequency * t + w.phase);
      }
      double d = s - (bump_start + bump_speed * t);
      d -= std::round(d);
      value += bump_amplitude * std::exp(-d * d / (2.0 * bump_width * bump_width));
      x(i, k) = value;
    }
  }
  if (options.noise > 0.0) {
    auto engine = make_engine(options.seed, Stream::synthetic_field, 0);
    std::normal_distribution<double> normal(0.0, options.noise);
    for (Index k = 0; k < x.cols(); ++k) {
      for (Index i = 0; i < x.rows(); ++i) x(i, k) += normal(engine);
    }
  }
  return x;
}

CoastalCost coastal_cost(const Eigen::MatrixXd& mask, Index distance, double low, double high,
                         bool wrap_columns) {
  if (mask.size() == 0) throw InvalidArgument("land mask is empty");
  if (distance < 0) throw InvalidArgument("coastal distance must be non-negative");
  if (!(low >= 0.0) || !(high >= 0.0)) throw InvalidArgument("costs must be non-negative");
  const Index rows = mask.rows();
  const Index cols = mask.cols();
  auto is_sea = [&](Index i, Index j) { return mask(i, j) != 0.0; };

  CoastalCost out;
  out.eta = Eigen::VectorXd::Constant(rows * cols, high);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      const double v = mask(i, j);
      if (v != 0.0 && v != 1.0) throw InvalidArgument("land mask entries must be 0 or 1");
      if (!is_sea(i, j)) continue;
      const Index flat = i * cols + j;
      out.sea_cells.push_back(flat);
      bool near_land = false;
      for (Index di = -distance; di <= distance && !near_land; ++di) {
        const Index ii = i + di;
        if (ii < 0 || ii >= rows) continue;
        for (Index dj = -distance; dj <= distance; ++dj) {
          Index jj = j + dj;
          if (wrap_columns) {
            jj = ((jj % cols) + cols) % cols;
          } else if (jj < 0 || jj >= cols) {
            continue;
          }
          if (!is_sea(ii, jj)) {
            near_land = true;
            break;
          }
        }
      }
      if (near_land) out.eta(flat) = low;
    }
  }
  return out;
}

}  // namespace sensorsel
