#include <sensorsel/reconstruction.hpp>

#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include <sensorsel/errors.hpp>
#include <sensorsel/format.hpp>
#include <sensorsel/parallel.hpp>
#include <sensorsel/rng.hpp>

namespace sensorsel {

SnapshotMatrix::SnapshotMatrix(Eigen::MatrixXd data) : data_(std::move(data)) {
  if (data_.cols() < 1 || data_.rows() < 1) throw InvalidArgument("snapshot matrix is empty");
  if (!data_.allFinite()) throw InvalidArgument("snapshot matrix has non-finite entries");
}

SnapshotMatrix::SnapshotMatrix(Eigen::MatrixXd data, std::vector<double> times)
    : SnapshotMatrix(std::move(data)) {
  if (static_cast<Index>(times.size()) != data_.cols()) {
    throw InvalidArgument("one time stamp per snapshot required");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw InvalidArgument("time stamps must strictly increase");
  }
  times_ = std::move(times);
}

std::optional<double> SnapshotMatrix::uniform_dt() const {
  if (!times_ || times_->size() < 2) return std::nullopt;
  const auto& t = *times_;
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::abs((t[i] - t[i - 1]) - dt) > 1e-9 * std::abs(dt)) return std::nullopt;
  }
  return dt;
}

std::string_view to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::svd: return "svd";
    case BasisKind::randomized: return "randomized";
    case BasisKind::dmd: return "dmd";
    case BasisKind::balanced_direct: return "balanced-direct";
    case BasisKind::balanced_adjoint: return "balanced-adjoint";
    case BasisKind::analytic: return "analytic";
  }
  return "unknown";
}

BasisKind basis_kind_from_string(std::string_view name) {
  for (const auto kind : {BasisKind::svd, BasisKind::randomized, BasisKind::dmd,
                          BasisKind::balanced_direct, BasisKind::balanced_adjoint,
                          BasisKind::analytic}) {
    if (to_string(kind) == name) return kind;
  }
  throw InvalidArgument("unknown basis kind '" + std::string(name) + "'");
}

Basis::Basis(Eigen::MatrixXd modes, BasisKind kind, Provenance provenance)
    : modes_(std::move(modes)), kind_(kind), provenance_(std::move(provenance)) {
  validate();
}

Basis::Basis(Eigen::MatrixXcd modes, BasisKind kind, Provenance provenance)
    : modes_(std::move(modes)), kind_(kind), provenance_(std::move(provenance)) {
  validate();
}

void Basis::validate() const {
  std::visit(
      [](const auto& m) {
        if (m.rows() < 1 || m.cols() < 1) throw InvalidArgument("basis needs at least one mode");
        if (!m.allFinite()) throw InvalidArgument("basis has non-finite entries");
      },
      modes_);
}

Index Basis::rows() const noexcept {
  return std::visit([](const auto& m) { return m.rows(); }, modes_);
}

Index Basis::cols() const noexcept {
  return std::visit([](const auto& m) { return m.cols(); }, modes_);
}

const Eigen::MatrixXd& Basis::real_modes() const {
  if (is_complex()) throw InvalidArgument("basis is complex");
  return std::get<Eigen::MatrixXd>(modes_);
}

Eigen::MatrixXcd Basis::complex_modes() const {
  if (is_complex()) return std::get<Eigen::MatrixXcd>(modes_);
  return std::get<Eigen::MatrixXd>(modes_).cast<Complex>();
}

Selection select_on_basis(const Basis& basis, const CostField& cost, Index p) {
  const CostField effective =
      cost.eta.size() == 0 ? CostField::uniform(basis.rows(), 0.0, cost.gamma) : cost;
  return std::visit(
      [&](const auto& m) {
        using Scalar = typename std::decay_t<decltype(m)>::Scalar;
        const CandidateMatrix<Scalar> v(m.adjoint());
        return qr_pivot_select_cost(v, effective, p);
      },
      basis.modes());
}

Selection select_on_basis(const Basis& basis, const CostField& cost, Index p,
                          std::span<const Index> allowed) {
  const CostField effective =
      cost.eta.size() == 0 ? CostField::uniform(basis.rows(), 0.0, cost.gamma) : cost;
  effective.validate(basis.rows());
  return std::visit(
      [&](const auto& m) {
        using Scalar = typename std::decay_t<decltype(m)>::Scalar;
        const auto restricted = restrict_candidates(CandidateMatrix<Scalar>(m.adjoint()), allowed);
        const Selection local =
            qr_pivot_select_cost(restricted.matrix, restricted.restrict_cost(effective), p);
        return restricted.to_original_selection(local);
      },
      basis.modes());
}

Eigen::MatrixXd measure(const Eigen::MatrixXd& x, const Selection& sel) {
  Eigen::MatrixXd y(sel.size(), x.cols());
  for (Index k = 0; k < sel.size(); ++k) {
    const Index j = sel.indices[static_cast<std::size_t>(k)];
    if (j < 0 || j >= x.rows()) {
      throw InvalidArgument("selection index " + std::to_string(j) + " out of range for " +
                            std::to_string(x.rows()) + " states");
    }
    y.row(k) = x.row(j);
  }
  return y;
}

Eigen::MatrixXd measure(const SnapshotMatrix& x, const Selection& sel) {
  return measure(x.data(), sel);
}

Reconstructor::Reconstructor(const Basis& basis, const Selection& sel, double rel_tol)
    : sensors_(sel.size()), psi_(basis.modes()) {
  if (sel.size() < 1) throw InvalidArgument("reconstruction needs at least one sensor");
  theta_pinv_ = std::visit(
      [&](const auto& m) -> Basis::Modes {
        using MatrixType = std::decay_t<decltype(m)>;
        MatrixType theta(sel.size(), m.cols());
        for (Index k = 0; k < sel.size(); ++k) {
          const Index j = sel.indices[static_cast<std::size_t>(k)];
          if (j < 0 || j >= m.rows()) throw InvalidArgument("selection index out of basis range");
          theta.row(k) = m.row(j);
        }
        if (theta.cwiseAbs().maxCoeff() == 0.0) {
          throw NumericalError("measurement matrix C*Psi is identically zero");
        }
        return MatrixType(pseudo_inverse(theta, rel_tol));
      },
      basis.modes());
}

Eigen::MatrixXcd Reconstructor::coefficients(const Eigen::MatrixXd& y) const {
  if (y.rows() != sensors_) throw InvalidArgument("measurement rows do not match sensor count");
  return std::visit(
      [&](const auto& pinv) -> Eigen::MatrixXcd { return (pinv * y).template cast<Complex>(); },
      theta_pinv_);
}

Eigen::MatrixXd Reconstructor::reconstruct(const Eigen::MatrixXd& y) const {
  if (y.rows() != sensors_) throw InvalidArgument("measurement rows do not match sensor count");
  if (std::holds_alternative<Eigen::MatrixXd>(psi_)) {
    const auto& psi = std::get<Eigen::MatrixXd>(psi_);
    const auto& pinv = std::get<Eigen::MatrixXd>(theta_pinv_);
    return psi * (pinv * y);
  }
  const auto& psi = std::get<Eigen::MatrixXcd>(psi_);
  const auto& pinv = std::get<Eigen::MatrixXcd>(theta_pinv_);
  const Eigen::MatrixXcd a = pinv * y.cast<Complex>();
  return (psi * a).real();
}

Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& y, const Basis& basis, const Selection& sel) {
  return Reconstructor(basis, sel).reconstruct(y);
}

double fractional_error(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_hat) {
  if (x.rows() != x_hat.rows() || x.cols() != x_hat.cols()) {
    throw InvalidArgument("fractional_error: shape mismatch");
  }
  const double denom = x.norm();
  if (!(denom > 0.0)) throw InvalidArgument("fractional_error: reference has zero norm");
  return (x - x_hat).norm() / denom;
}

std::vector<ParetoPoint> pareto_sweep(const Selector& select, const std::vector<double>& gammas,
                                      const Evaluator& evaluator) {
  if (gammas.empty()) throw InvalidArgument("gamma grid is empty");
  for (const double g : gammas) {
    if (!std::isfinite(g) || g < 0.0) throw InvalidArgument("gamma values must be non-negative");
  }
  std::vector<ParetoPoint> points(gammas.size());
  parallel_for(gammas.size(), [&](std::size_t i) {
    ParetoPoint& pt = points[i];
    pt.gamma = gammas[i];
    pt.selection = select(gammas[i]);
    pt.total_cost = pt.selection.total_cost;
    pt.error = evaluator.evaluate(pt.selection);
    pt.metric_name = evaluator.metric_name;
  });
  return points;
}

std::vector<ParetoPoint> pareto_sweep(const Basis& basis, const CostField& cost,
                                      const std::vector<double>& gammas, Index p,
                                      const Evaluator& evaluator) {
  cost.validate(basis.rows());
  return pareto_sweep(
      [&](double gamma) { return select_on_basis(basis, CostField(cost.eta, gamma), p); }, gammas,
      evaluator);
}

std::vector<Index> sample_without_replacement(std::vector<Index> pool, Index p,
                                              std::mt19937_64& engine) {
  const auto n = static_cast<Index>(pool.size());
  if (p < 0 || p > n) throw InvalidArgument("cannot draw more indices than available");
  for (Index i = 0; i < p; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(engine))]);
  }
  pool.resize(static_cast<std::size_t>(p));
  return pool;
}

std::vector<Selection> random_selections(Index n, Index p, Index trials, std::uint64_t seed,
                                         const Eigen::VectorXd& eta) {
  if (p < 1 || p > n) throw InvalidArgument("random_selections requires 1 <= p <= n");
  if (trials < 1) throw InvalidArgument("random_selections requires at least one trial");
  std::vector<Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Index{0});
  std::vector<Selection> out(static_cast<std::size_t>(trials));
  for (Index t = 0; t < trials; ++t) {
    auto engine = make_engine(seed, Stream::random_arrays, static_cast<std::uint64_t>(t));
    out[static_cast<std::size_t>(t)] =
        Selection::from_indices(sample_without_replacement(all, p, engine), n, eta);
  }
  return out;
}

void write_pareto_csv(std::ostream& out, const std::vector<ParetoPoint>& points) {
  out << "gamma,total_cost,error,metric,indices\n";
  for (const auto& pt : points) {
    out << format_double(pt.gamma) << ',' << format_double(pt.total_cost) << ','
        << format_double(pt.error) << ',' << pt.metric_name << ',';
    for (std::size_t i = 0; i < pt.selection.indices.size(); ++i) {
      if (i) out << ';';
      out << pt.selection.indices[i];
    }
    out << '\n';
  }
}

void write_selection_csv(std::ostream& out, const Selection& sel) {
  out << "rank,index,cost\n";
  for (std::size_t k = 0; k < sel.indices.size(); ++k) {
    out << k << ',' << sel.indices[k] << ',' << format_double(sel.costs[k]) << '\n';
  }
}

}  // namespace sensorsel
