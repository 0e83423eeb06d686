#ifndef SENSORSEL_RECONSTRUCTION_HPP
#define SENSORSEL_RECONSTRUCTION_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include <sensorsel/linalg.hpp>
#include <sensorsel/pivoting.hpp>

namespace sensorsel {

/// n x m real data matrix whose columns are full-state snapshots.
class SnapshotMatrix {
 public:
  explicit SnapshotMatrix(Eigen::MatrixXd data);
  /// Time-stamped snapshots; stamps must be strictly increasing, one per column.
  SnapshotMatrix(Eigen::MatrixXd data, std::vector<double> times);

  const Eigen::MatrixXd& data() const noexcept { return data_; }
  Index states() const noexcept { return data_.rows(); }
  Index snapshots() const noexcept { return data_.cols(); }
  const std::optional<std::vector<double>>& times() const noexcept { return times_; }

  /// Uniform spacing of the time stamps, if stamped and uniform to 1e-9 relative.
  std::optional<double> uniform_dt() const;

 private:
  Eigen::MatrixXd data_;
  std::optional<std::vector<double>> times_;
};

enum class BasisKind { svd, randomized, dmd, balanced_direct, balanced_adjoint, analytic };

std::string_view to_string(BasisKind kind);
/// Throws InvalidArgument for unknown names.
BasisKind basis_kind_from_string(std::string_view name);

/// Metadata is kept ordered so that persisted files are stable.
using Provenance = std::map<std::string, std::string>;

/// n x r modes (real or complex). Orthonormality is not required.
class Basis {
 public:
  using Modes = std::variant<Eigen::MatrixXd, Eigen::MatrixXcd>;

  Basis(Eigen::MatrixXd modes, BasisKind kind, Provenance provenance = {});
  Basis(Eigen::MatrixXcd modes, BasisKind kind, Provenance provenance = {});

  Index rows() const noexcept;
  Index cols() const noexcept;
  bool is_complex() const noexcept { return std::holds_alternative<Eigen::MatrixXcd>(modes_); }
  BasisKind kind() const noexcept { return kind_; }
  const Provenance& provenance() const noexcept { return provenance_; }
  Provenance& provenance() noexcept { return provenance_; }

  const Modes& modes() const noexcept { return modes_; }
  /// Throws InvalidArgument when the basis is complex.
  const Eigen::MatrixXd& real_modes() const;
  /// Complex view (a copy for real bases).
  Eigen::MatrixXcd complex_modes() const;

 private:
  void validate() const;

  Modes modes_;
  BasisKind kind_;
  Provenance provenance_;
};

/// Cost-constrained pivoted QR on the adjoint of `basis`. An empty `cost.eta`
/// means zero cost everywhere.
Selection select_on_basis(const Basis& basis, const CostField& cost, Index p);
/// As above, choosing only among the `allowed` rows; indices are returned in
/// the basis' row numbering.
Selection select_on_basis(const Basis& basis, const CostField& cost, Index p,
                          std::span<const Index> allowed);

/// Rows `sel.indices` of X, in pivot order.
Eigen::MatrixXd measure(const Eigen::MatrixXd& x, const Selection& sel);
Eigen::MatrixXd measure(const SnapshotMatrix& x, const Selection& sel);

/// Precomputed minimum-norm least-squares map from measurements to the full
/// state: X_hat = Re(Psi * pinv(C Psi) * Y).
class Reconstructor {
 public:
  Reconstructor(const Basis& basis, const Selection& sel, double rel_tol = 1e-12);

  Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& y) const;
  /// Least-squares coefficients a_hat = pinv(Theta) Y (complex for complex bases).
  Eigen::MatrixXcd coefficients(const Eigen::MatrixXd& y) const;

  Index sensors() const noexcept { return sensors_; }

 private:
  Index sensors_;
  Basis::Modes psi_;
  Basis::Modes theta_pinv_;
};

Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& y, const Basis& basis, const Selection& sel);

/// ||X - X_hat||_F / ||X||_F.
double fractional_error(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_hat);

struct ParetoPoint {
  double gamma = 0.0;
  double total_cost = 0.0;
  double error = 0.0;
  std::string metric_name;
  Selection selection;
};

/// Scores a selection (reconstruction error, Gramian proxy, LQG cost, ...).
struct Evaluator {
  std::string metric_name;
  std::function<double(const Selection&)> evaluate;
};

/// Produces the selection for a given gamma.
using Selector = std::function<Selection(double gamma)>;

std::vector<ParetoPoint> pareto_sweep(const Selector& select, const std::vector<double>& gammas,
                                      const Evaluator& evaluator);

/// Convenience form: cost-constrained QR on the adjoint of `basis` with the
/// template cost's eta and each swept gamma.
std::vector<ParetoPoint> pareto_sweep(const Basis& basis, const CostField& cost,
                                      const std::vector<double>& gammas, Index p,
                                      const Evaluator& evaluator);

/// `trials` uniform p-subsets of [0, n). Trial t draws from its own stream
/// derived from (seed, t). Costs are attached when `eta` is non-empty.
std::vector<Selection> random_selections(Index n, Index p, Index trials, std::uint64_t seed,
                                         const Eigen::VectorXd& eta = {});

/// Partial Fisher-Yates draw of p distinct indices from `pool`.
std::vector<Index> sample_without_replacement(std::vector<Index> pool, Index p,
                                              std::mt19937_64& engine);

/// CSV header `gamma,total_cost,error,metric,indices`.
void write_pareto_csv(std::ostream& out, const std::vector<ParetoPoint>& points);
/// CSV header `rank,index,cost`.
void write_selection_csv(std::ostream& out, const Selection& sel);

}  // namespace sensorsel

#endif  // SENSORSEL_RECONSTRUCTION_HPP
