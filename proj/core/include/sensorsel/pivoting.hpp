#ifndef SENSORSEL_PIVOTING_HPP
#define SENSORSEL_PIVOTING_HPP

#include <span>
#include <vector>

#include <Eigen/Core>

#include <sensorsel/linalg.hpp>

namespace sensorsel {

/// The r x n matrix whose columns are candidate locations (in practice the
/// adjoint of a basis). Entries are validated finite on construction.
template <typename Scalar>
class CandidateMatrix {
 public:
  using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  explicit CandidateMatrix(MatrixType entries);

  const MatrixType& entries() const noexcept { return entries_; }
  Index modes() const noexcept { return entries_.rows(); }
  Index locations() const noexcept { return entries_.cols(); }

 private:
  MatrixType entries_;
};

using RealCandidates = CandidateMatrix<double>;
using ComplexCandidates = CandidateMatrix<Complex>;

/// Per-location non-negative cost and its weighting. Locations that must never
/// be chosen are handled with restrict_candidates, not with infinite cost.
struct CostField {
  Eigen::VectorXd eta;
  double gamma = 0.0;

  CostField() = default;
  CostField(Eigen::VectorXd eta_, double gamma_) : eta(std::move(eta_)), gamma(gamma_) {}

  /// Zero cost over n locations.
  static CostField uniform(Index n, double value = 0.0, double gamma = 0.0);

  /// Throws InvalidArgument on length mismatch, negative or non-finite entries,
  /// or negative gamma.
  void validate(Index locations) const;
};

/// Pivot-ordered location indices chosen by the greedy QR.
struct Selection {
  std::vector<Index> indices;
  std::vector<double> costs;
  double total_cost = 0.0;
  double gamma_used = 0.0;
  /// |r_kk| recorded at each step (the residual norm of the chosen column).
  std::vector<double> pivot_norms;
  bool rank_deficient = false;
  bool hybrid = false;

  Index size() const noexcept { return static_cast<Index>(indices.size()); }

  /// The p x n row-selection operator C with rows e_j^T.
  Eigen::MatrixXd selection_operator(Index n) const;

  /// Builds a selection from explicit indices, attaching costs from `eta`
  /// (zero when `eta` is empty). Validates distinctness and range.
  static Selection from_indices(std::vector<Index> indices, Index n,
                                const Eigen::VectorXd& eta = {});
};

template <typename Scalar>
Selection qr_pivot_select(const CandidateMatrix<Scalar>& v, Index p);

template <typename Scalar>
Selection qr_pivot_select_cost(const CandidateMatrix<Scalar>& v, const CostField& cost, Index p);

/// Candidate columns limited to an allowed index set, with the map back to the
/// original location indices.
template <typename Scalar>
struct RestrictedCandidates {
  CandidateMatrix<Scalar> matrix;
  std::vector<Index> to_original;

  /// Translates a selection on the restriction back to original indexing.
  Selection to_original_selection(const Selection& local) const;
  /// Restricts a cost field defined on the original locations.
  CostField restrict_cost(const CostField& cost) const;
};

template <typename Scalar>
RestrictedCandidates<Scalar> restrict_candidates(const CandidateMatrix<Scalar>& v,
                                                 std::span<const Index> allowed);

}  // namespace sensorsel

#endif  // SENSORSEL_PIVOTING_HPP
