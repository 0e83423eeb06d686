#include <sensorsel/pivoting.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Householder>

#include <sensorsel/errors.hpp>

namespace sensorsel {

template <typename Scalar>
CandidateMatrix<Scalar>::CandidateMatrix(MatrixType entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.cols() < 1) {
    throw InvalidArgument("candidate matrix must have at least one row and one column");
  }
  if (!entries_.allFinite()) {
    throw InvalidArgument("candidate matrix has non-finite entries");
  }
}

CostField CostField::uniform(Index n, double value, double gamma) {
  return CostField(Eigen::VectorXd::Constant(n, value), gamma);
}

void CostField::validate(Index locations) const {
  if (eta.size() != locations) {
    throw InvalidArgument("cost field length " + std::to_string(eta.size()) +
                          " does not match candidate count " + std::to_string(locations));
  }
  if (!eta.allFinite() || (eta.array() < 0.0).any()) {
    throw InvalidArgument("cost field entries must be finite and non-negative");
  }
  if (!std::isfinite(gamma) || gamma < 0.0) {
    throw InvalidArgument("cost weighting gamma must be finite and non-negative");
  }
}

Eigen::MatrixXd Selection::selection_operator(Index n) const {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(size(), n);
  for (Index k = 0; k < size(); ++k) {
    const Index j = indices[static_cast<std::size_t>(k)];
    if (j < 0 || j >= n) throw InvalidArgument("selection index out of range");
    c(k, j) = 1.0;
  }
  return c;
}

Selection Selection::from_indices(std::vector<Index> indices, Index n, const Eigen::VectorXd& eta) {
  if (eta.size() != 0 && eta.size() != n) {
    throw InvalidArgument("cost vector length does not match location count");
  }
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  Selection sel;
  for (const Index j : indices) {
    if (j < 0 || j >= n) throw InvalidArgument("selection index " + std::to_string(j) + " out of range");
    if (seen[static_cast<std::size_t>(j)]) {
      throw InvalidArgument("selection index " + std::to_string(j) + " repeated");
    }
    seen[static_cast<std::size_t>(j)] = true;
    const double c = eta.size() == 0 ? 0.0 : eta(j);
    sel.costs.push_back(c);
    sel.total_cost += c;
  }
  sel.indices = std::move(indices);
  return sel;
}

namespace {

template <typename Scalar>
Selection pivoted_qr(const CandidateMatrix<Scalar>& v, const Eigen::VectorXd* eta, double gamma,
                     Index p) {
  const Index r = v.modes();
  const Index n = v.locations();
  if (p < 1 || p > std::min(r, n)) {
    throw InvalidArgument("number of pivots p=" + std::to_string(p) + " must lie in [1, " +
                          std::to_string(std::min(r, n)) + "]");
  }

  using MatrixType = typename CandidateMatrix<Scalar>::MatrixType;
  using VectorType = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  MatrixType work = v.entries();
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});

  const double initial_max = work.colwise().norm().maxCoeff();
  const double deficiency_tol = 1e-12 * initial_max;

  Selection sel;
  sel.gamma_used = gamma;
  sel.indices.reserve(static_cast<std::size_t>(p));

  VectorType essential;
  VectorType workspace(n);
  for (Index k = 0; k < p; ++k) {
    // Residual norms of the trailing sub-columns, recomputed every step.
    const Eigen::RowVectorXd norms = work.block(k, k, r - k, n - k).colwise().norm();

    Index best = -1;
    double best_score = 0.0;
    for (Index j = 0; j < n - k; ++j) {
      const Index location = perm[static_cast<std::size_t>(k + j)];
      const double score = norms(j) - (eta != nullptr ? gamma * (*eta)(location) : 0.0);
      if (best < 0 || score > best_score ||
          (score == best_score && location < perm[static_cast<std::size_t>(k + best)])) {
        best = j;
        best_score = score;
      }
    }
    if (norms.maxCoeff() <= deficiency_tol) sel.rank_deficient = true;

    const Index jk = k + best;
    if (jk != k) {
      work.col(k).swap(work.col(jk));
      std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(jk)]);
    }

    const Index location = perm[static_cast<std::size_t>(k)];
    sel.indices.push_back(location);
    const double c = eta != nullptr ? (*eta)(location) : 0.0;
    sel.costs.push_back(c);
    sel.total_cost += c;
    sel.pivot_norms.push_back(norms(best));

    if (k + 1 < r) {
      Scalar tau;
      double beta;
      auto column = work.col(k).tail(r - k);
      essential.resize(r - k - 1);
      column.makeHouseholder(essential, tau, beta);
      work.block(k, k + 1, r - k, n - k - 1)
          .applyHouseholderOnTheLeft(essential, tau, workspace.data());
      work(k, k) = Scalar(beta);
      work.block(k + 1, k, r - k - 1, 1).setZero();
    }
  }
  return sel;
}

}  // namespace

template <typename Scalar>
Selection qr_pivot_select(const CandidateMatrix<Scalar>& v, Index p) {
  return pivoted_qr(v, nullptr, 0.0, p);
}

template <typename Scalar>
Selection qr_pivot_select_cost(const CandidateMatrix<Scalar>& v, const CostField& cost, Index p) {
  cost.validate(v.locations());
  return pivoted_qr(v, &cost.eta, cost.gamma, p);
}

template <typename Scalar>
Selection RestrictedCandidates<Scalar>::to_original_selection(const Selection& local) const {
  Selection out = local;
  for (auto& j : out.indices) {
    if (j < 0 || j >= static_cast<Index>(to_original.size())) {
      throw InvalidArgument("local selection index out of range of the restriction");
    }
    j = to_original[static_cast<std::size_t>(j)];
  }
  return out;
}

template <typename Scalar>
CostField RestrictedCandidates<Scalar>::restrict_cost(const CostField& cost) const {
  CostField out;
  out.gamma = cost.gamma;
  out.eta.resize(static_cast<Index>(to_original.size()));
  for (std::size_t i = 0; i < to_original.size(); ++i) {
    const Index j = to_original[i];
    if (j >= cost.eta.size()) throw InvalidArgument("cost field shorter than candidate set");
    out.eta(static_cast<Index>(i)) = cost.eta(j);
  }
  return out;
}

template <typename Scalar>
RestrictedCandidates<Scalar> restrict_candidates(const CandidateMatrix<Scalar>& v,
                                                 std::span<const Index> allowed) {
  if (allowed.empty()) throw InvalidArgument("allowed candidate set is empty");
  std::vector<Index> map(allowed.begin(), allowed.end());
  std::vector<bool> seen(static_cast<std::size_t>(v.locations()), false);
  for (const Index j : map) {
    if (j < 0 || j >= v.locations()) {
      throw InvalidArgument("allowed index " + std::to_string(j) + " out of range");
    }
    if (seen[static_cast<std::size_t>(j)]) {
      throw InvalidArgument("allowed index " + std::to_string(j) + " repeated");
    }
    seen[static_cast<std::size_t>(j)] = true;
  }
  typename CandidateMatrix<Scalar>::MatrixType sub(v.modes(), static_cast<Index>(map.size()));
  for (std::size_t i = 0; i < map.size(); ++i) sub.col(static_cast<Index>(i)) = v.entries().col(map[i]);
  return RestrictedCandidates<Scalar>{CandidateMatrix<Scalar>(std::move(sub)), std::move(map)};
}

template class CandidateMatrix<double>;
template class CandidateMatrix<Complex>;
template struct RestrictedCandidates<double>;
template struct RestrictedCandidates<Complex>;
template Selection qr_pivot_select(const CandidateMatrix<double>&, Index);
template Selection qr_pivot_select(const CandidateMatrix<Complex>&, Index);
template Selection qr_pivot_select_cost(const CandidateMatrix<double>&, const CostField&, Index);
template Selection qr_pivot_select_cost(const CandidateMatrix<Complex>&, const CostField&, Index);
template RestrictedCandidates<double> restrict_candidates(const CandidateMatrix<double>&,
                                                          std::span<const Index>);
template RestrictedCandidates<Complex> restrict_candidates(const CandidateMatrix<Complex>&,
                                                           std::span<const Index>);

}  // namespace sensorsel
