#ifndef SENSORSEL_BASES_HPP
#define SENSORSEL_BASES_HPP

#include <cstdint>

#include <Eigen/Core>

#include <sensorsel/pivoting.hpp>
#include <sensorsel/reconstruction.hpp>

namespace sensorsel {

/// Rank-r truncated SVD X ~ U_r diag(sigma) V_r^T.
struct SVDFactors {
  Eigen::MatrixXd u;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd v;
};

/// Leading r singular triplets, with each left singular vector signed so its
/// largest-magnitude entry is positive (the right vector follows).
SVDFactors truncated_svd(const Eigen::MatrixXd& x, Index r);

/// Leading r left singular vectors of X as a basis.
Basis svd_basis(const Eigen::MatrixXd& x, Index r);

struct RandomizedOptions {
  Index oversample = 10;
  /// Subspace (power) iterations, 0-3.
  int power_iterations = 1;
  std::uint64_t seed = 0;
};

/// Gaussian range finder: sketch Y = X G with r + oversample columns,
/// optional subspace iterations, orthonormalize, then keep the r leading
/// directions of the projected matrix.
Basis randomized_basis(const Eigen::MatrixXd& x, Index r, const RandomizedOptions& options = {});

/// Half the sensors from cost-constrained QR on the ceil(p/2)-mode SVD basis,
/// the rest drawn uniformly from the remaining locations.
Selection hybrid_select(const Eigen::MatrixXd& x, Index p, const CostField& cost,
                        std::uint64_t seed);

/// Makes the largest-magnitude entry of each column positive, flipping the
/// matching column of `partner` (when non-null) with it.
void fix_column_signs(Eigen::MatrixXd& m, Eigen::MatrixXd* partner = nullptr);

}  // namespace sensorsel

#endif  // SENSORSEL_BASES_HPP
