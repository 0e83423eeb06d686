#ifndef SENSORSEL_LINALG_HPP
#define SENSORSEL_LINALG_HPP

#include <complex>

#include <Eigen/Core>
#include <Eigen/SVD>

namespace sensorsel {

using Index = Eigen::Index;
using Complex = std::complex<double>;

/// Moore-Penrose pseudoinverse. Singular values below `rel_tol * sigma_max`
/// are treated as zero; an all-zero input yields the zero matrix.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> pseudo_inverse(
    const Eigen::MatrixBase<Derived>& m, double rel_tol = 1e-12) {
  using MatrixType = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::JacobiSVD<MatrixType> svd(m.derived(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  MatrixType result = MatrixType::Zero(m.cols(), m.rows());
  if (s.size() == 0 || s(0) == 0.0) return result;
  const double cutoff = rel_tol * s(0);
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) <= cutoff) break;
    result.noalias() += (svd.matrixV().col(i) / s(i)) * svd.matrixU().col(i).adjoint();
  }
  return result;
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

}  // namespace sensorsel

#endif  // SENSORSEL_LINALG_HPP
