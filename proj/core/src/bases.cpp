#include <sensorsel/bases.hpp>

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include <sensorsel/errors.hpp>
#include <sensorsel/rng.hpp>

namespace sensorsel {

void fix_column_signs(Eigen::MatrixXd& m, Eigen::MatrixXd* partner) {
  for (Index j = 0; j < m.cols(); ++j) {
    Index arg = 0;
    m.col(j).cwiseAbs().maxCoeff(&arg);
    if (m(arg, j) < 0.0) {
      m.col(j) *= -1.0;
      if (partner != nullptr) partner->col(j) *= -1.0;
    }
  }
}

SVDFactors truncated_svd(const Eigen::MatrixXd& x, Index r) {
  const Index k = std::min(x.rows(), x.cols());
  if (r < 1 || r > k) {
    throw InvalidArgument("SVD rank r=" + std::to_string(r) + " must lie in [1, " +
                          std::to_string(k) + "]");
  }
  if (!x.allFinite()) throw InvalidArgument("SVD input has non-finite entries");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SVDFactors f{svd.matrixU().leftCols(r), svd.singularValues().head(r), svd.matrixV().leftCols(r)};
  fix_column_signs(f.u, &f.v);
  return f;
}

Basis svd_basis(const Eigen::MatrixXd& x, Index r) {
  SVDFactors f = truncated_svd(x, r);
  return Basis(std::move(f.u), BasisKind::svd,
               {{"rank", std::to_string(r)}, {"source", "truncated-svd"}});
}

namespace {

Eigen::MatrixXd orthonormal_range(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

}  // namespace

Basis randomized_basis(const Eigen::MatrixXd& x, Index r, const RandomizedOptions& options) {
  const Index k = std::min(x.rows(), x.cols());
  if (options.oversample < 0) throw InvalidArgument("oversample must be non-negative");
  if (r < 1 || r + options.oversample > k) {
    throw InvalidArgument("randomized basis requires 1 <= r and r + oversample <= min(n, m)");
  }
  if (options.power_iterations < 0 || options.power_iterations > 3) {
    throw InvalidArgument("power iterations must lie in [0, 3]");
  }
  const Index l = r + options.oversample;
  auto engine = make_engine(options.seed, Stream::randomized_sketch, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(x.cols(), l);
  for (Index j = 0; j < l; ++j) {
    for (Index i = 0; i < x.cols(); ++i) g(i, j) = normal(engine);
  }

  Eigen::MatrixXd q = orthonormal_range(x * g);
  for (int it = 0; it < options.power_iterations; ++it) {
    const Eigen::MatrixXd z = orthonormal_range(x.transpose() * q);
    q = orthonormal_range(x * z);
  }

  const Eigen::MatrixXd b = q.transpose() * x;
  Eigen::JacobiSVD<Eigen::MatrixXd> small(b, Eigen::ComputeThinU);
  Eigen::MatrixXd modes = q * small.matrixU().leftCols(r);
  fix_column_signs(modes);
  return Basis(std::move(modes), BasisKind::randomized,
               {{"rank", std::to_string(r)},
                {"oversample", std::to_string(options.oversample)},
                {"power_iterations", std::to_string(options.power_iterations)},
                {"seed", std::to_string(options.seed)}});
}

Selection hybrid_select(const Eigen::MatrixXd& x, Index p, const CostField& cost,
                        std::uint64_t seed) {
  const Index n = x.rows();
  if (p < 1 || p > n) throw InvalidArgument("hybrid_select requires 1 <= p <= n");
  const Index qr_count = (p + 1) / 2;
  if (qr_count > std::min(x.rows(), x.cols())) {
    throw InvalidArgument("hybrid_select: not enough snapshots for ceil(p/2) SVD modes");
  }
  const CostField effective = cost.eta.size() == 0 ? CostField::uniform(n, 0.0, cost.gamma) : cost;
  effective.validate(n);

  Selection sel = select_on_basis(svd_basis(x, qr_count), effective, qr_count);

  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  for (const Index j : sel.indices) taken[static_cast<std::size_t>(j)] = true;
  std::vector<Index> pool;
  pool.reserve(static_cast<std::size_t>(n - qr_count));
  for (Index j = 0; j < n; ++j) {
    if (!taken[static_cast<std::size_t>(j)]) pool.push_back(j);
  }
  auto engine = make_engine(seed, Stream::hybrid_random, 0);
  for (const Index j : sample_without_replacement(std::move(pool), p - qr_count, engine)) {
    sel.indices.push_back(j);
    sel.costs.push_back(effective.eta(j));
    sel.total_cost += effective.eta(j);
  }
  sel.hybrid = true;
  return sel;
}

}  // namespace sensorsel
