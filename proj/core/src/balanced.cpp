#include <sensorsel/balanced.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include <sensorsel/bases.hpp>
#include <sensorsel/errors.hpp>
#include <sensorsel/parallel.hpp>
#include <sensorsel/rng.hpp>

namespace sensorsel {

LinearControlSystem::LinearControlSystem(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
  if (a_.rows() < 1 || a_.rows() != a_.cols()) throw InvalidArgument("A must be square");
  if (b_.rows() != a_.rows()) throw InvalidArgument("B row count must match A");
  if (c_.cols() != a_.rows()) throw InvalidArgument("C column count must match A");
  if (!a_.allFinite() || !b_.allFinite() || !c_.allFinite()) {
    throw InvalidArgument("system matrices must be finite");
  }
}

double LinearControlSystem::spectral_abscissa() const {
  Eigen::EigenSolver<Eigen::MatrixXd> es(a_, false);
  return es.eigenvalues().real().maxCoeff();
}

LinearControlSystem build_spring_mass(Index masses, double mass, double stiffness, double damping) {
  if (masses < 2) throw InvalidArgument("spring-mass chain needs at least two masses");
  if (!(mass > 0.0) || !(stiffness > 0.0) || !(damping > 0.0)) {
    throw InvalidArgument("mass, stiffness and damping must be positive");
  }
  const Index n = masses;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    t(i, i) = -2.0;
    if (i > 0) t(i, i - 1) = 1.0;
    if (i + 1 < n) t(i, i + 1) = 1.0;
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  a.topRightCorner(n, n).setIdentity();
  a.bottomLeftCorner(n, n) = (stiffness / mass) * t;
  a.bottomRightCorner(n, n) = (damping / mass) * t;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2 * n, n);
  b.bottomRows(n) = Eigen::MatrixXd::Identity(n, n) / mass;
  return LinearControlSystem(std::move(a), std::move(b), Eigen::MatrixXd::Identity(2 * n, 2 * n));
}

Eigen::MatrixXd solve_continuous_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
  const Index n = a.rows();
  if (a.cols() != n || q.rows() != n || q.cols() != n) {
    throw InvalidArgument("Lyapunov solve: dimension mismatch");
  }
  Eigen::ComplexSchur<Eigen::MatrixXd> schur(a, true);
  if (schur.info() != Eigen::Success) throw NumericalError("Schur decomposition did not converge");
  const Eigen::MatrixXcd& t = schur.matrixT();
  const Eigen::MatrixXcd& u = schur.matrixU();
  for (Index i = 0; i < n; ++i) {
    if (!(t(i, i).real() < 0.0)) throw InvalidArgument("A is not Hurwitz");
  }

  // T Y + Y T^H + F = 0, solved one column at a time from the right.
  const Eigen::MatrixXcd f = u.adjoint() * q.cast<Complex>() * u;
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
  for (Index k = n - 1; k >= 0; --k) {
    Eigen::VectorXcd rhs = -f.col(k);
    for (Index j = k + 1; j < n; ++j) rhs -= y.col(j) * std::conj(t(k, j));
    Eigen::MatrixXcd shifted = t;
    shifted.diagonal().array() += std::conj(t(k, k));
    y.col(k) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  return (u * y * u.adjoint()).real();
}

namespace {

double lyapunov_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& q) {
  const double scale = q.norm();
  const double res = (a * x + x * a.transpose() + q).norm();
  return scale > 0.0 ? res / scale : res;
}

double asymmetry(const Eigen::MatrixXd& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

Gramians gramians(const LinearControlSystem& sys) {
  if (!sys.is_hurwitz()) throw InvalidArgument("Gramians require a Hurwitz A");
  const Eigen::MatrixXd bbt = sys.b() * sys.b().transpose();
  const Eigen::MatrixXd ctc = sys.c().transpose() * sys.c();
  Gramians g;
  g.controllability = solve_continuous_lyapunov(sys.a(), bbt);
  g.observability = solve_continuous_lyapunov(sys.a().transpose(), ctc);
  g.max_asymmetry = std::max(asymmetry(g.controllability), asymmetry(g.observability));
  g.controllability = 0.5 * (g.controllability + g.controllability.transpose()).eval();
  g.observability = 0.5 * (g.observability + g.observability.transpose()).eval();
  g.controllability_residual = lyapunov_residual(sys.a(), g.controllability, bbt);
  g.observability_residual = lyapunov_residual(sys.a().transpose(), g.observability, ctc);
  if (!g.controllability.allFinite() || !g.observability.allFinite()) {
    throw NumericalError("Lyapunov solver produced non-finite Gramians");
  }
  return g;
}

namespace {

// Symmetric square-root factor L with W = L L^T, clipping tiny negative
// eigenvalues from round-off.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w);
  if (es.info() != Eigen::Success) throw NumericalError("Gramian eigendecomposition failed");
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal();
}

}  // namespace

BalancedModes balance(const Gramians& g, Index r) {
  const Index n = g.controllability.rows();
  if (r < 1 || r > n) throw InvalidArgument("balanced truncation rank out of range");
  const Eigen::MatrixXd lc = psd_factor(g.controllability);
  const Eigen::MatrixXd lo = psd_factor(g.observability);
  // Singular values of Lo^T Lc are the square roots of the eigenvalues of Wc Wo.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(lo.transpose() * lc,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (!(s(0) > 0.0) || s(r - 1) <= 1e-12 * s(0)) {
    throw NumericalError("balancing is ill-conditioned: r exceeds the numerical rank of Wc Wo");
  }
  const Eigen::VectorXd inv_root = s.head(r).cwiseSqrt().cwiseInverse();
  BalancedModes out;
  out.hsv = s.head(r);
  out.psi = lc * svd.matrixV().leftCols(r) * inv_root.asDiagonal();
  out.phi = lo * svd.matrixU().leftCols(r) * inv_root.asDiagonal();
  fix_column_signs(out.psi, &out.phi);
  return out;
}

BalancedModes balance(const LinearControlSystem& sys, Index r) { return balance(gramians(sys), r); }

double log_det_principal(const Eigen::MatrixXd& gramian, std::span<const Index> indices) {
  const auto p = static_cast<Index>(indices.size());
  Eigen::MatrixXd sub(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) {
      sub(i, j) = gramian(indices[static_cast<std::size_t>(i)], indices[static_cast<std::size_t>(j)]);
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sub);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const auto diag = llt.matrixLLT().diagonal();
  if ((diag.array() <= 0.0).any()) return -std::numeric_limits<double>::infinity();
  return 2.0 * diag.array().log().sum();
}

namespace {

void check_indices(const Selection& sel, Index n) {
  if (sel.size() < 1 || sel.size() > n) throw InvalidArgument("selection size out of range");
  for (const Index j : sel.indices) {
    if (j < 0 || j >= n) throw InvalidArgument("selection index out of Gramian range");
  }
}

}  // namespace

double h2_proxy_sensors(const Selection& sel, const Eigen::MatrixXd& wc) {
  check_indices(sel, wc.rows());
  return log_det_principal(wc, sel.indices);
}

double h2_proxy_actuators(const Selection& sel, const Eigen::MatrixXd& wo) {
  check_indices(sel, wo.rows());
  return log_det_principal(wo, sel.indices);
}

Selection select_sensors(const BalancedModes& modes, const CostField& cost, Index p) {
  const RealCandidates v(modes.psi.transpose());
  return qr_pivot_select_cost(v, cost, p);
}

Selection select_actuators(const BalancedModes& modes, const CostField& cost, Index p,
                           std::span<const Index> allowed) {
  const RealCandidates v(modes.phi.transpose());
  cost.validate(v.locations());
  const auto restricted = restrict_candidates(v, allowed);
  const Selection local = qr_pivot_select_cost(restricted.matrix, restricted.restrict_cost(cost), p);
  return restricted.to_original_selection(local);
}

Selection select_sensors(const LinearControlSystem& sys, Index r, const CostField& cost, Index p) {
  if (p > r) throw InvalidArgument("sensor selection needs p <= r");
  return select_sensors(balance(sys, r), cost, p);
}

Selection select_actuators(const LinearControlSystem& sys, Index r, const CostField& cost, Index p,
                           std::span<const Index> allowed) {
  return select_actuators(balance(sys, r), cost, p, allowed);
}

Eigen::VectorXd spring_mass_sensor_cost(Index masses) {
  if (masses < 2) throw InvalidArgument("spring-mass chain needs at least two masses");
  const double centre = 0.5 * static_cast<double>(masses - 1);
  const double width = static_cast<double>(masses) / 5.0;
  Eigen::VectorXd g(masses);
  for (Index i = 0; i < masses; ++i) {
    const double d = static_cast<double>(i) - centre;
    g(i) = std::exp(-d * d / (2.0 * width * width));
  }
  const double lo = g.minCoeff();
  const double hi = g.maxCoeff();
  g = ((g.array() - lo) / (hi - lo)).matrix();
  Eigen::VectorXd eta(2 * masses);
  eta << g, g;
  return eta;
}

Eigen::VectorXd spring_mass_actuator_cost(Index masses) {
  return (1.0 - spring_mass_sensor_cost(masses).array()).matrix();
}

std::vector<Index> velocity_block(Index masses) {
  std::vector<Index> v(static_cast<std::size_t>(masses));
  std::iota(v.begin(), v.end(), masses);
  return v;
}

std::uint64_t binomial(Index n, Index p) {
  if (p < 0 || n < 0 || p > n) return 0;
  p = std::min(p, n - p);
  constexpr std::uint64_t cap = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t acc = 1;
  for (Index i = 1; i <= p; ++i) {
    const auto f = static_cast<std::uint64_t>(n - p + i);
    // acc * f / i is exact; divide first where possible to stay in range
    const std::uint64_t g = std::gcd(acc, static_cast<std::uint64_t>(i));
    const std::uint64_t a = acc / g;
    const std::uint64_t d = static_cast<std::uint64_t>(i) / g;
    if (a > cap / f) return cap;
    acc = a * (f / d);  // d divides f once a and d are coprime
  }
  return acc;
}

namespace {

// Lexicographic unranking of p-subsets of [0, n).
std::vector<Index> unrank_subset(Index n, Index p, std::uint64_t rank) {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(p));
  Index next = 0;
  for (Index slot = 0; slot < p; ++slot) {
    for (Index c = next; c < n; ++c) {
      const std::uint64_t block = binomial(n - c - 1, p - slot - 1);
      if (rank < block) {
        out.push_back(c);
        next = c + 1;
        break;
      }
      rank -= block;
    }
  }
  return out;
}

bool advance_subset(std::vector<Index>& s, Index n) {
  const auto p = static_cast<Index>(s.size());
  Index i = p - 1;
  while (i >= 0 && s[static_cast<std::size_t>(i)] == n - p + i) --i;
  if (i < 0) return false;
  ++s[static_cast<std::size_t>(i)];
  for (Index j = i + 1; j < p; ++j) {
    s[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j - 1)] + 1;
  }
  return true;
}

}  // namespace

void for_each_subset(Index n, Index p, const std::function<void(std::span<const Index>)>& visit) {
  if (p < 1 || p > n) throw InvalidArgument("subset size out of range");
  std::vector<Index> s(static_cast<std::size_t>(p));
  std::iota(s.begin(), s.end(), Index{0});
  do {
    visit(s);
  } while (advance_subset(s, n));
}

SubsetEnumeration::SubsetEnumeration(const Eigen::MatrixXd& gramian, std::vector<Index> candidates,
                                     Index p, std::uint64_t limit)
    : candidates_(std::move(candidates)), p_(p) {
  const auto n = static_cast<Index>(candidates_.size());
  if (p < 1 || p > n) throw InvalidArgument("subset size out of range");
  for (const Index c : candidates_) {
    if (c < 0 || c >= gramian.rows()) throw InvalidArgument("candidate outside Gramian");
  }
  const std::uint64_t total = binomial(n, p);
  if (total > limit) {
    throw InvalidArgument("enumeration of " + std::to_string(total) +
                          " subsets exceeds the limit of " + std::to_string(limit));
  }
  values_.resize(static_cast<std::size_t>(total));

  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(worker_count() * 4, total));
  const std::uint64_t per_chunk = (total + chunks - 1) / chunks;
  parallel_for(chunks, [&](std::size_t c) {
    const std::uint64_t begin = c * per_chunk;
    const std::uint64_t end = std::min<std::uint64_t>(total, begin + per_chunk);
    if (begin >= end) return;
    std::vector<Index> local = unrank_subset(n, p, begin);
    std::vector<Index> mapped(static_cast<std::size_t>(p));
    for (std::uint64_t rank = begin; rank < end; ++rank) {
      for (std::size_t k = 0; k < local.size(); ++k) mapped[k] = candidates_[static_cast<std::size_t>(local[k])];
      values_[static_cast<std::size_t>(rank)] = log_det_principal(gramian, mapped);
      advance_subset(local, n);
    }
  });
}

std::vector<Index> SubsetEnumeration::subset(std::size_t i) const {
  if (i >= values_.size()) throw InvalidArgument("subset rank out of range");
  std::vector<Index> local = unrank_subset(static_cast<Index>(candidates_.size()), p_, i);
  for (auto& j : local) j = candidates_[static_cast<std::size_t>(j)];
  return local;
}

double SubsetEnumeration::percentile_of(double value) const {
  const auto below = std::count_if(values_.begin(), values_.end(), [&](double v) { return v < value; });
  return static_cast<double>(below) / static_cast<double>(values_.size());
}

std::size_t SubsetEnumeration::count_better(double value) const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [&](double v) { return v > value; }));
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> discretize_zoh(const Eigen::MatrixXd& a,
                                                           const Eigen::MatrixXd& b, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("discretization step must be positive");
  const Index n = a.rows();
  const Index m = b.cols();
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = a * dt;
  aug.topRightCorner(n, m) = b * dt;
  const Eigen::MatrixXd e = aug.exp();
  return {e.topLeftCorner(n, n), e.topRightCorner(n, m)};
}

namespace {

double dare_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& q,
                     const Eigen::MatrixXd& r, const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd btx = b.transpose() * x;
  const Eigen::MatrixXd rhs =
      a.transpose() * x * a -
      (btx * a).transpose() * (r + btx * b).ldlt().solve(btx * a) + q;
  return (x - rhs).norm() / std::max(1.0, x.norm());
}

}  // namespace

Eigen::MatrixXd solve_discrete_riccati(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                       const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                                       double tol) {
  const Index n = a.rows();
  if (a.cols() != n || b.rows() != n || q.rows() != n || q.cols() != n ||
      r.rows() != b.cols() || r.cols() != b.cols()) {
    throw InvalidArgument("Riccati solve: dimension mismatch");
  }
  const Eigen::LDLT<Eigen::MatrixXd> r_fact(r);
  if (r_fact.info() != Eigen::Success || !r_fact.isPositive() ||
      !(r_fact.vectorD().minCoeff() > 0.0)) {
    throw InvalidArgument("Riccati solve: R must be positive definite");
  }

  // Structure-preserving doubling: after k steps H equals the 2^k-step
  // Riccati recursion started from Q.
  Eigen::MatrixXd ak = a;
  Eigen::MatrixXd gk = b * r_fact.solve(b.transpose());
  Eigen::MatrixXd hk = q;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  bool converged = false;
  for (int it = 0; it < 80; ++it) {
    const Eigen::PartialPivLU<Eigen::MatrixXd> w(eye + gk * hk);
    const Eigen::MatrixXd w_a = w.solve(ak);
    const Eigen::MatrixXd w_g = w.solve(gk);
    const Eigen::MatrixXd h_next = hk + ak.transpose() * hk * w_a;
    const Eigen::MatrixXd g_next = gk + ak * w_g * ak.transpose();
    const Eigen::MatrixXd a_next = ak * w_a;
    const double change = (h_next - hk).norm() / std::max(1.0, h_next.norm());
    hk = 0.5 * (h_next + h_next.transpose());
    gk = 0.5 * (g_next + g_next.transpose());
    ak = a_next;
    if (!hk.allFinite() || hk.norm() > 1e14) break;
    if (change < 1e-15) {
      converged = true;
      break;
    }
  }
  if (!converged || !hk.allFinite()) {
    throw NumericalError("Riccati recursion did not converge (unstabilizable or undetectable)");
  }

  // A few plain recursion steps polish round-off left by the doubling.
  Eigen::MatrixXd x = hk;
  for (int it = 0; it < 4; ++it) {
    const Eigen::MatrixXd btx = b.transpose() * x;
    x = a.transpose() * x * a - (btx * a).transpose() * (r + btx * b).ldlt().solve(btx * a) + q;
    x = 0.5 * (x + x.transpose()).eval();
  }
  const double residual = dare_residual(a, b, q, r, x);
  if (!(residual <= tol)) {
    throw NumericalError("Riccati residual " + std::to_string(residual) + " above tolerance");
  }
  return x;
}

LQGResult lqg_simulate(const LinearControlSystem& sys, const Selection& sensors,
                       const Selection& actuators, const Eigen::VectorXd& x0,
                       const LQGOptions& options) {
  const Index n = sys.states();
  if (x0.size() != n) throw InvalidArgument("initial state has the wrong length");
  if (!(options.t_end > 0.0) || !(options.dt > 0.0)) {
    throw InvalidArgument("LQG horizon and step must be positive");
  }
  if (!(options.disturbance_variance >= 0.0) || !(options.noise_variance > 0.0)) {
    throw InvalidArgument("LQG noise variances must be non-negative (measurement: positive)");
  }
  const Eigen::MatrixXd c = sensors.selection_operator(n);
  const Eigen::MatrixXd b = actuators.selection_operator(n).transpose();
  const Index p = c.rows();
  const Index m = b.cols();

  const auto [ad, bd] = discretize_zoh(sys.a(), b, options.dt);
  const Eigen::MatrixXd gd = options.disturbance == DisturbanceModel::per_step
                                ? sys.b()
                                : discretize_zoh(sys.a(), sys.b(), options.dt).second;

  const Eigen::MatrixXd q_lqr = options.state_weight * options.dt * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd r_lqr = options.input_weight * options.dt * Eigen::MatrixXd::Identity(m, m);
  const double w_var = std::max(options.disturbance_variance, 1e-12);
  const Eigen::MatrixXd q_kf = w_var * gd * gd.transpose();
  const Eigen::MatrixXd r_kf = options.noise_variance * Eigen::MatrixXd::Identity(p, p);

  LQGResult out;
  Eigen::MatrixXd k_lqr;
  Eigen::MatrixXd l_kf;
  try {
    const Eigen::MatrixXd s = solve_discrete_riccati(ad, bd, q_lqr, r_lqr);
    k_lqr = (r_lqr + bd.transpose() * s * bd).ldlt().solve(bd.transpose() * s * ad);
    const Eigen::MatrixXd pk = solve_discrete_riccati(ad.transpose(), c.transpose(), q_kf, r_kf);
    l_kf = (c * pk * c.transpose() + r_kf).ldlt().solve(c * pk).transpose();
  } catch (const NumericalError& e) {
    out.feasible = false;
    out.message = e.what();
    return out;
  }

  const auto steps = static_cast<Index>(std::llround(options.t_end / options.dt)) + 1;
  auto engine = make_engine(options.seed, Stream::lqg_noise, options.realization);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double w_sd = std::sqrt(options.disturbance_variance);
  const double v_sd = std::sqrt(options.noise_variance);

  if (options.record_trajectory) {
    out.trajectory.resize(n, steps);
    out.estimate.resize(n, steps);
  }
  Eigen::VectorXd x = x0;
  Eigen::VectorXd x_prior = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w(sys.inputs());
  Eigen::VectorXd v(p);
  double err2 = 0.0;
  double ref2 = 0.0;
  for (Index k = 0; k < steps; ++k) {
    for (Index i = 0; i < p; ++i) v(i) = options.noise ? v_sd * normal(engine) : 0.0;
    for (Index i = 0; i < w.size(); ++i) w(i) = options.noise ? w_sd * normal(engine) : 0.0;

    const Eigen::VectorXd y = c * x + v;
    const Eigen::VectorXd x_hat = x_prior + l_kf * (y - c * x_prior);
    const Eigen::VectorXd u = -k_lqr * x_hat;

    if (options.record_trajectory) {
      out.trajectory.col(k) = x;
      out.estimate.col(k) = x_hat;
    }
    err2 += (x - x_hat).squaredNorm();
    ref2 += x.squaredNorm();
    if (k + 1 < steps) {
      out.control_cost += options.dt * (options.state_weight * x.squaredNorm() +
                                        options.input_weight * u.squaredNorm());
      x = ad * x + bd * u + gd * w;
      x_prior = ad * x_hat + bd * u;
    }
  }
  if (!std::isfinite(out.control_cost)) {
    out.feasible = false;
    out.message = "closed loop diverged";
    return out;
  }
  out.recon_error = ref2 > 0.0 ? std::sqrt(err2 / ref2) : 0.0;
  return out;
}

}  // namespace sensorsel
