#ifndef SENSORSEL_BALANCED_HPP
#define SENSORSEL_BALANCED_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

#include <sensorsel/pivoting.hpp>

namespace sensorsel {

/// x' = A x + B u, y = C x.
class LinearControlSystem {
 public:
  LinearControlSystem(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c);

  const Eigen::MatrixXd& a() const noexcept { return a_; }
  const Eigen::MatrixXd& b() const noexcept { return b_; }
  const Eigen::MatrixXd& c() const noexcept { return c_; }
  Index states() const noexcept { return a_.rows(); }
  Index inputs() const noexcept { return b_.cols(); }
  Index outputs() const noexcept { return c_.rows(); }

  /// Largest real part of the spectrum of A.
  double spectral_abscissa() const;
  bool is_hurwitz() const { return spectral_abscissa() < 0.0; }

 private:
  Eigen::MatrixXd a_, b_, c_;
};

/// N masses on a fixed-end chain; state is (positions, velocities), forces act
/// on the velocity rows, and every state is sensed.
LinearControlSystem build_spring_mass(Index masses, double mass = 1.0, double stiffness = 1.0,
                                      double damping = 1.0);

/// Solves A X + X A^T + Q = 0 by complex Schur (Bartels-Stewart). Requires A
/// Hurwitz. The result is symmetrized when Q is symmetric.
Eigen::MatrixXd solve_continuous_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q);

struct Gramians {
  Eigen::MatrixXd controllability;  ///< A Wc + Wc A^T + B B^T = 0
  Eigen::MatrixXd observability;    ///< A^T Wo + Wo A + C^T C = 0
  double controllability_residual = 0.0;  ///< relative to ||B B^T||_F
  double observability_residual = 0.0;    ///< relative to ||C^T C||_F
  double max_asymmetry = 0.0;             ///< before symmetrization
};

Gramians gramians(const LinearControlSystem& sys);

struct BalancedModes {
  Eigen::MatrixXd psi;  ///< n x r direct modes
  Eigen::MatrixXd phi;  ///< n x r adjoint modes, phi^T psi = I
  Eigen::VectorXd hsv;  ///< Hankel singular values, non-increasing
};

/// Leading r balanced modes: W_c W_o psi = psi diag(hsv)^2 with both
/// transformed Gramians equal to diag(hsv).
BalancedModes balance(const Gramians& g, Index r);
BalancedModes balance(const LinearControlSystem& sys, Index r);

/// log det of the principal submatrix of a Gramian at `indices` (Cholesky).
/// Returns -infinity when the submatrix is not positive definite.
double log_det_principal(const Eigen::MatrixXd& gramian, std::span<const Index> indices);

/// log det C Wc C^T for C selecting rows `sel`.
double h2_proxy_sensors(const Selection& sel, const Eigen::MatrixXd& wc);
/// log det B^T Wo B for B selecting state coordinates `sel`.
double h2_proxy_actuators(const Selection& sel, const Eigen::MatrixXd& wo);

/// Cost-constrained QR on psi_r^T.
Selection select_sensors(const BalancedModes& modes, const CostField& cost, Index p);
/// Cost-constrained QR on phi_r^T limited to `allowed` state coordinates;
/// indices are returned in state coordinates.
Selection select_actuators(const BalancedModes& modes, const CostField& cost, Index p,
                           std::span<const Index> allowed);

/// Convenience wrappers computing Gramians and r balanced modes first.
Selection select_sensors(const LinearControlSystem& sys, Index r, const CostField& cost, Index p);
Selection select_actuators(const LinearControlSystem& sys, Index r, const CostField& cost, Index p,
                           std::span<const Index> allowed);

/// Spring-mass cost conventions on the 2N state coordinates: a Gaussian bump
/// centred on the middle mass (width N/5), min-max scaled to [0, 1] and
/// repeated on the position and velocity blocks; the actuator cost is its
/// complement.
Eigen::VectorXd spring_mass_sensor_cost(Index masses);
Eigen::VectorXd spring_mass_actuator_cost(Index masses);
/// Velocity coordinates N..2N-1.
std::vector<Index> velocity_block(Index masses);

/// Number of p-subsets of n; saturates at uint64 max.
std::uint64_t binomial(Index n, Index p);

/// All p-subsets of `candidates` in lexicographic order with their proxy.
class SubsetEnumeration {
 public:
  static constexpr std::uint64_t kDefaultLimit = 10'000'000;

  /// Throws InvalidArgument when C(|candidates|, p) exceeds `limit`.
  SubsetEnumeration(const Eigen::MatrixXd& gramian, std::vector<Index> candidates, Index p,
                    std::uint64_t limit = kDefaultLimit);

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  /// The i-th subset in lexicographic order, in original coordinates.
  std::vector<Index> subset(std::size_t i) const;

  /// Fraction of enumerated subsets whose proxy is strictly below `value`.
  double percentile_of(double value) const;
  /// Number of subsets with a proxy strictly greater than `value`.
  std::size_t count_better(double value) const;

 private:
  std::vector<Index> candidates_;
  Index p_;
  std::vector<double> values_;
};

/// Calls `visit(subset)` for every p-subset of [0, n) in lexicographic order.
void for_each_subset(Index n, Index p, const std::function<void(std::span<const Index>)>& visit);

/// How the process disturbance w (covariance disturbance_variance * I, one
/// entry per column of sys.b()) enters the sampled dynamics.
enum class DisturbanceModel {
  per_step,    ///< x_{k+1} = ... + B w_k
  held_force,  ///< w held over each step as a force: x_{k+1} = ... + G_d w_k
};

struct LQGOptions {
  double t_end = 50.0;
  double dt = 0.01;
  double disturbance_variance = 0.005;
  double noise_variance = 0.005;
  double state_weight = 1.0;    ///< Q = state_weight * I
  double input_weight = 1.0;    ///< R = input_weight * I
  std::uint64_t seed = 0;
  std::uint64_t realization = 0;
  bool noise = true;
  bool record_trajectory = true;
  DisturbanceModel disturbance = DisturbanceModel::per_step;
};

struct LQGResult {
  Eigen::MatrixXd trajectory;  ///< n x T true states (when recorded)
  Eigen::MatrixXd estimate;    ///< n x T estimates (when recorded)
  double control_cost = 0.0;   ///< rectangle-rule J
  double recon_error = 0.0;    ///< ||X - X_hat||_F / ||X||_F
  bool feasible = true;
  std::string message;
};

/// Zero-order-hold discretization of (A, B) at step dt.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> discretize_zoh(const Eigen::MatrixXd& a,
                                                           const Eigen::MatrixXd& b, double dt);

/// Stabilizing solution of X = A^T X A - A^T X B (R + B^T X B)^-1 B^T X A + Q,
/// obtained as the fixed point of the Riccati recursion (accelerated by
/// doubling). Throws NumericalError when the recursion does not settle.
Eigen::MatrixXd solve_discrete_riccati(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                       const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                                       double tol = 1e-10);

/// Closed-loop LQG run of `sys.a()` with sensors `sensors` (state coordinates)
/// and actuators `actuators` (state coordinates that forces act on; must be
/// rows where sys.b() is non-zero). Disturbance drives every input channel of
/// sys.b(); measurement noise is added on the selected sensors.
LQGResult lqg_simulate(const LinearControlSystem& sys, const Selection& sensors,
                       const Selection& actuators, const Eigen::VectorXd& x0,
                       const LQGOptions& options = {});

}  // namespace sensorsel

#endif  // SENSORSEL_BALANCED_HPP
