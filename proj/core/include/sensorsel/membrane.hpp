#ifndef SENSORSEL_MEMBRANE_HPP
#define SENSORSEL_MEMBRANE_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include <sensorsel/pivoting.hpp>
#include <sensorsel/reconstruction.hpp>

namespace sensorsel {

/// Circular membrane of radius a with fixed rim, sampled on a polar grid.
/// Radii cover [0, a] inclusive; angles cover (-pi, pi] with -pi excluded.
/// Flattened rows are theta-major: row = i_theta * r_points + i_r.
/// The defaults keep angular orders m = 0..5 and five radial modes each,
/// 55 columns in all.
class MembraneModel {
 public:
  MembraneModel(int max_order = 5, int radial_modes = 5, double radius = 10.0,
                double wave_speed = 1.0, Index r_points = 101, Index theta_points = 101);

  int max_order() const noexcept { return max_order_; }
  int radial_modes() const noexcept { return radial_modes_; }
  double radius() const noexcept { return radius_; }
  double wave_speed() const noexcept { return wave_speed_; }
  const Eigen::VectorXd& r_grid() const noexcept { return r_grid_; }
  const Eigen::VectorXd& theta_grid() const noexcept { return theta_grid_; }
  /// (max_order + 1) x radial_modes table of Bessel zeros z_mn.
  const Eigen::MatrixXd& zeros() const noexcept { return zeros_; }
  double lambda(int m, int n) const;  ///< (z_mn / a)^2, n is 1-based

  Index grid_size() const noexcept { return r_grid_.size() * theta_grid_.size(); }
  /// Length of the coefficient vector: N (1 + 2M).
  Index coefficient_count() const noexcept { return radial_modes_ * (2 * max_order_ + 1); }
  double row_radius(Index row) const { return r_grid_(row % r_grid_.size()); }
  double row_theta(Index row) const { return theta_grid_(row / r_grid_.size()); }

  /// Angular frequency c sqrt(lambda) of each basis column, in basis order.
  Eigen::VectorXd column_frequencies() const;
  /// Envelope 1.5 / (n (m + 1)) of each coefficient, in basis order.
  Eigen::VectorXd coefficient_envelope() const;

 private:
  int max_order_;
  int radial_modes_;
  double radius_;
  double wave_speed_;
  Eigen::VectorXd r_grid_;
  Eigen::VectorXd theta_grid_;
  Eigen::MatrixXd zeros_;
};

/// Columns J_0(sqrt(l_0n) r) for n = 1..N, then cos(m theta) J_m and
/// sin(m theta) J_m interleaved for m = 1..M, n = 1..N.
Basis membrane_basis(const MembraneModel& model);
Eigen::MatrixXd membrane_modes(const MembraneModel& model);

/// u(t) = Psi cos(c sqrt(Lambda) t) b.
Eigen::VectorXd evolve(const MembraneModel& model, const Eigen::MatrixXd& psi,
                       const Eigen::VectorXd& b, double t);
Eigen::VectorXd evolve(const MembraneModel& model, const Eigen::VectorXd& b, double t);
/// Columns u(t_k).
Eigen::MatrixXd membrane_snapshots(const MembraneModel& model, const Eigen::MatrixXd& psi,
                                   const Eigen::VectorXd& b, const std::vector<double>& times);

/// A_mn, B_mn = g 1.5 / (n (m + 1)) with g standard normal, drawn from the
/// stream for (seed, draw).
Eigen::VectorXd sample_coefficients(const MembraneModel& model, std::uint64_t seed,
                                    std::uint64_t draw = 0);

/// f(r) = 0.6 + 0.5 cos(2 pi r / 13) at every grid row.
Eigen::VectorXd radial_cost(const MembraneModel& model);
double radial_cost_at(double r);

/// t = 0, step, 2 step, ... up to and including t_end (within round-off).
std::vector<double> time_grid(double step, double t_end);

/// Exact reconstruction error for data in the span of the analytic basis
/// without forming the snapshots. For X = Psi C and P = pinv(C_sel Psi) C_sel Psi,
/// ||X - X_hat||_F^2 = tr((I - P)^T G (I - P) S) with G = Psi^T Psi, S = C C^T.
class MembraneErrorEvaluator {
 public:
  /// One coefficient draw per initial condition, evolved over `times`.
  MembraneErrorEvaluator(const MembraneModel& model, const Eigen::MatrixXd& psi,
                         const std::vector<Eigen::VectorXd>& initial_conditions,
                         const std::vector<double>& times);

  /// Error of each initial condition.
  std::vector<double> errors(const Selection& sel) const;
  /// Average over initial conditions.
  double mean_error(const Selection& sel) const;
  Index conditions() const noexcept { return static_cast<Index>(second_moments_.size()); }

 private:
  Eigen::MatrixXd psi_;
  Eigen::MatrixXd gram_;
  std::vector<Eigen::MatrixXd> second_moments_;
  std::vector<double> norms_;
};

/// For each gamma: select p sensors on the adjoint of the analytic basis with
/// the radial cost, then average the reconstruction error over `n_ic` seeded
/// coefficient draws evolved over `times`.
std::vector<ParetoPoint> membrane_benchmark(const MembraneModel& model, Index p,
                                            const std::vector<double>& gammas, Index n_ic,
                                            const std::vector<double>& times, std::uint64_t seed);

}  // namespace sensorsel

#endif  // SENSORSEL_MEMBRANE_HPP
