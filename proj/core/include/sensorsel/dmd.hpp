#ifndef SENSORSEL_DMD_HPP
#define SENSORSEL_DMD_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include <sensorsel/pivoting.hpp>
#include <sensorsel/reconstruction.hpp>

namespace sensorsel {

/// Exact DMD fit: modes, discrete and continuous eigenvalues, amplitudes.
struct DMDModel {
  Eigen::MatrixXcd modes;        ///< n x r
  Eigen::VectorXcd lambda;       ///< discrete-time eigenvalues
  Eigen::VectorXcd omega;        ///< log(lambda) / dt, principal branch
  Eigen::VectorXcd amplitudes;   ///< pinv(modes) x_1
  double dt = 1.0;
  Index snapshots = 0;           ///< m used for the fit
  Eigen::MatrixXd reduced_operator;  ///< U_r^* X_2 V_r Sigma_r^-1
  Eigen::MatrixXcd eigenvectors;     ///< W with A_tilde W = W Lambda
  /// Eigenvalues close to the negative real axis, where log() is branch-cut
  /// sensitive.
  std::vector<bool> nyquist_adjacent;
  std::vector<std::string> warnings;

  Index states() const noexcept { return modes.rows(); }
  Index rank() const noexcept { return modes.cols(); }
  Basis basis() const;
};

/// Fits on X = [x_1 ... x_m] with spacing dt. If sigma_r(X_1) falls below
/// 1e-12 sigma_1 the rank is reduced and a warning recorded.
DMDModel fit_dmd(const Eigen::MatrixXd& x, Index r, double dt);

/// Re(Psi Lambda^(k-1) b), k >= 1.
Eigen::VectorXd dmd_predict(const DMDModel& model, Index k);
/// Re(Psi exp(Omega t) b), t >= 0.
Eigen::VectorXd dmd_predict_time(const DMDModel& model, double t);

struct SplitErrors {
  double interpolation = 0.0;  ///< E_int on the training block
  double extrapolation = 0.0;  ///< E_ext on the held-out block
  Selection selection;
  Index train_snapshots = 0;
  Index test_snapshots = 0;
};

/// Fits DMD (rank r) on the first floor(train_fraction * m) snapshots, then
/// reconstructs both blocks from the given sensors in the DMD basis.
SplitErrors train_test_split_errors(const Eigen::MatrixXd& x, double train_fraction, Index r,
                                    const Selection& selection, double dt = 1.0);

/// As above, selecting p sensors with cost-constrained QR on the fitted modes.
SplitErrors train_test_split_errors(const Eigen::MatrixXd& x, double train_fraction, Index r,
                                    Index p, const CostField& cost, double dt = 1.0);

struct KalmanOptions {
  double process_noise = 1e-6;
  double initial_covariance = 1.0;
  double divergence_trace = 1e12;
};

/// Filter state on realified amplitudes (Re b; Im b).
struct KalmanState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

struct KalmanResult {
  Eigen::MatrixXcd amplitudes;  ///< r x m filtered amplitudes
  Eigen::MatrixXd states;       ///< n x m reconstructions Re(Psi b_k)
  KalmanState final_state;
  double max_asymmetry = 0.0;
  double min_eigenvalue = 0.0;  ///< smallest eigenvalue of the final covariance
};

/// Discrete Kalman filter over DMD amplitudes: b_{k+1} = Lambda b_k,
/// y_k = Re(C Psi b_k) + v_k with v_k ~ N(0, noise_var I). Joseph-form update.
KalmanResult kalman_estimate(const DMDModel& model, const Selection& sel,
                             const Eigen::MatrixXd& measurements, double noise_var,
                             const KalmanOptions& options = {});

/// Realified propagator [[Re L, -Im L], [Im L, Re L]] for diagonal L.
Eigen::MatrixXd realified_propagator(const Eigen::VectorXcd& lambda);
/// Realified measurement map [Re T, -Im T] for T = C Psi.
Eigen::MatrixXd realified_measurement(const Eigen::MatrixXcd& theta);

/// Measurement noise variance for a relative level: level times the mean
/// per-element variance of the (training) data rows.
double relative_noise_variance(const Eigen::MatrixXd& x, double level);

struct SyntheticFieldOptions {
  Index points = 128;
  Index snapshots = 400;
  double dt = 0.05;
  /// Standard deviation of i.i.d. noise added to every entry.
  double noise = 0.0;
  std::uint64_t seed = 0;
};

/// Quasi-periodic 1-D field on [0, 1): three traveling waves with distinct
/// wavenumbers and incommensurate frequencies plus a slowly drifting localized
/// bump (the trend), optionally with additive noise.
Eigen::MatrixXd synthetic_quasi_periodic_field(const SyntheticFieldOptions& options);

/// Land/sea helpers for gridded ocean data. `mask` is rows x cols with 1 for
/// sea and 0 for land; flattened indices are row-major (row * cols + col).
struct CoastalCost {
  Eigen::VectorXd eta;          ///< one entry per grid cell
  std::vector<Index> sea_cells; ///< allowed candidates
};

/// Sea cells within `distance` cells (Chebyshev) of land get `low`, all other
/// sea cells `high`. Land cells carry `high` and are excluded from sea_cells.
CoastalCost coastal_cost(const Eigen::MatrixXd& mask, Index distance = 2, double low = 0.0,
                         double high = 1.0, bool wrap_columns = false);

}  // namespace sensorsel

#endif  // SENSORSEL_DMD_HPP
