// Exact Gaussian-process surrogate over the unit-cube image of the parameter
// bounds: constant mean, Matern-5/2 ARD covariance, Gaussian observation
// noise. Outputs are standardized internally; PosteriorGaussian carries the
// transform back to objective units.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "swarmbo/params.hpp"
#include "swarmbo/qmc.hpp"

namespace swarmbo {

class GPError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Dataset {
  Eigen::MatrixXd X;  // n x 9, raw parameter units
  Eigen::VectorXd y;  // n objective values

  Eigen::Index size() const { return y.size(); }
  void validate() const;
  void append(const ParamVector &p, double value);
};

struct GPHyperparams {
  double mean_const = 0.0;  // standardized units
  double output_scale = 1.0;
  ParamArray length_scales = ParamArray::Constant(0.5);
  double noise_var = 1e-3;

  static constexpr double kMeanBound = 10.0;
  static constexpr double kOutputScaleMin = 1e-4;
  static constexpr double kOutputScaleMax = 1e2;
  static constexpr double kLengthMin = 1e-3;
  static constexpr double kLengthMax = 1e3;
  static constexpr double kNoiseMin = 1e-6;
  static constexpr double kNoiseMax = 1.0;
  static constexpr int kNumTheta = 3 + static_cast<int>(kNumParams);

  /// Optimizer coordinates: [mean, log s, log l_1..9, log noise].
  Eigen::VectorXd to_theta() const;
  static GPHyperparams from_theta(const Eigen::VectorXd &theta);
  static Eigen::VectorXd theta_lower();
  static Eigen::VectorXd theta_upper();

  friend bool operator==(const GPHyperparams &, const GPHyperparams &) =
      default;
};

/// Matern-5/2 ARD covariance between two unit-cube points (no noise term).
double kernel(const ParamArray &a, const ParamArray &b,
              const GPHyperparams &hyper);

/// Rows of A against rows of B (unit-cube points).
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd &A,
                              const Eigen::MatrixXd &B,
                              const GPHyperparams &hyper);

/// Gradient of kernel(x, other) with respect to x.
ParamArray kernel_gradient(const ParamArray &x, const ParamArray &other,
                           const GPHyperparams &hyper);

struct PosteriorGaussian {
  Eigen::VectorXd mean;  // standardized units
  Eigen::MatrixXd cov;   // latent f, standardized units
  double y_mean = 0.0;
  double y_std = 1.0;

  Eigen::VectorXd raw_mean() const;
  Eigen::MatrixXd raw_cov() const;
  Eigen::VectorXd raw_variance() const;
};

/// Diagonal jitters tried in turn when a covariance is not numerically PD.
inline constexpr double kJitterLadder[] = {0.0, 1e-8, 1e-6, 1e-4};

/// Cholesky factor of `m` with jitter escalation; throws GPError when even
/// the largest jitter fails. Reports the jitter used when asked.
Eigen::MatrixXd robust_cholesky(const Eigen::MatrixXd &m,
                                double *jitter_used = nullptr);

class GPModel {
public:
  GPModel() = default;

  /// Normalizes the data and factorizes K + noise*I. Throws GPError on PD
  /// failure after jitter escalation.
  static GPModel build(Dataset data, GPHyperparams hyper);

  bool fitted() const { return data_.size() > 0; }
  const Dataset &data() const { return data_; }
  const GPHyperparams &hyper() const { return hyper_; }
  double y_mean() const { return y_mean_; }
  double y_std() const { return y_std_; }
  double jitter() const { return jitter_; }

  const Eigen::MatrixXd &unit_inputs() const { return xu_; }
  const Eigen::VectorXd &standardized_targets() const { return ys_; }
  const Eigen::MatrixXd &chol() const { return chol_; }
  const Eigen::VectorXd &alpha() const { return alpha_; }
  /// (K + noise*I)^-1, formed on demand.
  Eigen::MatrixXd k_inverse() const;

  double mll() const;

  PosteriorGaussian posterior(const Eigen::MatrixXd &xq_raw) const;
  PosteriorGaussian posterior_unit(const Eigen::MatrixXd &xq_unit) const;
  PosteriorGaussian posterior(const ParamVector &p) const;

  /// Maps raw-unit rows into the unit cube.
  static Eigen::MatrixXd to_unit(const Eigen::MatrixXd &raw);
  static Eigen::MatrixXd from_unit(const Eigen::MatrixXd &unit);

private:
  void require_fitted() const;

  Dataset data_;
  GPHyperparams hyper_;
  Eigen::MatrixXd xu_;
  Eigen::VectorXd ys_;
  double y_mean_ = 0.0;
  double y_std_ = 1.0;
  Eigen::MatrixXd chol_;  // lower factor of K + (noise + jitter) I
  Eigen::VectorXd alpha_;
  double jitter_ = 0.0;
};

/// Marginal log likelihood of standardized targets `ys` at unit inputs `xu`
/// and its gradient with respect to GPHyperparams::to_theta() coordinates.
/// Returns nullopt when the covariance cannot be factorized.
struct MllEvaluation {
  double value = 0.0;
  Eigen::VectorXd gradient;
};
std::optional<MllEvaluation> mll_with_gradient(const Eigen::MatrixXd &xu,
                                               const Eigen::VectorXd &ys,
                                               const GPHyperparams &hyper);

double mll(const GPModel &model);

struct FitOptions {
  int restarts = 8;
  int max_iterations = 200;
  /// Replaces the first restart's initial point (clamped into bounds).
  std::optional<GPHyperparams> warm_start;
};

struct FitReport {
  std::vector<double> start_mll;  // MLL at each restart's initial point
  std::vector<double> final_mll;  // MLL after each restart's optimization
  int best_restart = -1;
};

/// Maximizes the MLL with bounded L-BFGS from Latin-hypercube starts in
/// log-space. Deterministic given `seed`.
GPModel fit(const Dataset &data, std::uint64_t seed,
            const FitOptions &opts = {}, FitReport *report = nullptr);

/// n_draws x q matrix, in the same (standardized) units as post.mean.
Eigen::MatrixXd sample_posterior(const PosteriorGaussian &post,
                                 std::size_t n_draws,
                                 const SobolNormalSampler &sampler);

void save_checkpoint(const GPModel &model, const std::string &path);
GPModel load_checkpoint(const std::string &path);

}  // namespace swarmbo
