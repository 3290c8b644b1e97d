// Monte-Carlo batch acquisition (qEI, qNoisyEI) over a fixed set of
// quasi-MC base samples, plus the random-search baseline and candidate batch
// optimization.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "swarmbo/gp.hpp"
#include "swarmbo/params.hpp"

namespace swarmbo {

enum class AcqKind { QEI, QNEI, Random };

std::string to_string(AcqKind kind);
AcqKind parse_acq_kind(const std::string &s);

struct AcqConfig {
  AcqKind kind = AcqKind::QEI;
  std::size_t n_mc = 512;
  std::size_t q = 3;
  std::size_t n_raw = 256;
  std::size_t n_starts = 8;
  std::uint64_t seed = 0;
  int max_iterations = 100;  // per refined start

  void validate() const;
};

struct CandidateBatch {
  std::vector<ParamVector> points;
  std::optional<double> acq_value;  // absent for random search
};

/// Closed-form expected improvement of N(mu, s^2) over `best`.
double analytic_ei(double mu, double s, double best);

/// MC acquisition with base samples fixed at construction, so that value()
/// is a deterministic, piecewise-smooth function of the candidate batch.
/// Works in unit-cube coordinates; reports utilities in objective units.
class McAcquisition {
public:
  /// qEI: mean over draws of max_j (f_j - best_y)^+.
  static McAcquisition expected_improvement(const GPModel &model, double best_y,
                                            std::size_t n_mc,
                                            std::size_t q_max,
                                            std::uint64_t seed);
  /// qNoisyEI: mean over joint draws of (max_j f_j - max_k f_obs,k)^+.
  static McAcquisition noisy_expected_improvement(
      const GPModel &model, const Eigen::MatrixXd &x_obs_raw, std::size_t n_mc,
      std::size_t q_max, std::uint64_t seed);

  std::size_t q_max() const { return static_cast<std::size_t>(zq_.cols()); }
  bool noisy() const { return noisy_; }

  double value_unit(const Eigen::MatrixXd &xq_unit) const;
  /// Value and gradient (same shape as xq_unit).
  double value_and_gradient_unit(const Eigen::MatrixXd &xq_unit,
                                 Eigen::MatrixXd &grad) const;
  double value(const Eigen::MatrixXd &xq_raw) const;

private:
  McAcquisition() = default;
  double evaluate(const Eigen::MatrixXd &xq, Eigen::MatrixXd *grad) const;

  const GPModel *model_ = nullptr;
  bool noisy_ = false;
  double best_y_ = 0.0;
  Eigen::MatrixXd kinv_;      // (K + noise I)^-1
  Eigen::MatrixXd zq_;        // N x q_max base samples for the candidates
  // qNoisyEI only
  Eigen::MatrixXd xo_;        // m x 9 unit-cube observed points
  Eigen::MatrixXd zo_;        // N x m base samples for observed points
  Eigen::MatrixXd p_;         // K^-1 k(X, Xo), n x m
  Eigen::MatrixXd e_;         // L_oo^-T, m x m
  Eigen::VectorXd baseline_;  // per-draw max over observed (objective units)
};

double qei_value(const GPModel &model, const Eigen::MatrixXd &xq_raw,
                 double best_y, const AcqConfig &cfg);
double qnei_value(const GPModel &model, const Eigen::MatrixXd &xq_raw,
                  const Eigen::MatrixXd &x_obs_raw, const AcqConfig &cfg);

/// qEI from a bare posterior (objective units after de-standardization).
double qei_from_posterior(const PosteriorGaussian &post, double best_y,
                          std::size_t n_mc, std::uint64_t seed);
/// qNoisyEI from a joint posterior whose first q coordinates are the
/// candidates and the rest the observed points.
double qnei_from_posterior(const PosteriorGaussian &joint, std::size_t q,
                           std::size_t n_mc, std::uint64_t seed);

/// Picks the next batch. Random search draws q uniform points; qEI/qNEI
/// score n_raw Sobol points, greedily grow the top n_starts into q-batches
/// and refine each with bounded L-BFGS on the fixed-sample estimate.
CandidateBatch optimize_batch(const GPModel &model, const Dataset &data,
                              const AcqConfig &cfg);

}  // namespace swarmbo
