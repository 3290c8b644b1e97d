// Stopping diagnostics reported once per epoch.
#pragma once

#include <vector>

#include "swarmbo/params.hpp"

namespace swarmbo {

inline constexpr double kDissimilarityEpsilon = 1e-6;

struct EpochMetrics {
  int epoch = 0;
  double max_post_var = 0.0;  // running max across epochs
  double dissimilarity = 0.0;
  double best_observed = 0.0;

  friend bool operator==(const EpochMetrics &, const EpochMetrics &) = default;
};

/// Running maximum of per-epoch variances. Throws on an empty list.
double max_posterior_variance(const std::vector<double> &per_epoch_vars);
/// Prefix maxima, same length as the input.
std::vector<double> running_max(const std::vector<double> &values);

/// Smallest cosine dissimilarity of x against the history, with the
/// denominator floored at kDissimilarityEpsilon. Throws on an empty history.
double dissimilarity(const std::vector<ParamArray> &history, const ParamArray &x);
double dissimilarity(const std::vector<ParamVector> &history, const ParamVector &x);

/// Mean over the batch of each point's dissimilarity against the history.
double batch_dissimilarity(const std::vector<ParamVector> &history,
                           const std::vector<ParamVector> &batch);

}  // namespace swarmbo
