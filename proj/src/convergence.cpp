#include "swarmbo/convergence.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace swarmbo {

double max_posterior_variance(const std::vector<double> &per_epoch_vars) {
  if (per_epoch_vars.empty())
    throw std::invalid_argument("max_posterior_variance: empty list");
  return *std::max_element(per_epoch_vars.begin(), per_epoch_vars.end());
}

std::vector<double> running_max(const std::vector<double> &values) {
  std::vector<double> out;
  out.reserve(values.size());
  double m = -std::numeric_limits<double>::infinity();
  for (double v : values) {
    m = std::max(m, v);
    out.push_back(m);
  }
  return out;
}

double dissimilarity(const std::vector<ParamArray> &history, const ParamArray &x) {
  if (history.empty())
    throw std::invalid_argument("dissimilarity: empty history");
  const double nx = x.norm();
  double best = std::numeric_limits<double>::infinity();
  for (const auto &h : history) {
    const double denom = std::max(h.norm() * nx, kDissimilarityEpsilon);
    const double d = 1.0 - h.dot(x) / denom;
    best = std::min(best, std::clamp(d, 0.0, 2.0));
  }
  return best;
}

double dissimilarity(const std::vector<ParamVector> &history, const ParamVector &x) {
  std::vector<ParamArray> h;
  h.reserve(history.size());
  for (const auto &p : history)
    h.push_back(p.to_array());
  return dissimilarity(h, x.to_array());
}

double batch_dissimilarity(const std::vector<ParamVector> &history,
                           const std::vector<ParamVector> &batch) {
  if (batch.empty())
    throw std::invalid_argument("batch_dissimilarity: empty batch");
  double total = 0.0;
  for (const auto &p : batch)
    total += dissimilarity(history, p);
  return total / static_cast<double>(batch.size());
}

}  // namespace swarmbo
