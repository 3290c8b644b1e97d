// Scrambled Sobol sequences mapped to standard normal draws.
#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace swarmbo {

/// Draws rows of i.i.d.-like N(0, 1) vectors from a Sobol sequence with a
/// random linear matrix scramble and digital shift per dimension. Output is a
/// deterministic function of (dim, seed, n).
class SobolNormalSampler {
public:
  SobolNormalSampler(std::size_t dim, std::uint64_t seed);

  std::size_t dim() const { return dim_; }
  /// n x dim matrix of standard normal draws (the first n Sobol points).
  Eigen::MatrixXd draw(std::size_t n) const;
  /// n x dim matrix of scrambled uniforms in (0, 1).
  Eigen::MatrixXd draw_uniform(std::size_t n) const;

private:
  std::size_t dim_;
  std::uint64_t seed_;
};

/// Inverse standard normal CDF.
double normal_quantile(double u);
double normal_cdf(double z);
double normal_pdf(double z);

}  // namespace swarmbo
