#include "swarmbo/qmc.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/erf.hpp>
#include <boost/random/sobol.hpp>

namespace swarmbo {
namespace {

  constexpr int kBits = 32;

  struct Scramble {
    std::uint32_t rows[kBits];  // rows[k] produces output bit (31 - k)
    std::uint32_t shift;
  };

  // Lower-triangular (MSB-first) random binary matrix with unit diagonal.
  Scramble make_scramble(std::mt19937_64 &rng) {
    Scramble s{};
    for (int k = 0; k < kBits; ++k) {
      const std::uint32_t own = 1u << (kBits - 1 - k);
      const std::uint32_t higher = k == 0 ? 0u : ~((own << 1) - 1u);
      s.rows[k] = own | (static_cast<std::uint32_t>(rng()) & higher);
    }
    s.shift = static_cast<std::uint32_t>(rng());
    return s;
  }

  std::uint32_t apply(const Scramble &s, std::uint32_t x) {
    std::uint32_t y = 0;
    for (int k = 0; k < kBits; ++k) {
      const auto bit = static_cast<std::uint32_t>(std::popcount(x & s.rows[k]) & 1);
      y |= bit << (kBits - 1 - k);
    }
    return y ^ s.shift;
  }

}  // namespace

SobolNormalSampler::SobolNormalSampler(std::size_t dim, std::uint64_t seed)
    : dim_(dim), seed_(seed) {
  if (dim == 0 || dim > BOOST_RANDOM_SOBOL_MAX_DIMENSION)
    throw std::invalid_argument("SobolNormalSampler: unsupported dimension");
}

Eigen::MatrixXd SobolNormalSampler::draw_uniform(std::size_t n) const {
  std::mt19937_64 rng(seed_);
  std::vector<Scramble> scr;
  scr.reserve(dim_);
  for (std::size_t d = 0; d < dim_; ++d)
    scr.push_back(make_scramble(rng));

  boost::random::sobol_engine<std::uint32_t, 32> engine(dim_);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n),
                      static_cast<Eigen::Index>(dim_));
  constexpr double kScale = 1.0 / 4294967296.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dim_; ++d) {
      // boost starts at the second point; the origin comes first
      const std::uint32_t x = i == 0 ? 0u : engine();
      const std::uint32_t y = apply(scr[d], x);
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) =
          (static_cast<double>(y) + 0.5) * kScale;
    }
  }
  return out;
}

Eigen::MatrixXd SobolNormalSampler::draw(std::size_t n) const {
  return draw_uniform(n).unaryExpr([](double u) { return normal_quantile(u); });
}

double normal_quantile(double u) {
  return std::numbers::sqrt2 * boost::math::erf_inv(2.0 * u - 1.0);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace swarmbo
