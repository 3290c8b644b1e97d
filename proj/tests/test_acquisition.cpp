#include <doctest.h>

#include <random>

#include "gp_fixtures.hpp"
#include "oracles.hpp"
#include "swarmbo/acquisition.hpp"

using namespace swarmbo;

namespace {

GPModel random_model(std::mt19937_64 &rng, int n) {
  const Dataset data = fixture::random_dataset(rng, n);
  GPHyperparams h = fixture::random_hyper(rng);
  h.length_scales = h.length_scales.cwiseMin(3.0);
  return GPModel::build(data, h);
}

// Central-difference check of the pathwise gradient away from kinks.
void check_gradient(const McAcquisition &acq, const Eigen::MatrixXd &x) {
  Eigen::MatrixXd g;
  const double v = acq.value_and_gradient_unit(x, g);
  CHECK(v == acq.value_unit(x));
  REQUIRE(g.rows() == x.rows());
  const double scale = std::max(g.cwiseAbs().maxCoeff(), 1e-6);
  for (int i = 0; i < x.rows(); ++i)
    for (int d = 0; d < x.cols(); ++d) {
      Eigen::MatrixXd xp = x, xm = x;
      xp(i, d) += 1e-7;
      xm(i, d) -= 1e-7;
      const double fd = (acq.value_unit(xp) - acq.value_unit(xm)) / 2e-7;
      CHECK(std::abs(fd - g(i, d)) <= 1e-4 * scale);
    }
}

}  // namespace

TEST_SUITE("acquisition") {

TEST_CASE("config") {
  CHECK(parse_acq_kind("qei") == AcqKind::QEI);
  CHECK(parse_acq_kind("qnei") == AcqKind::QNEI);
  CHECK(parse_acq_kind("random") == AcqKind::Random);
  CHECK_THROWS(parse_acq_kind("ucb"));
  AcqConfig c;
  CHECK(c.n_mc == 512);
  CHECK(c.q == 3);
  CHECK(c.n_raw == 256);
  CHECK(c.n_starts == 8);
  c.n_mc = 0;
  CHECK_THROWS(c.validate());
}

TEST_CASE("zero-variance posteriors") {
  PosteriorGaussian p;
  p.mean = Eigen::Vector3d(-0.5, -0.6, -0.4);
  p.cov = Eigen::MatrixXd::Zero(3, 3);
  CHECK(qei_from_posterior(p, -0.4, 128, 1) == 0.0);
  p.mean[1] = -0.4 + 0.3;
  CHECK(qei_from_posterior(p, -0.4, 128, 1) == doctest::Approx(0.3).epsilon(1e-12));

  // first two candidates, last two observed
  PosteriorGaussian j;
  j.mean = Eigen::Vector4d(-0.1, -0.3, -0.5, -0.3);
  j.cov = Eigen::MatrixXd::Zero(4, 4);
  CHECK(qnei_from_posterior(j, 2, 128, 1) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("q=1 qEI agrees with closed-form EI") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 10; ++k) {
    const GPModel m = random_model(rng, 10);
    const Eigen::MatrixXd x = fixture::to_raw(fixture::random_unit(rng, 1));
    const auto post = m.posterior(x);
    const double mu = post.raw_mean()[0], s = std::sqrt(post.raw_variance()[0]);
    const double best = m.data().y.maxCoeff();
    AcqConfig cfg;
    cfg.n_mc = 8192;
    cfg.seed = static_cast<std::uint64_t>(k);
    const double mc = qei_value(m, x, best, cfg);
    const double ei = oracle::expected_improvement(mu, s, best);
    // tail cases are judged on the posterior scale
    CHECK(std::abs(mc - ei) < 1e-3 * s);
    CHECK(analytic_ei(mu, s, best) == doctest::Approx(ei).epsilon(1e-12));
  }
}

TEST_CASE("qNEI vanishes on the observed points") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 5; ++k) {
    const GPModel m = random_model(rng, 6);
    AcqConfig cfg;
    cfg.seed = 3;
    const double v = qnei_value(m, m.data().X, m.data().X, cfg);
    CHECK(v >= 0.0);
    // equal up to the diagonal jitter of the candidate factorization
    CHECK(v < 1e-3 * m.y_std());
  }
}

TEST_CASE("qNEI approaches qEI in the noiseless limit") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 10; ++k) {
    const Dataset data = fixture::random_dataset(rng, 8);
    GPHyperparams h = fixture::random_hyper(rng);
    h.noise_var = 1e-6;
    const GPModel m = GPModel::build(data, h);
    const Eigen::MatrixXd xq = fixture::to_raw(fixture::random_unit(rng, 2));
    const std::size_t n = 4096;
    const std::uint64_t seed = 17 + static_cast<std::uint64_t>(k);
    const auto qnei = McAcquisition::noisy_expected_improvement(m, data.X, n, 2, seed);
    const auto qei = McAcquisition::expected_improvement(m, data.y.maxCoeff(), n, 2, seed);
    // paired per-draw differences give the standard error
    const Eigen::MatrixXd xu = GPModel::to_unit(xq);
    const double a = qnei.value_unit(xu), b = qei.value_unit(xu);
    const auto post = m.posterior(xq);
    const double spread = post.raw_variance().cwiseSqrt().maxCoeff();
    const double se = std::max(spread, 1e-6) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(a - b) <= 3.0 * se + 1e-3 * m.y_std());
  }
}

TEST_CASE("acquisition properties") {
  std::mt19937_64 rng(4);
  const GPModel m = random_model(rng, 12);
  const double best = m.data().y.maxCoeff();
  const auto acq = McAcquisition::expected_improvement(m, best, 256, 3, 5);
  const auto lower = McAcquisition::expected_improvement(m, best - 0.05, 256, 3, 5);
  for (int k = 0; k < 20; ++k) {
    const Eigen::MatrixXd x = fixture::random_unit(rng, 3);
    const double v3 = acq.value_unit(x);
    CHECK(v3 >= 0.0);
    CHECK(acq.value_unit(x) == v3);
    CHECK(lower.value_unit(x) >= v3);
    CHECK(v3 >= acq.value_unit(x.topRows(2)));
    // same draws per column; only summation order differs
    CHECK(acq.value_unit(x.topRows(2)) >= acq.value_unit(x.topRows(1)) - 1e-14);
  }
  CHECK_THROWS(acq.value_unit(fixture::random_unit(rng, 4)));
  CHECK_THROWS(McAcquisition::expected_improvement(GPModel{}, 0.0, 16, 1, 1));
}

TEST_CASE("quasi-MC error shrinks with more samples") {
  std::mt19937_64 rng(5);
  double err_small = 0.0, err_big = 0.0;
  for (int k = 0; k < 30; ++k) {
    const GPModel m = random_model(rng, 8);
    const Eigen::MatrixXd x = fixture::to_raw(fixture::random_unit(rng, 1));
    const auto post = m.posterior(x);
    const double best = m.data().y.maxCoeff() - 0.5 * std::sqrt(post.raw_variance()[0]);
    const double ei = oracle::expected_improvement(post.raw_mean()[0],
                                                   std::sqrt(post.raw_variance()[0]), best);
    for (std::uint64_t s = 0; s < 4; ++s) {
      AcqConfig c;
      c.seed = s + 100 * static_cast<std::uint64_t>(k);
      c.n_mc = 256;
      const double sd = std::sqrt(post.raw_variance()[0]);
      err_small += std::abs(qei_value(m, x, best, c) - ei) / sd;
      c.n_mc = 1024;
      err_big += std::abs(qei_value(m, x, best, c) - ei) / sd;
    }
  }
  // at least the Monte-Carlo rate: quadrupling n halves the error
  CHECK(err_big <= 0.5 * err_small);
}

TEST_CASE("pathwise gradient matches finite differences") {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 6; ++k) {
    const GPModel m = random_model(rng, 10);
    const double best = m.data().y.maxCoeff();
    const Eigen::MatrixXd x = fixture::random_unit(rng, 3).array() * 0.8 + 0.1;
    check_gradient(McAcquisition::expected_improvement(m, best - 0.02, 128, 3, 7), x);
    check_gradient(McAcquisition::noisy_expected_improvement(m, m.data().X, 128, 3, 7), x);
    check_gradient(McAcquisition::expected_improvement(m, best - 0.02, 128, 3, 7), x.topRows(1));
  }
}

TEST_CASE("optimize_batch random kind") {
  std::mt19937_64 rng(7);
  const Dataset data = fixture::random_dataset(rng, 5);
  AcqConfig c;
  c.kind = AcqKind::Random;
  c.seed = 3;
  const auto b = optimize_batch(GPModel{}, data, c);
  CHECK(b.points.size() == 3);
  CHECK_FALSE(b.acq_value.has_value());
  for (const auto &p : b.points)
    CHECK(p.in_bounds());
  CHECK(optimize_batch(GPModel{}, data, c).points == b.points);
}

TEST_CASE("optimize_batch finds the single-point maximizer") {
  // Only the first coordinate matters; the EI surface is a 1-D curve.
  Dataset data;
  const int n = 7;
  Eigen::MatrixXd u = Eigen::MatrixXd::Constant(n, 9, 0.5);
  data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    u(i, 0) = 0.05 + 0.15 * i;
    data.y[i] = -std::pow(u(i, 0) - 0.58, 2) - 0.3;
  }
  data.X = fixture::to_raw(u);
  GPHyperparams h;
  h.length_scales.setConstant(1e3);
  h.length_scales[0] = 0.25;
  h.noise_var = 1e-6;
  const GPModel m = GPModel::build(data, h);
  const double best = data.y.maxCoeff();

  // dense grid oracle of closed-form EI
  double arg = 0.0, top = -1.0;
  Eigen::MatrixXd g = Eigen::MatrixXd::Constant(1, 9, 0.5);
  for (int i = 0; i <= 10000; ++i) {
    g(0, 0) = i / 10000.0;
    const auto post = m.posterior_unit(g);
    const double ei = oracle::expected_improvement(post.raw_mean()[0],
                                                   std::sqrt(std::max(post.raw_variance()[0], 0.0)), best);
    if (ei > top) {
      top = ei;
      arg = g(0, 0);
    }
  }
  AcqConfig c;
  c.q = 1;
  c.n_mc = 2048;
  c.seed = 1;
  const auto b = optimize_batch(m, data, c);
  REQUIRE(b.points.size() == 1);
  CHECK(std::abs(b.points[0].to_unit()[0] - arg) < 1e-2);
  CHECK(b.acq_value.has_value());
  CHECK(*b.acq_value == doctest::Approx(top).epsilon(0.05));
}

TEST_CASE("optimize_batch stays in bounds and is deterministic") {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 100; ++k) {
    const GPModel m = random_model(rng, 6);
    AcqConfig c;
    c.kind = k % 2 ? AcqKind::QNEI : AcqKind::QEI;
    c.n_mc = 32;
    c.n_raw = 16;
    c.n_starts = 2;
    c.max_iterations = 20;
    c.seed = static_cast<std::uint64_t>(k);
    const auto b = optimize_batch(m, m.data(), c);
    CHECK(b.points.size() == 3);
    for (const auto &p : b.points)
      CHECK(p.in_bounds());
    CHECK(*b.acq_value >= 0.0);
    if (k < 3)
      CHECK(optimize_batch(m, m.data(), c).points == b.points);
  }
}

}
