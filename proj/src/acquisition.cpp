#include "swarmbo/acquisition.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "swarmbo/lbfgsb.hpp"
#include "swarmbo/seeding.hpp"

namespace swarmbo {
namespace {

  // Reverse-mode Cholesky: given L = chol(C) and dJ/dL (lower), returns the
  // symmetric dJ/dC.
  Eigen::MatrixXd cholesky_backward(const Eigen::MatrixXd &L,
                                    const Eigen::MatrixXd &L_bar) {
    Eigen::MatrixXd p = L.transpose() * L_bar.triangularView<Eigen::Lower>().toDenseMatrix();
    p = p.triangularView<Eigen::Lower>();
    p.diagonal() *= 0.5;
    // L^-T p L^-1
    L.triangularView<Eigen::Lower>().transpose().solveInPlace(p);
    Eigen::MatrixXd pt = p.transpose();
    L.triangularView<Eigen::Lower>().transpose().solveInPlace(pt);
    const Eigen::MatrixXd c_bar = pt.transpose();
    return 0.5 * (c_bar + c_bar.transpose());
  }

  // Accumulates sum_l w(j,l) * grad_x k(x_j, other_l) into grad.row(j).
  void accumulate_kernel_gradient(const Eigen::MatrixXd &xq,
                                  const Eigen::MatrixXd &other,
                                  const Eigen::MatrixXd &weights,
                                  const GPHyperparams &hyper,
                                  Eigen::MatrixXd &grad) {
    for (Eigen::Index j = 0; j < xq.rows(); ++j) {
      const ParamArray xj = xq.row(j).transpose();
      ParamArray acc = ParamArray::Zero();
      for (Eigen::Index l = 0; l < other.rows(); ++l) {
        const double w = weights(j, l);
        if (w == 0.0)
          continue;
        acc += w * kernel_gradient(xj, other.row(l).transpose(), hyper);
      }
      grad.row(j) += acc.transpose();
    }
  }

  Eigen::MatrixXd unit_rows(const Eigen::MatrixXd &xq_raw) {
    for (Eigen::Index i = 0; i < xq_raw.rows(); ++i) {
      const ParamArray row = xq_raw.row(i).transpose();
      ParamVector::from_array(row).validate();
    }
    return GPModel::to_unit(xq_raw);
  }

}  // namespace

std::string to_string(AcqKind kind) {
  switch (kind) {
  case AcqKind::QEI: return "qei";
  case AcqKind::QNEI: return "qnei";
  case AcqKind::Random: return "random";
  }
  return "unknown";
}

AcqKind parse_acq_kind(const std::string &s) {
  if (s == "qei" || s == "qEI")
    return AcqKind::QEI;
  if (s == "qnei" || s == "qNEI" || s == "qNoisyEI")
    return AcqKind::QNEI;
  if (s == "random")
    return AcqKind::Random;
  throw std::invalid_argument("unknown acquisition kind '" + s + "'");
}

void AcqConfig::validate() const {
  if (n_mc < 1)
    throw std::invalid_argument("n_mc must be >= 1");
  if (q < 1)
    throw std::invalid_argument("q must be >= 1");
  if (n_raw < 1 || n_starts < 1)
    throw std::invalid_argument("n_raw and n_starts must be >= 1");
}

double analytic_ei(double mu, double s, double best) {
  if (s <= 0.0)
    return std::max(mu - best, 0.0);
  const double z = (mu - best) / s;
  return (mu - best) * normal_cdf(z) + s * normal_pdf(z);
}

McAcquisition McAcquisition::expected_improvement(const GPModel &model,
                                                  double best_y,
                                                  std::size_t n_mc,
                                                  std::size_t q_max,
                                                  std::uint64_t seed) {
  if (!model.fitted())
    throw GPError("acquisition requires a fitted model");
  McAcquisition a;
  a.model_ = &model;
  a.noisy_ = false;
  a.best_y_ = best_y;
  a.kinv_ = model.k_inverse();
  a.zq_ = SobolNormalSampler(q_max, seed).draw(n_mc);
  return a;
}

McAcquisition McAcquisition::noisy_expected_improvement(
    const GPModel &model, const Eigen::MatrixXd &x_obs_raw, std::size_t n_mc,
    std::size_t q_max, std::uint64_t seed) {
  if (!model.fitted())
    throw GPError("acquisition requires a fitted model");
  if (x_obs_raw.rows() < 1)
    throw std::invalid_argument("qNoisyEI requires observed points");

  McAcquisition a;
  a.model_ = &model;
  a.noisy_ = true;
  a.kinv_ = model.k_inverse();
  a.xo_ = unit_rows(x_obs_raw);
  const auto m = a.xo_.rows();

  const Eigen::MatrixXd z =
      SobolNormalSampler(q_max + static_cast<std::size_t>(m), seed).draw(n_mc);
  a.zq_ = z.leftCols(static_cast<Eigen::Index>(q_max));
  a.zo_ = z.rightCols(m);

  const GPHyperparams &h = model.hyper();
  const Eigen::MatrixXd &xu = model.unit_inputs();
  a.p_ = a.kinv_ * kernel_matrix(xu, a.xo_, h);

  const PosteriorGaussian post = model.posterior_unit(a.xo_);
  const Eigen::MatrixXd l_oo = robust_cholesky(post.cov);
  a.e_ = Eigen::MatrixXd::Identity(m, m);
  l_oo.triangularView<Eigen::Lower>().solveInPlace(a.e_);
  a.e_.transposeInPlace();

  // Observed-point draws do not depend on the candidates: cache their max.
  Eigen::MatrixXd f_obs = l_oo * a.zo_.transpose();
  f_obs.colwise() += post.mean;
  a.baseline_ =
      (model.y_mean() + model.y_std() * f_obs.colwise().maxCoeff().array())
          .transpose();
  return a;
}

double McAcquisition::evaluate(const Eigen::MatrixXd &xq,
                               Eigen::MatrixXd *grad) const {
  const auto q = xq.rows();
  if (q < 1 || q > zq_.cols())
    throw std::invalid_argument("batch size exceeds base-sample dimension");
  const GPModel &model = *model_;
  const GPHyperparams &h = model.hyper();
  const Eigen::MatrixXd &xu = model.unit_inputs();
  const auto n_draws = zq_.rows();
  const double y_mean = model.y_mean();
  const double y_std = model.y_std();

  const Eigen::MatrixXd kq = kernel_matrix(xq, xu, h);
  const Eigen::MatrixXd kqq = kernel_matrix(xq, xq, h);
  const Eigen::VectorXd mean = (kq * model.alpha()).array() + h.mean_const;
  const Eigen::MatrixXd t = kq * kinv_;
  Eigen::MatrixXd c = kqq - t * kq.transpose();

  Eigen::MatrixXd kqo, s;
  if (noisy_) {
    kqo = kernel_matrix(xq, xo_, h);
    s = (kqo - kq * p_) * e_;
    c.noalias() -= s * s.transpose();
  }
  c = 0.5 * (c + c.transpose());
  const Eigen::MatrixXd lc = robust_cholesky(c);

  const auto zq = zq_.leftCols(q);
  Eigen::MatrixXd f = lc * zq.transpose();  // q x N
  if (noisy_)
    f.noalias() += s * zo_.transpose();
  f.colwise() += mean;

  double total = 0.0;
  std::vector<Eigen::Index> arg(static_cast<std::size_t>(n_draws), -1);
  for (Eigen::Index i = 0; i < n_draws; ++i) {
    Eigen::Index j_best = 0;
    const double f_max = f.col(i).maxCoeff(&j_best);
    const double base = noisy_ ? baseline_[i] : best_y_;
    const double imp = y_mean + y_std * f_max - base;
    if (imp > 0.0) {
      total += imp;
      arg[static_cast<std::size_t>(i)] = j_best;
    }
  }
  const double value = total / static_cast<double>(n_draws);
  if (!grad)
    return value;

  // Backward pass.
  const double w = y_std / static_cast<double>(n_draws);
  Eigen::MatrixXd g_f = Eigen::MatrixXd::Zero(q, n_draws);
  for (Eigen::Index i = 0; i < n_draws; ++i)
    if (arg[static_cast<std::size_t>(i)] >= 0)
      g_f(arg[static_cast<std::size_t>(i)], i) = w;

  const Eigen::VectorXd mean_bar = g_f.rowwise().sum();
  const Eigen::MatrixXd lc_bar = g_f * zq;
  const Eigen::MatrixXd c_bar = cholesky_backward(lc, lc_bar);

  Eigen::MatrixXd kq_bar = mean_bar * model.alpha().transpose();
  kq_bar.noalias() -= 2.0 * c_bar * t;

  grad->setZero(q, xq.cols());
  if (noisy_) {
    Eigen::MatrixXd s_bar = g_f * zo_;
    s_bar.noalias() -= 2.0 * c_bar * s;
    const Eigen::MatrixXd m_bar = s_bar * e_.transpose();
    kq_bar.noalias() -= m_bar * p_.transpose();
    accumulate_kernel_gradient(xq, xo_, m_bar, h, *grad);
  }
  accumulate_kernel_gradient(xq, xu, kq_bar, h, *grad);
  Eigen::MatrixXd kqq_bar = 2.0 * c_bar;
  kqq_bar.diagonal().setZero();
  accumulate_kernel_gradient(xq, xq, kqq_bar, h, *grad);
  return value;
}

double McAcquisition::value_unit(const Eigen::MatrixXd &xq_unit) const {
  return evaluate(xq_unit, nullptr);
}

double McAcquisition::value_and_gradient_unit(const Eigen::MatrixXd &xq_unit,
                                              Eigen::MatrixXd &grad) const {
  return evaluate(xq_unit, &grad);
}

double McAcquisition::value(const Eigen::MatrixXd &xq_raw) const {
  return evaluate(unit_rows(xq_raw), nullptr);
}

double qei_value(const GPModel &model, const Eigen::MatrixXd &xq_raw,
                 double best_y, const AcqConfig &cfg) {
  cfg.validate();
  const auto acq = McAcquisition::expected_improvement(
      model, best_y, cfg.n_mc, static_cast<std::size_t>(xq_raw.rows()),
      cfg.seed);
  return acq.value(xq_raw);
}

double qnei_value(const GPModel &model, const Eigen::MatrixXd &xq_raw,
                  const Eigen::MatrixXd &x_obs_raw, const AcqConfig &cfg) {
  cfg.validate();
  const auto acq = McAcquisition::noisy_expected_improvement(
      model, x_obs_raw, cfg.n_mc, static_cast<std::size_t>(xq_raw.rows()),
      cfg.seed);
  return acq.value(xq_raw);
}

double qei_from_posterior(const PosteriorGaussian &post, double best_y,
                          std::size_t n_mc, std::uint64_t seed) {
  const SobolNormalSampler sampler(static_cast<std::size_t>(post.mean.size()),
                                   seed);
  const Eigen::MatrixXd draws = sample_posterior(post, n_mc, sampler);
  double total = 0.0;
  for (Eigen::Index i = 0; i < draws.rows(); ++i) {
    const double best_draw = post.y_mean + post.y_std * draws.row(i).maxCoeff();
    total += std::max(best_draw - best_y, 0.0);
  }
  return total / static_cast<double>(draws.rows());
}

double qnei_from_posterior(const PosteriorGaussian &joint, std::size_t q,
                           std::size_t n_mc, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(joint.mean.size());
  if (q < 1 || q >= n)
    throw std::invalid_argument("qnei_from_posterior: need q candidates and observed points");
  const SobolNormalSampler sampler(n, seed);
  const Eigen::MatrixXd draws = sample_posterior(joint, n_mc, sampler);
  const auto qi = static_cast<Eigen::Index>(q);
  double total = 0.0;
  for (Eigen::Index i = 0; i < draws.rows(); ++i) {
    const double cand = draws.row(i).head(qi).maxCoeff();
    const double obs = draws.row(i).tail(draws.cols() - qi).maxCoeff();
    total += std::max(joint.y_std * (cand - obs), 0.0);
  }
  return total / static_cast<double>(draws.rows());
}

CandidateBatch optimize_batch(const GPModel &model, const Dataset &data,
                              const AcqConfig &cfg) {
  cfg.validate();
  const auto q = static_cast<Eigen::Index>(cfg.q);
  const auto dim = static_cast<Eigen::Index>(kNumParams);
  CandidateBatch out;

  if (cfg.kind == AcqKind::Random) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Eigen::Index j = 0; j < q; ++j) {
      ParamArray u;
      for (Eigen::Index d = 0; d < dim; ++d)
        u[d] = unif(rng);
      out.points.push_back(ParamVector::from_unit(u));
    }
    return out;
  }

  if (!model.fitted())
    throw GPError("optimize_batch requires a fitted model");
  data.validate();

  const std::uint64_t sample_seed = derive_seed(cfg.seed, {1});
  const McAcquisition acq =
      cfg.kind == AcqKind::QEI
          ? McAcquisition::expected_improvement(model, data.y.maxCoeff(),
                                                cfg.n_mc, cfg.q, sample_seed)
          : McAcquisition::noisy_expected_improvement(model, data.X, cfg.n_mc,
                                                      cfg.q, sample_seed);

  // Raw candidates and single-point scores.
  const Eigen::MatrixXd raw =
      SobolNormalSampler(kNumParams, derive_seed(cfg.seed, {2}))
          .draw_uniform(cfg.n_raw);
  const auto n_raw = raw.rows();
  std::vector<double> single(static_cast<std::size_t>(n_raw));
  for (Eigen::Index i = 0; i < n_raw; ++i)
    single[static_cast<std::size_t>(i)] = acq.value_unit(raw.row(i));

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n_raw));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return single[static_cast<std::size_t>(a)] > single[static_cast<std::size_t>(b)];
  });
  const std::size_t n_starts =
      std::min<std::size_t>(cfg.n_starts, static_cast<std::size_t>(n_raw));

  // Greedy sequential fill of each start into a q-batch.
  std::vector<Eigen::MatrixXd> starts;
  for (std::size_t s = 0; s < n_starts; ++s) {
    std::vector<Eigen::Index> members{order[s]};
    Eigen::MatrixXd batch = raw.row(order[s]);
    while (batch.rows() < q) {
      double best = -1.0;
      Eigen::Index best_idx = -1;
      Eigen::MatrixXd trial(batch.rows() + 1, dim);
      trial.topRows(batch.rows()) = batch;
      for (Eigen::Index r = 0; r < n_raw; ++r) {
        if (std::find(members.begin(), members.end(), r) != members.end())
          continue;
        trial.row(batch.rows()) = raw.row(r);
        const double v = acq.value_unit(trial);
        if (v > best) {
          best = v;
          best_idx = r;
        }
      }
      members.push_back(best_idx);
      trial.row(batch.rows()) = raw.row(best_idx);
      batch = trial;
    }
    starts.push_back(batch);
  }

  // Refinement over the flattened batch in the unit cube.
  const Eigen::Index nvar = q * dim;
  const Eigen::VectorXd lo = Eigen::VectorXd::Zero(nvar);
  const Eigen::VectorXd hi = Eigen::VectorXd::Ones(nvar);
  auto unflatten = [&](const Eigen::VectorXd &v) {
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                          Eigen::RowMajor>>(v.data(), q, dim)
        .eval();
  };
  BoundedObjective negative = [&](const Eigen::VectorXd &v, Eigen::VectorXd &g) {
    Eigen::MatrixXd grad;
    const double val = acq.value_and_gradient_unit(unflatten(v), grad);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> gr = grad;
    g = -Eigen::Map<const Eigen::VectorXd>(gr.data(), nvar);
    return -val;
  };
  LbfgsbOptions lopts;
  lopts.max_iterations = cfg.max_iterations;
  lopts.pg_tolerance = 1e-7;
  lopts.f_tolerance = 1e-9;

  double best_value = -std::numeric_limits<double>::infinity();
  Eigen::MatrixXd best_batch;
  for (const auto &start : starts) {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = start;
    const Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(rm.data(), nvar);
    const double v0 = acq.value_unit(start);
    const auto res = minimize_bounded(negative, x0, lo, hi, lopts);
    const double v = -res.f;
    const Eigen::MatrixXd batch =
        v >= v0 ? Eigen::MatrixXd(unflatten(res.x)) : start;
    const double value = std::max(v, v0);
    if (value > best_value) {
      best_value = value;
      best_batch = batch;
    }
  }

  const Eigen::MatrixXd raw_batch = GPModel::from_unit(best_batch);
  for (Eigen::Index j = 0; j < q; ++j)
    out.points.push_back(ParamVector::from_array(raw_batch.row(j).transpose()));
  out.acq_value = best_value;
  return out;
}

}  // namespace swarmbo
