#include "swarmbo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "swarmbo/lbfgsb.hpp"

namespace swarmbo {
namespace {

  constexpr double kSqrt5 = 2.23606797749978969640917366873128;

  // Latin-hypercube box for restart initial points, in theta coordinates.
  // Narrower than the optimization bounds so that starts are well posed.
  struct InitBox {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
  };

  InitBox init_box() {
    const int n = GPHyperparams::kNumTheta;
    InitBox b{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    b.lo[0] = -1.0;
    b.hi[0] = 1.0;
    b.lo[1] = std::log(0.1);
    b.hi[1] = std::log(10.0);
    for (int d = 0; d < static_cast<int>(kNumParams); ++d) {
      b.lo[2 + d] = std::log(0.05);
      b.hi[2 + d] = std::log(5.0);
    }
    b.lo[n - 1] = std::log(1e-5);
    b.hi[n - 1] = std::log(0.5);
    return b;
  }

  // Squared per-dimension differences, one n x n matrix per input dimension.
  std::vector<Eigen::MatrixXd> squared_differences(const Eigen::MatrixXd &xu) {
    const auto n = xu.rows();
    std::vector<Eigen::MatrixXd> out(kNumParams, Eigen::MatrixXd(n, n));
    for (std::size_t d = 0; d < kNumParams; ++d) {
      const auto col = xu.col(static_cast<Eigen::Index>(d));
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) {
          const double diff = col[i] - col[j];
          out[d](i, j) = diff * diff;
        }
    }
    return out;
  }

  nlohmann::json hyper_json(const GPHyperparams &h) {
    nlohmann::json j;
    j["mean_const"] = h.mean_const;
    j["output_scale"] = h.output_scale;
    j["length_scales"] = std::vector<double>(h.length_scales.data(),
                                             h.length_scales.data() + kNumParams);
    j["noise_var"] = h.noise_var;
    return j;
  }

  GPHyperparams hyper_from_json(const nlohmann::json &j) {
    GPHyperparams h;
    h.mean_const = j.at("mean_const").get<double>();
    h.output_scale = j.at("output_scale").get<double>();
    const auto ls = j.at("length_scales").get<std::vector<double>>();
    if (ls.size() != kNumParams)
      throw GPError("checkpoint: expected 9 length scales");
    for (std::size_t d = 0; d < kNumParams; ++d)
      h.length_scales[static_cast<Eigen::Index>(d)] = ls[d];
    h.noise_var = j.at("noise_var").get<double>();
    return h;
  }

}  // namespace

void Dataset::validate() const {
  if (y.size() < 1)
    throw GPError("dataset is empty");
  if (X.rows() != y.size() || X.cols() != static_cast<Eigen::Index>(kNumParams))
    throw GPError("dataset shape mismatch");
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const ParamArray row = X.row(i).transpose();
    if (!ParamVector::from_array(row).in_bounds())
      throw GPError("dataset row " + std::to_string(i) + " outside bounds");
    if (!std::isfinite(y[i]))
      throw GPError("dataset target " + std::to_string(i) + " not finite");
  }
}

void Dataset::append(const ParamVector &p, double value) {
  const Eigen::Index n = y.size();
  X.conservativeResize(n + 1, static_cast<Eigen::Index>(kNumParams));
  y.conservativeResize(n + 1);
  X.row(n) = p.to_array().transpose();
  y[n] = value;
}

Eigen::VectorXd GPHyperparams::to_theta() const {
  Eigen::VectorXd t(kNumTheta);
  t[0] = mean_const;
  t[1] = std::log(output_scale);
  for (int d = 0; d < static_cast<int>(kNumParams); ++d)
    t[2 + d] = std::log(length_scales[d]);
  t[kNumTheta - 1] = std::log(noise_var);
  return t;
}

GPHyperparams GPHyperparams::from_theta(const Eigen::VectorXd &theta) {
  GPHyperparams h;
  h.mean_const = theta[0];
  h.output_scale = std::exp(theta[1]);
  for (int d = 0; d < static_cast<int>(kNumParams); ++d)
    h.length_scales[d] = std::exp(theta[2 + d]);
  h.noise_var = std::exp(theta[kNumTheta - 1]);
  return h;
}

Eigen::VectorXd GPHyperparams::theta_lower() {
  Eigen::VectorXd t(kNumTheta);
  t[0] = -kMeanBound;
  t[1] = std::log(kOutputScaleMin);
  t.segment(2, kNumParams).setConstant(std::log(kLengthMin));
  t[kNumTheta - 1] = std::log(kNoiseMin);
  return t;
}

Eigen::VectorXd GPHyperparams::theta_upper() {
  Eigen::VectorXd t(kNumTheta);
  t[0] = kMeanBound;
  t[1] = std::log(kOutputScaleMax);
  t.segment(2, kNumParams).setConstant(std::log(kLengthMax));
  t[kNumTheta - 1] = std::log(kNoiseMax);
  return t;
}

double kernel(const ParamArray &a, const ParamArray &b,
              const GPHyperparams &hyper) {
  const double r =
      ((a - b).array() / hyper.length_scales.array()).matrix().norm();
  const double sr = kSqrt5 * r;
  return hyper.output_scale * (1.0 + sr + sr * sr / 3.0) * std::exp(-sr);
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd &A,
                              const Eigen::MatrixXd &B,
                              const GPHyperparams &hyper) {
  const Eigen::RowVectorXd inv_l = hyper.length_scales.cwiseInverse().transpose();
  const Eigen::MatrixXd As = A.array().rowwise() * inv_l.array();
  const Eigen::MatrixXd Bs = B.array().rowwise() * inv_l.array();
  Eigen::MatrixXd r2 = (-2.0 * As * Bs.transpose()).eval();
  r2.colwise() += As.rowwise().squaredNorm();
  r2.rowwise() += Bs.rowwise().squaredNorm().transpose();
  return r2.unaryExpr([&](double v) {
    const double sr = kSqrt5 * std::sqrt(std::max(v, 0.0));
    return hyper.output_scale * (1.0 + sr + sr * sr / 3.0) * std::exp(-sr);
  });
}

ParamArray kernel_gradient(const ParamArray &x, const ParamArray &other,
                           const GPHyperparams &hyper) {
  const ParamArray l2 = hyper.length_scales.array().square().matrix();
  const ParamArray diff = x - other;
  const double r = (diff.array() / hyper.length_scales.array()).matrix().norm();
  const double sr = kSqrt5 * r;
  const double g = (5.0 / 3.0) * hyper.output_scale * (1.0 + sr) * std::exp(-sr);
  return (-g * diff.array() / l2.array()).matrix();
}

Eigen::VectorXd PosteriorGaussian::raw_mean() const {
  return (y_mean + y_std * mean.array()).matrix();
}

Eigen::MatrixXd PosteriorGaussian::raw_cov() const { return y_std * y_std * cov; }

Eigen::VectorXd PosteriorGaussian::raw_variance() const {
  return y_std * y_std * cov.diagonal();
}

Eigen::MatrixXd robust_cholesky(const Eigen::MatrixXd &m, double *jitter_used) {
  const auto n = m.rows();
  for (double jitter : kJitterLadder) {
    Eigen::MatrixXd a = m;
    a.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success)
      continue;
    Eigen::MatrixXd L = llt.matrixL();
    const auto diag = L.diagonal();
    if (!diag.allFinite() || (n > 0 && diag.minCoeff() <= 0.0))
      continue;
    if (jitter_used)
      *jitter_used = jitter;
    return L;
  }
  throw GPError("covariance not positive definite after jitter escalation");
}

Eigen::MatrixXd GPModel::to_unit(const Eigen::MatrixXd &raw) {
  const Eigen::RowVectorXd lo = ParamVector::lower().transpose();
  const Eigen::RowVectorXd span =
      (ParamVector::upper() - ParamVector::lower()).transpose();
  return (raw.rowwise() - lo).array().rowwise() / span.array();
}

Eigen::MatrixXd GPModel::from_unit(const Eigen::MatrixXd &unit) {
  const Eigen::RowVectorXd lo = ParamVector::lower().transpose();
  const Eigen::RowVectorXd hi = ParamVector::upper().transpose();
  const Eigen::RowVectorXd span = hi - lo;
  Eigen::MatrixXd raw = (unit.array().rowwise() * span.array()).matrix();
  raw.rowwise() += lo;
  for (Eigen::Index i = 0; i < raw.rows(); ++i)
    raw.row(i) = raw.row(i).cwiseMax(lo).cwiseMin(hi);
  return raw;
}

GPModel GPModel::build(Dataset data, GPHyperparams hyper) {
  data.validate();
  GPModel m;
  m.xu_ = to_unit(data.X);
  const auto n = data.y.size();
  m.y_mean_ = data.y.mean();
  double var = 0.0;
  if (n > 1)
    var = (data.y.array() - m.y_mean_).square().sum() / static_cast<double>(n - 1);
  m.y_std_ = var > 1e-24 ? std::sqrt(var) : 1.0;
  m.ys_ = (data.y.array() - m.y_mean_) / m.y_std_;
  m.hyper_ = hyper;
  m.data_ = std::move(data);

  Eigen::MatrixXd K = kernel_matrix(m.xu_, m.xu_, hyper);
  K.diagonal().array() += hyper.noise_var;
  m.chol_ = robust_cholesky(K, &m.jitter_);
  const Eigen::VectorXd resid = m.ys_.array() - hyper.mean_const;
  m.alpha_ = m.chol_.triangularView<Eigen::Lower>().solve(resid);
  m.chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(m.alpha_);
  return m;
}

void GPModel::require_fitted() const {
  if (!fitted())
    throw GPError("GP model has no training data");
}

Eigen::MatrixXd GPModel::k_inverse() const {
  require_fitted();
  const auto n = chol_.rows();
  Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(n, n);
  chol_.triangularView<Eigen::Lower>().solveInPlace(inv);
  chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(inv);
  return inv;
}

double GPModel::mll() const {
  require_fitted();
  const auto n = static_cast<double>(ys_.size());
  const Eigen::VectorXd resid = ys_.array() - hyper_.mean_const;
  return -0.5 * resid.dot(alpha_) - chol_.diagonal().array().log().sum() -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

double mll(const GPModel &model) { return model.mll(); }

PosteriorGaussian GPModel::posterior_unit(const Eigen::MatrixXd &xq_unit) const {
  require_fitted();
  const Eigen::MatrixXd kq = kernel_matrix(xq_unit, xu_, hyper_);
  PosteriorGaussian p;
  p.y_mean = y_mean_;
  p.y_std = y_std_;
  p.mean = (kq * alpha_).array() + hyper_.mean_const;
  Eigen::MatrixXd v = kq.transpose();
  chol_.triangularView<Eigen::Lower>().solveInPlace(v);
  Eigen::MatrixXd cov = kernel_matrix(xq_unit, xq_unit, hyper_);
  cov.noalias() -= v.transpose() * v;
  p.cov = 0.5 * (cov + cov.transpose());
  return p;
}

PosteriorGaussian GPModel::posterior(const Eigen::MatrixXd &xq_raw) const {
  require_fitted();
  for (Eigen::Index i = 0; i < xq_raw.rows(); ++i) {
    const ParamArray row = xq_raw.row(i).transpose();
    ParamVector::from_array(row).validate();
  }
  return posterior_unit(to_unit(xq_raw));
}

PosteriorGaussian GPModel::posterior(const ParamVector &p) const {
  Eigen::MatrixXd x(1, kNumParams);
  x.row(0) = p.to_array().transpose();
  return posterior(x);
}

std::optional<MllEvaluation> mll_with_gradient(const Eigen::MatrixXd &xu,
                                               const Eigen::VectorXd &ys,
                                               const GPHyperparams &hyper) {
  const auto n = xu.rows();
  const auto d2 = squared_differences(xu);

  Eigen::MatrixXd r2 = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t d = 0; d < kNumParams; ++d) {
    const double l = hyper.length_scales[static_cast<Eigen::Index>(d)];
    r2 += d2[d] / (l * l);
  }
  Eigen::MatrixXd kf(n, n);
  Eigen::MatrixXd g(n, n);  // -(dk/dr) / r
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sr = kSqrt5 * std::sqrt(r2(i, j));
      const double e = std::exp(-sr);
      kf(i, j) = hyper.output_scale * (1.0 + sr + sr * sr / 3.0) * e;
      g(i, j) = (5.0 / 3.0) * hyper.output_scale * (1.0 + sr) * e;
    }

  Eigen::MatrixXd K = kf;
  K.diagonal().array() += hyper.noise_var;
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success)
    return std::nullopt;
  const Eigen::MatrixXd L = llt.matrixL();
  if (!L.diagonal().allFinite() || L.diagonal().minCoeff() <= 0.0)
    return std::nullopt;

  const Eigen::VectorXd resid = ys.array() - hyper.mean_const;
  const Eigen::VectorXd alpha = llt.solve(resid);
  const Eigen::MatrixXd kinv = llt.solve(Eigen::MatrixXd::Identity(n, n));

  MllEvaluation out;
  out.value = -0.5 * resid.dot(alpha) - L.diagonal().array().log().sum() -
              0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  if (!std::isfinite(out.value))
    return std::nullopt;

  // d mll / d theta_k = 1/2 tr((alpha alpha^T - K^-1) dK/dtheta_k)
  const Eigen::MatrixXd w = alpha * alpha.transpose() - kinv;
  out.gradient.resize(GPHyperparams::kNumTheta);
  out.gradient[0] = alpha.sum();
  out.gradient[1] = 0.5 * (w.array() * kf.array()).sum();
  const Eigen::MatrixXd wg = w.cwiseProduct(g);
  for (std::size_t d = 0; d < kNumParams; ++d) {
    const double l = hyper.length_scales[static_cast<Eigen::Index>(d)];
    out.gradient[2 + static_cast<Eigen::Index>(d)] =
        0.5 * (wg.array() * d2[d].array()).sum() / (l * l);
  }
  out.gradient[GPHyperparams::kNumTheta - 1] = 0.5 * w.trace() * hyper.noise_var;
  return out;
}

GPModel fit(const Dataset &data, std::uint64_t seed, const FitOptions &opts,
            FitReport *report) {
  data.validate();
  if (data.size() < 2)
    throw GPError("fit requires at least 2 observations");

  // Normalization only depends on the data, so build once to get it.
  const GPModel shell = GPModel::build(data, GPHyperparams{});
  const Eigen::MatrixXd &xu = shell.unit_inputs();
  const Eigen::VectorXd &ys = shell.standardized_targets();

  const int dim = GPHyperparams::kNumTheta;
  const Eigen::VectorXd lo = GPHyperparams::theta_lower();
  const Eigen::VectorXd hi = GPHyperparams::theta_upper();
  const InitBox box = init_box();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int r = std::max(opts.restarts, 1);
  Eigen::MatrixXd starts(r, dim);
  for (int d = 0; d < dim; ++d) {
    std::vector<int> perm(r);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < r; ++i) {
      const double u = (perm[i] + unif(rng)) / r;
      starts(i, d) = box.lo[d] + u * (box.hi[d] - box.lo[d]);
    }
  }
  if (opts.warm_start)
    starts.row(0) = opts.warm_start->to_theta().cwiseMax(lo).cwiseMin(hi).transpose();

  BoundedObjective negative_mll = [&](const Eigen::VectorXd &theta,
                                      Eigen::VectorXd &grad) {
    const auto e = mll_with_gradient(xu, ys, GPHyperparams::from_theta(theta));
    if (!e) {
      grad.setZero();
      return std::numeric_limits<double>::infinity();
    }
    grad = -e->gradient;
    return -e->value;
  };

  LbfgsbOptions lopts;
  lopts.max_iterations = opts.max_iterations;
  lopts.pg_tolerance = 1e-5;
  lopts.f_tolerance = 1e-9;

  double best = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_theta;
  for (int i = 0; i < r; ++i) {
    const Eigen::VectorXd x0 = starts.row(i).transpose();
    const auto e0 = mll_with_gradient(xu, ys, GPHyperparams::from_theta(x0));
    if (report)
      report->start_mll.push_back(
          e0 ? e0->value : -std::numeric_limits<double>::infinity());
    if (!e0) {
      if (report)
        report->final_mll.push_back(-std::numeric_limits<double>::infinity());
      continue;
    }
    const auto res = minimize_bounded(negative_mll, x0, lo, hi, lopts);
    const double value = -res.f;
    if (report)
      report->final_mll.push_back(value);
    if (value > best) {
      best = value;
      best_theta = res.x;
      if (report)
        report->best_restart = i;
    }
  }
  if (best_theta.size() == 0)
    throw GPError("all restarts failed to factorize the covariance");

  return GPModel::build(data, GPHyperparams::from_theta(best_theta));
}

Eigen::MatrixXd sample_posterior(const PosteriorGaussian &post,
                                 std::size_t n_draws,
                                 const SobolNormalSampler &sampler) {
  const auto q = post.mean.size();
  if (static_cast<std::size_t>(q) != sampler.dim())
    throw std::invalid_argument("sample_posterior: sampler dimension mismatch");
  Eigen::MatrixXd draws(static_cast<Eigen::Index>(n_draws), q);
  draws.rowwise() = post.mean.transpose();
  if (post.cov.cwiseAbs().maxCoeff() == 0.0)
    return draws;
  const Eigen::MatrixXd L = robust_cholesky(post.cov);
  const Eigen::MatrixXd z = sampler.draw(n_draws);
  draws.noalias() += z * L.transpose();
  return draws;
}

void save_checkpoint(const GPModel &model, const std::string &path) {
  if (!model.fitted())
    throw GPError("cannot checkpoint an unfitted model");
  nlohmann::json j;
  j["hyper"] = hyper_json(model.hyper());
  j["y_mean"] = model.y_mean();
  j["y_std"] = model.y_std();
  j["param_names"] = std::vector<std::string>(ParamVector::kNames.begin(),
                                              ParamVector::kNames.end());
  const auto &X = model.data().X;
  j["X"] = nlohmann::json::array();
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    std::vector<double> row(kNumParams);
    for (std::size_t d = 0; d < kNumParams; ++d)
      row[d] = X(i, static_cast<Eigen::Index>(d));
    j["X"].push_back(row);
  }
  const auto &y = model.data().y;
  j["y"] = std::vector<double>(y.data(), y.data() + y.size());
  std::ofstream out(path);
  if (!out)
    throw GPError("cannot write checkpoint " + path);
  out << j.dump(1) << '\n';
}

GPModel load_checkpoint(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw GPError("cannot open checkpoint " + path);
  nlohmann::json j;
  in >> j;
  Dataset data;
  const auto rows = j.at("X").get<std::vector<std::vector<double>>>();
  const auto y = j.at("y").get<std::vector<double>>();
  if (rows.size() != y.size())
    throw GPError("checkpoint: X and y lengths differ");
  data.X.resize(static_cast<Eigen::Index>(rows.size()), kNumParams);
  data.y.resize(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != kNumParams)
      throw GPError("checkpoint: row width is not 9");
    for (std::size_t d = 0; d < kNumParams; ++d)
      data.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = rows[i][d];
    data.y[static_cast<Eigen::Index>(i)] = y[i];
  }
  return GPModel::build(std::move(data), hyper_from_json(j.at("hyper")));
}

}  // namespace swarmbo
