#include "swarmbo/lbfgsb.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace swarmbo {
namespace {

  struct Pair {
    Eigen::VectorXd s;
    Eigen::VectorXd y;
    double rho;
  };

  Eigen::VectorXd project(const Eigen::VectorXd &x, const Eigen::VectorXd &lo,
                          const Eigen::VectorXd &hi) {
    return x.cwiseMax(lo).cwiseMin(hi);
  }

  double projected_gradient_norm(const Eigen::VectorXd &x,
                                 const Eigen::VectorXd &g,
                                 const Eigen::VectorXd &lo,
                                 const Eigen::VectorXd &hi) {
    return (project(x - g, lo, hi) - x).lpNorm<Eigen::Infinity>();
  }

  // Two-loop recursion restricted to the free variables.
  Eigen::VectorXd direction(const std::deque<Pair> &mem,
                            const Eigen::VectorXd &g,
                            const Eigen::Array<bool, Eigen::Dynamic, 1> &free) {
    const Eigen::VectorXd mask = free.cast<double>().matrix();
    Eigen::VectorXd q = g.cwiseProduct(mask);
    std::vector<double> alpha(mem.size());
    for (std::size_t k = mem.size(); k-- > 0;) {
      alpha[k] = mem[k].rho * mem[k].s.cwiseProduct(mask).dot(q);
      q -= alpha[k] * mem[k].y.cwiseProduct(mask);
    }
    if (!mem.empty()) {
      const auto &last = mem.back();
      const Eigen::VectorXd ym = last.y.cwiseProduct(mask);
      const double yy = ym.squaredNorm();
      const double sy = last.s.cwiseProduct(mask).dot(ym);
      if (yy > 0.0 && sy > 0.0)
        q *= sy / yy;
    }
    for (std::size_t k = 0; k < mem.size(); ++k) {
      const double beta = mem[k].rho * mem[k].y.cwiseProduct(mask).dot(q);
      q += (alpha[k] - beta) * mem[k].s.cwiseProduct(mask);
    }
    return -q.cwiseProduct(mask);
  }

}  // namespace

LbfgsbResult minimize_bounded(const BoundedObjective &objective,
                              Eigen::VectorXd x0, const Eigen::VectorXd &lower,
                              const Eigen::VectorXd &upper,
                              const LbfgsbOptions &opts) {
  const auto n = x0.size();
  if (lower.size() != n || upper.size() != n)
    throw std::invalid_argument("minimize_bounded: dimension mismatch");
  if ((lower.array() > upper.array()).any())
    throw std::invalid_argument("minimize_bounded: lower > upper");

  LbfgsbResult res;
  Eigen::VectorXd x = project(x0, lower, upper);
  Eigen::VectorXd g(n);
  double f = objective(x, g);
  ++res.evaluations;
  if (!std::isfinite(f))
    throw std::runtime_error("minimize_bounded: non-finite objective at x0");

  std::deque<Pair> mem;
  Eigen::VectorXd g_new(n);

  for (res.iterations = 0; res.iterations < opts.max_iterations;
       ++res.iterations) {
    if (projected_gradient_norm(x, g, lower, upper) < opts.pg_tolerance) {
      res.converged = true;
      res.message = "projected gradient below tolerance";
      break;
    }

    Eigen::Array<bool, Eigen::Dynamic, 1> free(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool at_lo = x[i] <= lower[i] && g[i] > 0.0;
      const bool at_hi = x[i] >= upper[i] && g[i] < 0.0;
      free[i] = !(at_lo || at_hi);
    }

    Eigen::VectorXd d = direction(mem, g, free);
    if (!(d.dot(g) < 0.0)) {
      mem.clear();
      d = direction(mem, g, free);
      if (!(d.dot(g) < 0.0)) {
        res.converged = true;
        res.message = "no descent direction";
        break;
      }
    }

    double step = 1.0;
    if (mem.empty()) {
      const double dn = d.lpNorm<Eigen::Infinity>();
      if (dn > 1.0)
        step = 1.0 / dn;
    }

    bool accepted = false;
    Eigen::VectorXd x_new;
    double f_new = f;
    for (int ls = 0; ls < opts.max_line_search; ++ls) {
      x_new = project(x + step * d, lower, upper);
      f_new = objective(x_new, g_new);
      ++res.evaluations;
      if (std::isfinite(f_new) &&
          f_new <= f + opts.armijo * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }

    if (!accepted) {
      if (!mem.empty()) {
        mem.clear();
        continue;
      }
      res.message = "line search failed";
      break;
    }

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm() && sy > 0.0) {
      mem.push_back({s, y, 1.0 / sy});
      if (static_cast<int>(mem.size()) > opts.memory)
        mem.pop_front();
    }

    const double decrease = f - f_new;
    x = x_new;
    g = g_new;
    f = f_new;
    if (decrease <= opts.f_tolerance * std::max({std::abs(f), 1.0})) {
      res.converged = true;
      res.message = "relative decrease below tolerance";
      ++res.iterations;
      break;
    }
  }
  if (res.message.empty())
    res.message = "iteration limit";

  res.x = x;
  res.f = f;
  return res;
}

}  // namespace swarmbo
