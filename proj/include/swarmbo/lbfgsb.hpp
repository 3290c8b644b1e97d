// Bound-constrained limited-memory BFGS.
//
// Projected variant: variables pinned at a bound with the gradient pointing
// outward form the active set; the two-loop recursion runs on the free
// variables and a backtracking Armijo search follows the projected path.
#pragma once

#include <functional>
#include <string>

#include <Eigen/Core>

namespace swarmbo {

/// Returns f(x) and writes the gradient into `grad` (already sized).
using BoundedObjective =
    std::function<double(const Eigen::VectorXd &x, Eigen::VectorXd &grad)>;

struct LbfgsbOptions {
  int memory = 10;
  int max_iterations = 200;
  int max_line_search = 30;
  double pg_tolerance = 1e-6;  // inf-norm of the projected gradient
  double f_tolerance = 1e-10;  // relative decrease
  double armijo = 1e-4;
};

struct LbfgsbResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string message;
};

LbfgsbResult minimize_bounded(const BoundedObjective &objective,
                              Eigen::VectorXd x0, const Eigen::VectorXd &lower,
                              const Eigen::VectorXd &upper,
                              const LbfgsbOptions &opts = {});

}  // namespace swarmbo
