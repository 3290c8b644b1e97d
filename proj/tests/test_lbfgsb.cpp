#include <doctest.h>

#include "swarmbo/lbfgsb.hpp"

using namespace swarmbo;

TEST_SUITE("lbfgsb") {

TEST_CASE("unconstrained Rosenbrock") {
  BoundedObjective f = [](const Eigen::VectorXd &x, Eigen::VectorXd &g) {
    const double a = 1 - x[0], b = x[1] - x[0] * x[0];
    g[0] = -2 * a - 400 * x[0] * b;
    g[1] = 200 * b;
    return a * a + 100 * b * b;
  };
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, -5), hi = Eigen::VectorXd::Constant(2, 5);
  LbfgsbOptions o;
  o.max_iterations = 500;
  o.pg_tolerance = 1e-9;
  o.f_tolerance = 0;
  const auto r = minimize_bounded(f, Eigen::Vector2d(-1.2, 1.0), lo, hi, o);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("active bounds") {
  // minimum of (x-3)^2 + (y+2)^2 on [0,1]^2 is at (1, 0)
  BoundedObjective f = [](const Eigen::VectorXd &x, Eigen::VectorXd &g) {
    g[0] = 2 * (x[0] - 3);
    g[1] = 2 * (x[1] + 2);
    return (x[0] - 3) * (x[0] - 3) + (x[1] + 2) * (x[1] + 2);
  };
  const auto r = minimize_bounded(f, Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(0, 0),
                                  Eigen::Vector2d(1, 1));
  CHECK(r.x[0] == 1.0);
  CHECK(r.x[1] == 0.0);
  CHECK(r.converged);
}

TEST_CASE("start outside bounds is projected") {
  BoundedObjective f = [](const Eigen::VectorXd &x, Eigen::VectorXd &g) {
    g = 2 * x;
    return x.squaredNorm();
  };
  const auto r = minimize_bounded(f, Eigen::Vector3d(9, -9, 0.5), Eigen::Vector3d::Constant(-1),
                                  Eigen::Vector3d::Constant(1));
  CHECK(r.x.cwiseAbs().maxCoeff() < 1e-6);
}

}
