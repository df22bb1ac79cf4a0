#pragma once

#include <string_view>

#include "robloc/admm.hpp"
#include "robloc/model.hpp"

namespace robloc {

enum class BaselineKind { kGaussNewtonL2, kIrlsLp };

struct BaselineConfig {
  BaselineKind kind = BaselineKind::kGaussNewtonL2;
  double p = 2.0;  // IRLS exponent, 1 <= p <= 2
  double tol = 1e-8;
  int max_iters = 500;
  double irls_epsilon = 1e-8;
  // Record the objective after each iteration into SolveResult::trace.
  bool trace = false;

  void Validate() const;
};

// Weighted l2 ML fit: min sum (r_i - ||x - x_i||)^2 / sigma_i^2 by Gauss-Newton
// with step halving and a Levenberg fallback for singular normal equations.
// A fix whose normal matrix stays rank deficient is reported as not converged.
SolveResult SolveGaussNewtonL2(const Scenario& scenario, const Measurements& measurements,
                               const BaselineConfig& config);

// min sum |r_i - ||x - x_i|||^p by IRLS: weights max(|res_i|, eps)^(p-2), one
// weighted Gauss-Newton step per reweighting.
SolveResult SolveIrlsLp(const Scenario& scenario, const Measurements& measurements,
                        const BaselineConfig& config);

SolveResult SolveBaseline(const Scenario& scenario, const Measurements& measurements,
                          const BaselineConfig& config);

double LpObjective(const Eigen::VectorXd& x, const Scenario& scenario, const Eigen::VectorXd& ranges, double p);

}  // namespace robloc
