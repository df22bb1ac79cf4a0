#include "robloc/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace robloc {
namespace {

constexpr int kMaxHalvings = 40;
constexpr int kMaxDampingAttempts = 12;
constexpr double kInitialDamping = 1e-6;
constexpr double kRankTolerance = 1e-10;

Eigen::VectorXd Residuals(const Eigen::VectorXd& x, const Scenario& scenario, const Eigen::VectorXd& ranges) {
  return ranges - ((scenario.sensors.colwise() - x).colwise().norm()).transpose();
}

double WeightedCost(const Eigen::VectorXd& x, const Scenario& scenario, const Eigen::VectorXd& ranges,
                    const Eigen::VectorXd& weights) {
  const Eigen::VectorXd res = Residuals(x, scenario, ranges);
  return (weights.array() * res.array().square()).sum();
}

// Normal matrix sum_i w_i u_i u_i^T and right-hand side sum_i w_i u_i res_i,
// with u_i the unit vector from sensor i to x (zero when x sits on the sensor).
void NormalEquations(const Eigen::VectorXd& x, const Scenario& scenario, const Eigen::VectorXd& ranges,
                     const Eigen::VectorXd& weights, Eigen::MatrixXd& normal, Eigen::VectorXd& rhs) {
  const int h = scenario.dimension();
  normal = Eigen::MatrixXd::Zero(h, h);
  rhs = Eigen::VectorXd::Zero(h);
  for (int i = 0; i < scenario.num_sensors(); ++i) {
    const Eigen::VectorXd diff = x - scenario.sensors.col(i);
    const double dist = diff.norm();
    if (dist < 1e-12) continue;
    const Eigen::VectorXd u = diff / dist;
    const double res = ranges(i) - dist;
    normal.noalias() += weights(i) * u * u.transpose();
    // Gauss-Newton direction solves normal * step = sum w u res.
    rhs.noalias() += weights(i) * res * u;
  }
}

bool WellConditioned(const Eigen::MatrixXd& normal) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal, Eigen::EigenvaluesOnly);
  const double hi = eig.eigenvalues().maxCoeff();
  const double lo = eig.eigenvalues().minCoeff();
  return hi > 0.0 && lo > kRankTolerance * hi;
}

struct StepOutcome {
  Eigen::VectorXd x;
  double step_norm = 0.0;
};

StepOutcome WeightedGaussNewtonStep(const Eigen::VectorXd& x, const Scenario& scenario,
                                    const Eigen::VectorXd& ranges, const Eigen::VectorXd& weights) {
  Eigen::MatrixXd normal;
  Eigen::VectorXd rhs;
  NormalEquations(x, scenario, ranges, weights, normal, rhs);
  const double cost = WeightedCost(x, scenario, ranges, weights);
  const int h = scenario.dimension();
  const double scale = std::max(normal.trace() / h, 1.0);

  double damping = WellConditioned(normal) ? 0.0 : kInitialDamping * scale;
  for (int attempt = 0; attempt < kMaxDampingAttempts; ++attempt) {
    const Eigen::MatrixXd system = normal + damping * Eigen::MatrixXd::Identity(h, h);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      const Eigen::VectorXd direction = ldlt.solve(rhs);
      if (direction.allFinite()) {
        if (direction.norm() == 0.0) return {x, 0.0};
        double t = 1.0;
        for (int halving = 0; halving <= kMaxHalvings; ++halving, t *= 0.5) {
          const Eigen::VectorXd candidate = x + t * direction;
          if (WeightedCost(candidate, scenario, ranges, weights) < cost) {
            return {candidate, (t * direction).norm()};
          }
        }
      }
    }
    damping = damping == 0.0 ? kInitialDamping * scale : damping * 10.0;
  }
  // No descent available: x is stationary to working precision.
  return {x, 0.0};
}

SolveResult RunWeightedGaussNewton(const Scenario& scenario, const Measurements& measurements,
                                   const BaselineConfig& config, bool reweight) {
  config.Validate();
  if (measurements.size() != scenario.num_sensors()) {
    throw std::invalid_argument("baseline: range count does not match sensor count");
  }
  const Eigen::VectorXd& ranges = measurements.ranges;
  Eigen::VectorXd weights = measurements.sigma.array().square().inverse().matrix();
  auto objective = [&](const Eigen::VectorXd& x) {
    return reweight ? LpObjective(x, scenario, ranges, config.p) : WeightedCost(x, scenario, ranges, weights);
  };

  SolveResult result;
  result.warnings = scenario.Warnings();
  Eigen::VectorXd x = scenario.sensors.rowwise().mean();
  if (config.trace) {
    result.trace.push_back({0, objective(x), 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, x});
  }

  bool small_step = false;
  for (int k = 0; k < config.max_iters; ++k) {
    if (reweight) {
      const Eigen::VectorXd res = Residuals(x, scenario, ranges);
      weights = res.array().abs().max(config.irls_epsilon).pow(config.p - 2.0).matrix();
    }
    StepOutcome step = WeightedGaussNewtonStep(x, scenario, ranges, weights);
    if (!step.x.allFinite()) {
      throw NumericalError("baseline: non-finite iterate in the Gauss-Newton step");
    }
    result.iterations = k + 1;
    result.primal_residual = step.step_norm;
    const Eigen::VectorXd prev = x;
    x = std::move(step.x);
    if (config.trace) {
      result.trace.push_back({k + 1, objective(x), 0.0, 0.0, (x - prev).norm(), 0.0, 0.0, 0.0, x});
    }
    if (step.step_norm < config.tol) {
      small_step = true;
      break;
    }
  }

  Eigen::MatrixXd normal;
  Eigen::VectorXd rhs;
  NormalEquations(x, scenario, ranges, Eigen::VectorXd::Ones(scenario.num_sensors()), normal, rhs);
  const bool identifiable = WellConditioned(normal);
  if (!identifiable) {
    result.warnings.push_back("normal equations are rank deficient at the final point");
  }
  result.converged = small_step && identifiable;
  result.estimate = x;
  return result;
}

}  // namespace

void BaselineConfig::Validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("baseline: tol must be > 0");
  if (max_iters < 1) throw std::invalid_argument("baseline: max_iters must be >= 1");
  if (kind == BaselineKind::kIrlsLp) {
    if (!(p >= 1.0 && p <= 2.0)) throw std::invalid_argument("baseline: IRLS p must lie in [1, 2]");
    if (!(irls_epsilon > 0.0)) throw std::invalid_argument("baseline: irls_epsilon must be > 0");
  }
}

double LpObjective(const Eigen::VectorXd& x, const Scenario& scenario, const Eigen::VectorXd& ranges, double p) {
  return Residuals(x, scenario, ranges).array().abs().pow(p).sum();
}

SolveResult SolveGaussNewtonL2(const Scenario& scenario, const Measurements& measurements,
                               const BaselineConfig& config) {
  return RunWeightedGaussNewton(scenario, measurements, config, false);
}

SolveResult SolveIrlsLp(const Scenario& scenario, const Measurements& measurements,
                        const BaselineConfig& config) {
  return RunWeightedGaussNewton(scenario, measurements, config, true);
}

SolveResult SolveBaseline(const Scenario& scenario, const Measurements& measurements,
                          const BaselineConfig& config) {
  return config.kind == BaselineKind::kGaussNewtonL2 ? SolveGaussNewtonL2(scenario, measurements, config)
                                                     : SolveIrlsLp(scenario, measurements, config);
}

}  // namespace robloc
