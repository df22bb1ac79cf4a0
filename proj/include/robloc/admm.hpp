#pragma once

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "robloc/loss.hpp"
#include "robloc/model.hpp"

namespace robloc {

struct AdmmConfig {
  double rho = 5.0;
  double delta = 1e-5;
  int max_iters = 2000;
  bool trace = false;

  void Validate() const;
};

// ADMM iterate. beta and lambda hold one H-vector per sensor, column-wise.
struct AdmmState {
  Eigen::VectorXd x;
  Eigen::VectorXd d;
  Eigen::MatrixXd beta;
  Eigen::MatrixXd lambda;
  int k = 0;
};

struct TraceRecord {
  int k = 0;
  double objective = 0.0;
  double aug_lagrangian = 0.0;
  double primal_residual = 0.0;
  double dx = 0.0;
  double dd = 0.0;
  double dbeta = 0.0;
  double dlambda = 0.0;
  Eigen::VectorXd x;
};

struct SolveResult {
  Eigen::VectorXd estimate;
  int iterations = 0;
  bool converged = false;
  // ADMM: the stopping sum sum_i ||x - x_i - beta_i d_i|| that ended the run.
  // Baselines: norm of the last step.
  double primal_residual = 0.0;
  std::vector<TraceRecord> trace;
  // Final iterate, retained for KKT diagnostics (ADMM only).
  std::optional<AdmmState> final_state;
  // Smallest d_i produced by any d-update during the run.
  double min_d = 0.0;
  std::vector<std::string> warnings;
};

struct KktReport {
  double dual_x_residual = 0.0;
  double d_stationarity = 0.0;
  double beta_stationarity = 0.0;
  double primal_feasibility = 0.0;
  double beta_norm_violation = 0.0;
  bool converged = false;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonnegativityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deterministic start: sensor centroid, d = max(r, 1e-6), beta pointing from
// each sensor to the centroid, lambda = 0.
AdmmState DefaultInitialState(const Scenario& scenario, const Eigen::VectorXd& ranges);
// Random start (x uniform in the sensors' bounding box), other blocks as above.
AdmmState RandomInitialState(const Scenario& scenario, const Eigen::VectorXd& ranges, RngSeed seed);

// Negative ranges clamped to zero; returns the number clamped.
int ClampRanges(Eigen::VectorXd& ranges);

// x <- mean_i (x_i + beta_i d_i - lambda_i / rho)
Eigen::VectorXd XUpdate(const AdmmState& state, const Scenario& scenario, const AdmmConfig& config);

// v_i = x - x_i + lambda_i / rho, computed with the already-updated x.
Eigen::MatrixXd DirectionTargets(const AdmmState& state, const Scenario& scenario,
                                 const AdmmConfig& config);

// beta_i <- v_i / ||v_i||; a zero v_i keeps the previous beta_i.
Eigen::MatrixXd BetaUpdate(const AdmmState& state, const Scenario& scenario, const AdmmConfig& config);

// d_i <- r_i - prox_{f/rho}(r_i - ||v_i||). Throws NonnegativityError if a
// nonnegative range yields d_i < -1e-12.
Eigen::VectorXd DUpdate(const AdmmState& state, const Scenario& scenario,
                        const Eigen::VectorXd& ranges, const LossSpec& loss, const AdmmConfig& config);

// lambda_i <- lambda_i + rho (x - x_i - beta_i d_i)
Eigen::MatrixXd LambdaUpdate(const AdmmState& state, const Scenario& scenario, const AdmmConfig& config);

// Columns x - x_i - beta_i d_i.
Eigen::MatrixXd ConstraintResiduals(const AdmmState& state, const Scenario& scenario);
double PrimalResidualSum(const AdmmState& state, const Scenario& scenario);

double AugmentedLagrangian(const AdmmState& state, const Scenario& scenario,
                           const Eigen::VectorXd& ranges, const LossSpec& loss, const AdmmConfig& config);

// sum_i f(r_i - ||x - x_i||)
double RobustObjective(const Eigen::VectorXd& x, const Scenario& scenario,
                       const Eigen::VectorXd& ranges, const LossSpec& loss);

// Runs x -> (beta, d) -> lambda until the stopping sum of the previous
// iterate drops below delta, or max_iters is reached.
SolveResult SolveAdmm(const Scenario& scenario, const Measurements& measurements, const LossSpec& loss,
                      const AdmmConfig& config, std::optional<AdmmState> init = std::nullopt);

KktReport KktResiduals(const SolveResult& result, const Scenario& scenario,
                       const Measurements& measurements, const LossSpec& loss);

// Header: k,objective,aug_lagrangian,primal_residual,dx,dd,dbeta,dlambda,x0,x1,...
void WriteTraceCsv(std::ostream& out, const std::vector<TraceRecord>& trace);

}  // namespace robloc
