#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "robloc/admm.hpp"
#include "robloc/baselines.hpp"
#include "robloc/loss.hpp"
#include "robloc/model.hpp"

namespace robloc {

enum class GeometryKind { kRandomSquare, kFixedPerimeter };
enum class SweepParam { kNone, kGsnr, kSensors, kAlpha };

std::string_view SweepParamName(SweepParam param);

struct EstimatorSpec {
  enum class Type { kAdmm, kBaseline };

  std::string name;
  Type type = Type::kAdmm;
  LossSpec loss;
  AdmmConfig admm;
  BaselineConfig baseline;

  static EstimatorSpec Admm(std::string name, LossSpec loss, AdmmConfig config = {});
  static EstimatorSpec GaussNewton(std::string name, BaselineConfig config = {});
  static EstimatorSpec Irls(std::string name, double p, BaselineConfig config = {});

  SolveResult Run(const Scenario& scenario, const Measurements& measurements) const;
};

struct ExperimentConfig {
  GeometryKind geometry = GeometryKind::kRandomSquare;
  double side = 20.0;
  int n_mc = 200;
  std::vector<EstimatorSpec> estimators;
  SweepParam sweep = SweepParam::kNone;
  std::vector<double> sweep_values;
  // Values used for every parameter that is not swept.
  double alpha = 1.5;
  double zeta = 0.0;
  double gsnr_db = 20.0;
  int sensors = 8;
  bool noiseless = false;
  RngSeed seed{1};
  int jobs = 1;
  bool keep_runs = false;
  // When false, wall-clock timing is not recorded and mean_seconds is 0, which
  // makes sweep artifacts byte-reproducible.
  bool record_timing = true;

  void Validate() const;
};

struct RunRecord {
  int run = 0;
  Eigen::VectorXd truth;
  Eigen::VectorXd estimate;
  bool converged = false;
  bool failed = false;
  int iterations = 0;
  double seconds = 0.0;
};

struct EstimatorSummary {
  std::string name;
  double rmse = 0.0;
  double conv_rate = 0.0;
  double mean_iters = 0.0;
  double mean_seconds = 0.0;
  int failures = 0;
  int runs = 0;
  // Standard error of the mean squared position error.
  double mse_std_error = 0.0;
  std::vector<RunRecord> records;
};

struct SweepPoint {
  double value = 0.0;
  std::vector<EstimatorSummary> estimators;
};

struct SweepResult {
  SweepParam param = SweepParam::kNone;
  std::vector<SweepPoint> points;
};

// sqrt( sum_j ||estimate_j - truth_j||^2 / N )
double Rmse(const std::vector<Eigen::VectorXd>& estimates, const std::vector<Eigen::VectorXd>& truths);

// Geometry, noise and measurements for run `run` at sweep point `point`.
struct TrialInput {
  Scenario scenario;
  StableParams noise;
  Measurements measurements;
};
TrialInput MakeTrial(const ExperimentConfig& config, int point, int run);

SweepResult RunSweep(const ExperimentConfig& config);

// Single-run trace on the fixed 8-sensor perimeter scenario with source (2, 3).
struct TraceExperiment {
  LossSpec loss = LossSpec::Huber(1.0);
  AdmmConfig admm;
  double alpha = 1.5;
  double gsnr_db = 20.0;
  bool noiseless = false;
  RngSeed seed{1};
};

struct TraceOutput {
  Scenario scenario;
  Measurements measurements;
  SolveResult result;
};

TraceOutput ConvergenceTrace(const TraceExperiment& experiment);

struct ScalingCheck {
  std::string estimator;
  int iterations = 0;
  double seconds_small = 0.0;  // L = 8
  double seconds_large = 0.0;  // L = 64
  double ratio = 0.0;
};

struct TimingReport {
  std::vector<std::pair<std::string, double>> mean_seconds;
  std::optional<ScalingCheck> scaling;
};

// Mean wall time per run for every estimator on identical trials. When the
// config contains a Huber ADMM estimator, also times it at L = 8 and L = 64
// with a fixed iteration count.
TimingReport MakeTimingReport(const ExperimentConfig& config, int scaling_iters = 200);

void WriteSweepCsv(std::ostream& out, const SweepResult& result);
void WriteSweepJson(std::ostream& out, const SweepResult& result);

}  // namespace robloc
