#include "robloc/admm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "robloc/csv.hpp"

namespace robloc {
namespace {

constexpr double kMinInitialDistance = 1e-6;
constexpr double kNonnegativitySlack = 1e-12;

void RequireFinite(const Eigen::MatrixXd& m, const char* step, int k) {
  if (!m.allFinite()) {
    std::ostringstream msg;
    msg << "admm: non-finite value produced by the " << step << " at iteration " << k;
    throw NumericalError(msg.str());
  }
}

void CheckShapes(const AdmmState& s, const Scenario& scenario) {
  const int h = scenario.dimension();
  const int l = scenario.num_sensors();
  if (s.x.size() != h || s.d.size() != l || s.beta.rows() != h || s.beta.cols() != l ||
      s.lambda.rows() != h || s.lambda.cols() != l) {
    throw std::invalid_argument("admm: initial state does not match the scenario dimensions");
  }
}

Eigen::MatrixXd NormalizeColumns(const Eigen::MatrixXd& v, const Eigen::MatrixXd& previous) {
  Eigen::MatrixXd out = previous;
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    const double n = v.col(i).norm();
    if (n > 0.0) {
      out.col(i) = v.col(i) / n;
      // One more pass pins the norm to within an ulp or two of 1.
      out.col(i) /= out.col(i).norm();
    }
  }
  return out;
}

Eigen::VectorXd DFromTargets(const Eigen::MatrixXd& v, const Eigen::VectorXd& ranges,
                             const LossSpec& loss, double rho) {
  const ProxParams params{1.0 / rho};
  Eigen::VectorXd d(v.cols());
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    const double r = ranges(i);
    d(i) = r - Prox(loss, params, r - v.col(i).norm());
    if (r >= 0.0 && d(i) < -kNonnegativitySlack) {
      std::ostringstream msg;
      msg << "admm: d-update produced d_" << i << " = " << d(i) << " < 0 for " << loss.Describe();
      throw NonnegativityError(msg.str());
    }
  }
  return d;
}

double DiffNorm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).norm(); }

TraceRecord MakeRecord(const AdmmState& s, const AdmmState* prev, const Scenario& scenario,
                       const Eigen::VectorXd& ranges, const LossSpec& loss, const AdmmConfig& config) {
  TraceRecord rec;
  rec.k = s.k;
  rec.objective = RobustObjective(s.x, scenario, ranges, loss);
  rec.aug_lagrangian = AugmentedLagrangian(s, scenario, ranges, loss, config);
  rec.primal_residual = PrimalResidualSum(s, scenario);
  if (prev != nullptr) {
    rec.dx = DiffNorm(s.x, prev->x);
    rec.dd = DiffNorm(s.d, prev->d);
    rec.dbeta = DiffNorm(s.beta, prev->beta);
    rec.dlambda = DiffNorm(s.lambda, prev->lambda);
  }
  rec.x = s.x;
  return rec;
}

}  // namespace

void AdmmConfig::Validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw std::invalid_argument("admm: rho must be > 0");
  if (!(delta > 0.0)) throw std::invalid_argument("admm: delta must be > 0");
  if (max_iters < 1) throw std::invalid_argument("admm: max_iters must be >= 1");
}

int ClampRanges(Eigen::VectorXd& ranges) {
  int clamped = 0;
  for (auto& r : ranges) {
    if (r < 0.0) {
      r = 0.0;
      ++clamped;
    }
  }
  return clamped;
}

AdmmState DefaultInitialState(const Scenario& scenario, const Eigen::VectorXd& ranges) {
  const int h = scenario.dimension();
  const int l = scenario.num_sensors();
  AdmmState s;
  s.x = scenario.sensors.rowwise().mean();
  s.d = ranges.cwiseMax(kMinInitialDistance);
  s.beta.resize(h, l);
  for (int i = 0; i < l; ++i) {
    const Eigen::VectorXd dir = s.x - scenario.sensors.col(i);
    const double n = dir.norm();
    if (n < 1e-12) {
      s.beta.col(i) = Eigen::VectorXd::Unit(h, 0);
    } else {
      s.beta.col(i) = dir / n;
    }
  }
  s.lambda = Eigen::MatrixXd::Zero(h, l);
  s.k = 0;
  return s;
}

AdmmState RandomInitialState(const Scenario& scenario, const Eigen::VectorXd& ranges, RngSeed seed) {
  Rng rng(seed);
  const Eigen::VectorXd lo = scenario.sensors.rowwise().minCoeff();
  const Eigen::VectorXd hi = scenario.sensors.rowwise().maxCoeff();
  AdmmState s = DefaultInitialState(scenario, ranges);
  for (int j = 0; j < scenario.dimension(); ++j) {
    s.x(j) = rng.Uniform(lo(j), hi(j));
  }
  for (int i = 0; i < scenario.num_sensors(); ++i) {
    const Eigen::VectorXd dir = s.x - scenario.sensors.col(i);
    const double n = dir.norm();
    s.beta.col(i) = n < 1e-12 ? Eigen::VectorXd::Unit(scenario.dimension(), 0) : Eigen::VectorXd(dir / n);
  }
  return s;
}

Eigen::VectorXd XUpdate(const AdmmState& state, const Scenario& scenario, const AdmmConfig& config) {
  const Eigen::MatrixXd w = scenario.sensors + state.beta * state.d.asDiagonal() -
                            state.lambda / config.rho;
  return w.rowwise().mean();
}

Eigen::MatrixXd DirectionTargets(const AdmmState& state, const Scenario& scenario,
                                 const AdmmConfig& config) {
  return (-scenario.sensors).colwise() + state.x + state.lambda / config.rho;
}

Eigen::MatrixXd BetaUpdate(const AdmmState& state, const Scenario& scenario, const AdmmConfig& config) {
  return NormalizeColumns(DirectionTargets(state, scenario, config), state.beta);
}

Eigen::VectorXd DUpdate(const AdmmState& state, const Scenario& scenario, const Eigen::VectorXd& ranges,
                        const LossSpec& loss, const AdmmConfig& config) {
  return DFromTargets(DirectionTargets(state, scenario, config), ranges, loss, config.rho);
}

Eigen::MatrixXd LambdaUpdate(const AdmmState& state, const Scenario& scenario, const AdmmConfig& config) {
  return state.lambda + config.rho * ConstraintResiduals(state, scenario);
}

Eigen::MatrixXd ConstraintResiduals(const AdmmState& state, const Scenario& scenario) {
  return ((-scenario.sensors).colwise() + state.x) - state.beta * state.d.asDiagonal();
}

double PrimalResidualSum(const AdmmState& state, const Scenario& scenario) {
  return ConstraintResiduals(state, scenario).colwise().norm().sum();
}

double RobustObjective(const Eigen::VectorXd& x, const Scenario& scenario, const Eigen::VectorXd& ranges,
                       const LossSpec& loss) {
  double total = 0.0;
  for (int i = 0; i < scenario.num_sensors(); ++i) {
    total += Eval(loss, ranges(i) - (x - scenario.sensors.col(i)).norm());
  }
  return total;
}

double AugmentedLagrangian(const AdmmState& state, const Scenario& scenario, const Eigen::VectorXd& ranges,
                           const LossSpec& loss, const AdmmConfig& config) {
  const Eigen::MatrixXd res = ConstraintResiduals(state, scenario);
  double total = 0.0;
  for (int i = 0; i < scenario.num_sensors(); ++i) {
    total += Eval(loss, ranges(i) - state.d(i));
  }
  total += (state.lambda.array() * res.array()).sum();
  total += 0.5 * config.rho * res.squaredNorm();
  return total;
}

SolveResult SolveAdmm(const Scenario& scenario, const Measurements& measurements, const LossSpec& loss,
                      const AdmmConfig& config, std::optional<AdmmState> init) {
  config.Validate();
  loss.Validate();
  if (!loss.HasProx()) {
    throw LossError("admm: loss " + loss.Describe() + " has no proximal rule");
  }
  if (measurements.size() != scenario.num_sensors()) {
    throw std::invalid_argument("admm: range count does not match sensor count");
  }
  if (!measurements.ranges.allFinite()) {
    throw std::invalid_argument("admm: ranges must be finite");
  }

  SolveResult result;
  Eigen::VectorXd ranges = measurements.ranges;
  if (const int clamped = ClampRanges(ranges); clamped > 0) {
    result.warnings.push_back(std::to_string(clamped) + " negative range(s) clamped to 0");
  }

  AdmmState state = init ? std::move(*init) : DefaultInitialState(scenario, ranges);
  CheckShapes(state, scenario);
  state.k = 0;

  if (config.trace) {
    result.trace.reserve(static_cast<std::size_t>(std::min(config.max_iters, 4096)) + 1);
    result.trace.push_back(MakeRecord(state, nullptr, scenario, ranges, loss, config));
  }

  result.min_d = std::numeric_limits<double>::infinity();
  double stop_sum = PrimalResidualSum(state, scenario);
  for (int k = 0; k < config.max_iters; ++k) {
    AdmmState next;
    next.k = k + 1;

    next.x = XUpdate(state, scenario, config);
    RequireFinite(next.x, "x-update", k);

    const Eigen::MatrixXd v =
        (-scenario.sensors).colwise() + next.x + state.lambda / config.rho;
    next.beta = NormalizeColumns(v, state.beta);
    RequireFinite(next.beta, "beta-update", k);
    next.d = DFromTargets(v, ranges, loss, config.rho);
    RequireFinite(next.d, "d-update", k);
    result.min_d = std::min(result.min_d, next.d.minCoeff());

    next.lambda = state.lambda + config.rho * ConstraintResiduals(next, scenario);
    RequireFinite(next.lambda, "lambda-update", k);

    // The stopping test is evaluated on iterate k, after iterate k + 1 exists.
    stop_sum = PrimalResidualSum(state, scenario);

    if (config.trace) {
      result.trace.push_back(MakeRecord(next, &state, scenario, ranges, loss, config));
    }
    state = std::move(next);
    result.iterations = k + 1;
    if (stop_sum < config.delta) {
      result.converged = true;
      break;
    }
  }

  result.primal_residual = stop_sum;
  result.estimate = state.x;
  result.final_state = std::move(state);
  return result;
}

KktReport KktResiduals(const SolveResult& result, const Scenario& scenario, const Measurements& measurements,
                       const LossSpec& loss) {
  if (!result.final_state) {
    throw std::invalid_argument("kkt: result carries no final ADMM state");
  }
  const AdmmState& s = *result.final_state;
  Eigen::VectorXd ranges = measurements.ranges;
  ClampRanges(ranges);

  KktReport report;
  report.converged = result.converged;
  report.dual_x_residual = s.lambda.rowwise().sum().norm();
  const Eigen::MatrixXd res = ConstraintResiduals(s, scenario);
  for (int i = 0; i < scenario.num_sensors(); ++i) {
    const double projection = s.lambda.col(i).dot(s.beta.col(i));
    // Stationarity in d_i: -f'(r_i - d_i) - lambda_i . beta_i = 0.
    const double g = SubgradientNearest(loss, ranges(i) - s.d(i), -projection);
    report.d_stationarity = std::max(report.d_stationarity, std::abs(-g - projection));
    report.beta_stationarity = std::max(report.beta_stationarity, (s.d(i) * s.lambda.col(i)).norm());
    report.primal_feasibility = std::max(report.primal_feasibility, res.col(i).norm());
    report.beta_norm_violation =
        std::max(report.beta_norm_violation, std::abs(s.beta.col(i).squaredNorm() - 1.0));
  }
  return report;
}

void WriteTraceCsv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << "k,objective,aug_lagrangian,primal_residual,dx,dd,dbeta,dlambda";
  const Eigen::Index h = trace.empty() ? 0 : trace.front().x.size();
  for (Eigen::Index j = 0; j < h; ++j) out << ",x" << j;
  out << '\n';
  for (const auto& rec : trace) {
    out << rec.k << ',' << FormatDouble(rec.objective) << ',' << FormatDouble(rec.aug_lagrangian) << ','
        << FormatDouble(rec.primal_residual) << ',' << FormatDouble(rec.dx) << ',' << FormatDouble(rec.dd)
        << ',' << FormatDouble(rec.dbeta) << ',' << FormatDouble(rec.dlambda);
    for (Eigen::Index j = 0; j < rec.x.size(); ++j) out << ',' << FormatDouble(rec.x(j));
    out << '\n';
  }
}

}  // namespace robloc
