#include "robloc/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "robloc/csv.hpp"

namespace robloc {
namespace {

struct PointParams {
  double alpha;
  double gsnr_db;
  int sensors;
};

PointParams ParamsAt(const ExperimentConfig& config, int point) {
  PointParams p{config.alpha, config.gsnr_db, config.sensors};
  if (config.sweep == SweepParam::kNone) return p;
  const double v = config.sweep_values.at(static_cast<std::size_t>(point));
  switch (config.sweep) {
    case SweepParam::kGsnr: p.gsnr_db = v; break;
    case SweepParam::kSensors: p.sensors = static_cast<int>(std::lround(v)); break;
    case SweepParam::kAlpha: p.alpha = v; break;
    case SweepParam::kNone: break;
  }
  return p;
}

int NumPoints(const ExperimentConfig& config) {
  return config.sweep == SweepParam::kNone ? 1 : static_cast<int>(config.sweep_values.size());
}

RunRecord RunOne(const EstimatorSpec& est, const TrialInput& trial, int run, bool record_timing) {
  RunRecord rec;
  rec.run = run;
  rec.truth = trial.scenario.source;
  const auto start = std::chrono::steady_clock::now();
  try {
    SolveResult res = est.Run(trial.scenario, trial.measurements);
    rec.estimate = std::move(res.estimate);
    rec.converged = res.converged;
    rec.iterations = res.iterations;
    rec.failed = !rec.estimate.allFinite();
  } catch (const std::exception&) {
    rec.estimate = Eigen::VectorXd::Constant(trial.scenario.dimension(),
                                             std::numeric_limits<double>::quiet_NaN());
    rec.failed = true;
  }
  if (record_timing) {
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  if (rec.failed) rec.converged = false;
  return rec;
}

template <typename Fn>
void ParallelFor(int n, int jobs, Fn&& fn) {
  const int workers = std::max(1, std::min(jobs, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) fn(i);
    });
  }
}

EstimatorSummary Summarize(const std::string& name, std::vector<RunRecord> records, bool keep) {
  EstimatorSummary s;
  s.name = name;
  s.runs = static_cast<int>(records.size());
  std::vector<Eigen::VectorXd> est;
  std::vector<Eigen::VectorXd> truth;
  double iters = 0.0;
  double seconds = 0.0;
  int converged = 0;
  for (const auto& r : records) {
    if (r.failed) {
      ++s.failures;
    } else {
      est.push_back(r.estimate);
      truth.push_back(r.truth);
    }
    converged += r.converged ? 1 : 0;
    iters += r.iterations;
    seconds += r.seconds;
  }
  if (s.runs > 0) {
    s.conv_rate = static_cast<double>(converged) / s.runs;
    s.mean_iters = iters / s.runs;
    s.mean_seconds = seconds / s.runs;
  }
  if (est.empty()) {
    s.rmse = std::numeric_limits<double>::quiet_NaN();
  } else {
    s.rmse = Rmse(est, truth);
    const double mse = s.rmse * s.rmse;
    double var = 0.0;
    for (std::size_t j = 0; j < est.size(); ++j) {
      const double e = (est[j] - truth[j]).squaredNorm() - mse;
      var += e * e;
    }
    if (est.size() > 1) {
      var /= static_cast<double>(est.size() - 1);
      s.mse_std_error = std::sqrt(var / static_cast<double>(est.size()));
    }
  }
  if (keep) s.records = std::move(records);
  return s;
}

}  // namespace

std::string_view SweepParamName(SweepParam param) {
  switch (param) {
    case SweepParam::kNone: return "none";
    case SweepParam::kGsnr: return "gsnr";
    case SweepParam::kSensors: return "sensors";
    case SweepParam::kAlpha: return "alpha";
  }
  return "none";
}

EstimatorSpec EstimatorSpec::Admm(std::string name, LossSpec loss, AdmmConfig config) {
  EstimatorSpec s;
  s.name = std::move(name);
  s.type = Type::kAdmm;
  s.loss = loss;
  s.admm = config;
  return s;
}

EstimatorSpec EstimatorSpec::GaussNewton(std::string name, BaselineConfig config) {
  EstimatorSpec s;
  s.name = std::move(name);
  s.type = Type::kBaseline;
  config.kind = BaselineKind::kGaussNewtonL2;
  s.baseline = config;
  return s;
}

EstimatorSpec EstimatorSpec::Irls(std::string name, double p, BaselineConfig config) {
  EstimatorSpec s;
  s.name = std::move(name);
  s.type = Type::kBaseline;
  config.kind = BaselineKind::kIrlsLp;
  config.p = p;
  s.baseline = config;
  return s;
}

SolveResult EstimatorSpec::Run(const Scenario& scenario, const Measurements& measurements) const {
  if (type == Type::kAdmm) return SolveAdmm(scenario, measurements, loss, admm);
  return SolveBaseline(scenario, measurements, baseline);
}

void ExperimentConfig::Validate() const {
  if (n_mc < 1) throw std::invalid_argument("experiment: n_mc must be >= 1");
  if (!(side > 0.0)) throw std::invalid_argument("experiment: side must be > 0");
  if (jobs < 1) throw std::invalid_argument("experiment: jobs must be >= 1");
  if (sweep != SweepParam::kNone && sweep_values.empty()) {
    throw std::invalid_argument("experiment: sweep needs at least one value");
  }
  for (int point = 0; point < NumPoints(*this); ++point) {
    const PointParams p = ParamsAt(*this, point);
    if (!(p.alpha > 0.0 && p.alpha <= 2.0)) throw std::invalid_argument("experiment: alpha must lie in (0, 2]");
    if (!std::isfinite(p.gsnr_db)) throw std::invalid_argument("experiment: gsnr must be finite");
    if (p.sensors < 1) throw std::invalid_argument("experiment: sensors must be >= 1");
  }
  for (const auto& est : estimators) {
    if (est.type == EstimatorSpec::Type::kAdmm) {
      est.admm.Validate();
      est.loss.Validate();
      if (!est.loss.HasProx()) throw std::invalid_argument("experiment: loss " + est.loss.Describe() + " has no prox");
    } else {
      est.baseline.Validate();
    }
  }
}

double Rmse(const std::vector<Eigen::VectorXd>& estimates, const std::vector<Eigen::VectorXd>& truths) {
  if (estimates.size() != truths.size()) throw std::invalid_argument("rmse: length mismatch");
  if (estimates.empty()) throw std::invalid_argument("rmse: no runs");
  double total = 0.0;
  for (std::size_t j = 0; j < estimates.size(); ++j) {
    if (estimates[j].size() != truths[j].size()) throw std::invalid_argument("rmse: dimension mismatch");
    total += (estimates[j] - truths[j]).squaredNorm();
  }
  return std::sqrt(total / static_cast<double>(estimates.size()));
}

TrialInput MakeTrial(const ExperimentConfig& config, int point, int run) {
  const PointParams p = ParamsAt(config, point);
  Rng rng = Rng::Stream(config.seed, static_cast<std::uint64_t>(point), static_cast<std::uint64_t>(run));
  Scenario scenario = config.geometry == GeometryKind::kRandomSquare
                          ? RandomSquareScenario(p.sensors, config.side, rng)
                          : FixedPerimeterScenario(p.sensors, config.side);
  StableParams noise;
  noise.alpha = p.alpha;
  noise.zeta = config.zeta;
  noise.mu = 0.0;
  noise.gamma = GammaForGsnr(scenario, p.alpha, p.gsnr_db);
  Measurements m = config.noiseless ? MakeMeasurements(TrueRanges(scenario)) : Measure(scenario, noise, rng);
  return {std::move(scenario), noise, std::move(m)};
}

SweepResult RunSweep(const ExperimentConfig& config) {
  config.Validate();
  SweepResult out;
  out.param = config.sweep;
  const int n_est = static_cast<int>(config.estimators.size());
  for (int point = 0; point < NumPoints(config); ++point) {
    std::vector<std::vector<RunRecord>> records(static_cast<std::size_t>(n_est),
                                                std::vector<RunRecord>(static_cast<std::size_t>(config.n_mc)));
    ParallelFor(config.n_mc, config.jobs, [&](int run) {
      const TrialInput trial = MakeTrial(config, point, run);
      for (int e = 0; e < n_est; ++e) {
        records[e][run] = RunOne(config.estimators[e], trial, run, config.record_timing);
      }
    });
    SweepPoint sp;
    sp.value = config.sweep == SweepParam::kNone ? 0.0 : config.sweep_values[point];
    for (int e = 0; e < n_est; ++e) {
      sp.estimators.push_back(Summarize(config.estimators[e].name, std::move(records[e]), config.keep_runs));
    }
    out.points.push_back(std::move(sp));
  }
  return out;
}

TraceOutput ConvergenceTrace(const TraceExperiment& experiment) {
  Scenario scenario = FixedPerimeterScenario(8);
  StableParams noise;
  noise.alpha = experiment.alpha;
  noise.gamma = GammaForGsnr(scenario, experiment.alpha, experiment.gsnr_db);
  Measurements m = experiment.noiseless ? MakeMeasurements(TrueRanges(scenario))
                                        : Measure(scenario, noise, experiment.seed);
  AdmmConfig admm = experiment.admm;
  admm.trace = true;
  SolveResult result = SolveAdmm(scenario, m, experiment.loss, admm);
  return {std::move(scenario), std::move(m), std::move(result)};
}

TimingReport MakeTimingReport(const ExperimentConfig& config, int scaling_iters) {
  config.Validate();
  TimingReport report;
  if (config.estimators.empty()) return report;

  ExperimentConfig single = config;
  single.sweep = SweepParam::kNone;
  single.record_timing = true;
  single.keep_runs = false;
  const SweepResult sweep = RunSweep(single);
  for (const auto& est : sweep.points.front().estimators) {
    report.mean_seconds.emplace_back(est.name, est.mean_seconds);
  }

  const EstimatorSpec* huber = nullptr;
  for (const auto& est : config.estimators) {
    if (est.type == EstimatorSpec::Type::kAdmm && est.loss.kind == LossKind::kHuber) {
      huber = &est;
      break;
    }
  }
  if (huber == nullptr) return report;

  EstimatorSpec fixed_iters = *huber;
  fixed_iters.admm.max_iters = scaling_iters;
  // Never satisfied, so every run performs exactly scaling_iters iterations.
  fixed_iters.admm.delta = std::numeric_limits<double>::min();
  fixed_iters.admm.trace = false;

  auto time_at = [&](int sensors) {
    ExperimentConfig c = config;
    c.sweep = SweepParam::kNone;
    c.sensors = sensors;
    c.geometry = GeometryKind::kFixedPerimeter;
    c.estimators = {fixed_iters};
    c.record_timing = true;
    c.jobs = 1;
    return RunSweep(c).points.front().estimators.front().mean_seconds;
  };
  ScalingCheck check;
  check.estimator = huber->name;
  check.iterations = scaling_iters;
  check.seconds_small = time_at(8);
  check.seconds_large = time_at(64);
  check.ratio = check.seconds_large / check.seconds_small;
  report.scaling = check;
  return report;
}

void WriteSweepCsv(std::ostream& out, const SweepResult& result) {
  out << "sweep_param,value,estimator,rmse,conv_rate,mean_iters,mean_seconds\n";
  for (const auto& point : result.points) {
    for (const auto& est : point.estimators) {
      out << SweepParamName(result.param) << ',' << FormatDouble(point.value) << ',' << est.name << ','
          << FormatDouble(est.rmse) << ',' << FormatDouble(est.conv_rate) << ',' << FormatDouble(est.mean_iters)
          << ',' << FormatDouble(est.mean_seconds) << '\n';
    }
  }
}

void WriteSweepJson(std::ostream& out, const SweepResult& result) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json doc;
  doc["sweep_param"] = SweepParamName(result.param);
  doc["points"] = nlohmann::json::array();
  for (const auto& point : result.points) {
    nlohmann::json p;
    p["value"] = point.value;
    p["estimators"] = nlohmann::json::array();
    for (const auto& est : point.estimators) {
      p["estimators"].push_back({{"name", est.name},
                                 {"rmse", num(est.rmse)},
                                 {"conv_rate", est.conv_rate},
                                 {"mean_iters", est.mean_iters},
                                 {"mean_seconds", est.mean_seconds},
                                 {"failures", est.failures},
                                 {"runs", est.runs}});
    }
    doc["points"].push_back(std::move(p));
  }
  out << doc.dump(2) << '\n';
}

}  // namespace robloc
