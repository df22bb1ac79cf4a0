#include <gtest/gtest.h>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>

#include "robloc/experiments.hpp"

namespace robloc {
namespace {

Eigen::VectorXd V(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

std::vector<EstimatorSpec> FourEstimators() {
  return {EstimatorSpec::Admm("lp_admm", LossSpec::Lp(1.3)), EstimatorSpec::Admm("huber_admm", LossSpec::Huber(1.0)),
          EstimatorSpec::Irls("irls", 1.3), EstimatorSpec::GaussNewton("gn")};
}

ExperimentConfig FixedConfig(int n_mc) {
  ExperimentConfig c;
  c.geometry = GeometryKind::kFixedPerimeter;
  c.n_mc = n_mc;
  c.estimators = FourEstimators();
  c.record_timing = false;
  return c;
}

const EstimatorSummary& Find(const SweepPoint& p, const std::string& name) {
  const auto it = std::find_if(p.estimators.begin(), p.estimators.end(),
                               [&](const EstimatorSummary& s) { return s.name == name; });
  EXPECT_NE(it, p.estimators.end());
  return *it;
}

TEST(Rmse, WorkedExamples) {
  EXPECT_EQ(Rmse({V(1, 2), V(3, 4)}, {V(1, 2), V(3, 4)}), 0.0);
  EXPECT_DOUBLE_EQ(Rmse({V(3, 4)}, {V(0, 0)}), 5.0);
  EXPECT_DOUBLE_EQ(Rmse({V(1, 0), V(0, 1)}, {V(0, 0), V(0, 0)}), 1.0);
  EXPECT_THROW(Rmse({V(1, 0)}, {V(0, 0), V(0, 0)}), std::invalid_argument);
  EXPECT_THROW(Rmse({}, {}), std::invalid_argument);
}

TEST(Rmse, InvariantUnderRunRelabeling) {
  Rng rng(RngSeed{5});
  std::vector<Eigen::VectorXd> est;
  std::vector<Eigen::VectorXd> tru;
  for (int i = 0; i < 50; ++i) {
    est.push_back(V(rng.Uniform(-5, 5), rng.Uniform(-5, 5)));
    tru.push_back(V(rng.Uniform(-5, 5), rng.Uniform(-5, 5)));
  }
  const double base = Rmse(est, tru);
  std::reverse(est.begin(), est.end());
  std::reverse(tru.begin(), tru.end());
  EXPECT_NEAR(Rmse(est, tru), base, 1e-12);
}

TEST(RunSweep, NoiselessSingleRunIsExact) {
  for (GeometryKind g : {GeometryKind::kFixedPerimeter, GeometryKind::kRandomSquare}) {
    ExperimentConfig c = FixedConfig(1);
    c.geometry = g;
    c.noiseless = true;
    const SweepResult r = RunSweep(c);
    ASSERT_EQ(r.points.size(), 1u);
    for (const EstimatorSummary& s : r.points[0].estimators) EXPECT_LE(s.rmse, 1e-3) << s.name;
  }
}

TEST(RunSweep, FixedScenarioOrdering) {
  const SweepResult r = RunSweep(FixedConfig(200));
  const SweepPoint& p = r.points[0];
  EXPECT_LE(Find(p, "lp_admm").rmse, 1.1 * Find(p, "irls").rmse);
  EXPECT_LT(Find(p, "irls").rmse, Find(p, "gn").rmse);
  for (const EstimatorSummary& s : p.estimators) {
    EXPECT_GE(s.rmse, 0.0);
    EXPECT_GE(s.conv_rate, 0.0);
    EXPECT_LE(s.conv_rate, 1.0);
    EXPECT_EQ(s.runs, 200);
  }
}

TEST(RunSweep, DeterministicAndJobsIndependent) {
  ExperimentConfig c = FixedConfig(20);
  c.geometry = GeometryKind::kRandomSquare;
  c.sweep = SweepParam::kGsnr;
  c.sweep_values = {10.0, 20.0};
  c.keep_runs = true;
  const SweepResult a = RunSweep(c);
  const SweepResult b = RunSweep(c);
  c.jobs = 3;
  const SweepResult threaded = RunSweep(c);
  std::ostringstream ca, cb, ct;
  WriteSweepCsv(ca, a);
  WriteSweepCsv(cb, b);
  WriteSweepCsv(ct, threaded);
  EXPECT_EQ(ca.str(), cb.str());
  EXPECT_EQ(ca.str(), ct.str());
  for (std::size_t p = 0; p < a.points.size(); ++p) {
    for (std::size_t e = 0; e < a.points[p].estimators.size(); ++e) {
      const auto& ra = a.points[p].estimators[e].records;
      const auto& rt = threaded.points[p].estimators[e].records;
      ASSERT_EQ(ra.size(), rt.size());
      for (std::size_t i = 0; i < ra.size(); ++i) EXPECT_EQ(ra[i].estimate, rt[i].estimate);
    }
  }
}

TEST(RunSweep, EstimatorsSharePairedMeasurements) {
  ExperimentConfig c = FixedConfig(10);
  c.geometry = GeometryKind::kRandomSquare;
  c.keep_runs = true;
  const SweepResult r = RunSweep(c);
  for (int run = 0; run < 10; ++run) {
    const TrialInput t = MakeTrial(c, 0, run);
    const TrialInput again = MakeTrial(c, 0, run);
    EXPECT_EQ(t.measurements.ranges, again.measurements.ranges);
    for (std::size_t e = 0; e < c.estimators.size(); ++e) {
      const RunRecord& rec = r.points[0].estimators[e].records[run];
      EXPECT_EQ(rec.truth, t.scenario.source);
      EXPECT_EQ(rec.estimate, c.estimators[e].Run(t.scenario, t.measurements).estimate);
    }
  }
}

TEST(RunSweep, RandomGeometryCalibratesGammaPerRun) {
  ExperimentConfig c = FixedConfig(5);
  c.geometry = GeometryKind::kRandomSquare;
  c.gsnr_db = 15.0;
  for (int run = 0; run < 5; ++run) {
    const TrialInput t = MakeTrial(c, 0, run);
    EXPECT_NEAR(Gsnr(t.scenario, t.noise), 15.0, 1e-9);
    EXPECT_EQ(t.scenario.num_sensors(), 8);
  }
}

TEST(RunSweep, DoublingRunsIsStatisticallyStable) {
  ExperimentConfig c = FixedConfig(100);
  c.estimators = {EstimatorSpec::Admm("huber_admm", LossSpec::Huber(1.0)), EstimatorSpec::GaussNewton("gn")};
  const SweepResult small = RunSweep(c);
  c.n_mc = 200;
  const SweepResult large = RunSweep(c);
  for (std::size_t e = 0; e < c.estimators.size(); ++e) {
    const EstimatorSummary& a = small.points[0].estimators[e];
    const EstimatorSummary& b = large.points[0].estimators[e];
    EXPECT_LT(std::abs(b.rmse * b.rmse - a.rmse * a.rmse), 3.0 * a.mse_std_error) << a.name;
  }
}

TEST(RunSweep, SweepsOverSensorsAndAlpha) {
  ExperimentConfig c = FixedConfig(3);
  c.estimators = {EstimatorSpec::Admm("huber_admm", LossSpec::Huber(1.0))};
  c.sweep = SweepParam::kSensors;
  c.sweep_values = {4, 12};
  const SweepResult r = RunSweep(c);
  ASSERT_EQ(r.points.size(), 2u);
  EXPECT_EQ(MakeTrial(c, 1, 0).scenario.num_sensors(), 12);
  c.sweep = SweepParam::kAlpha;
  c.sweep_values = {1.0, 2.0};
  EXPECT_EQ(MakeTrial(c, 0, 0).noise.alpha, 1.0);
  EXPECT_EQ(RunSweep(c).points.size(), 2u);
}

TEST(RunSweep, RejectsInvalidConfig) {
  ExperimentConfig c = FixedConfig(0);
  EXPECT_THROW(RunSweep(c), std::invalid_argument);
  c = FixedConfig(5);
  c.sweep = SweepParam::kGsnr;
  EXPECT_THROW(RunSweep(c), std::invalid_argument);
  c.sweep_values = {20.0};
  c.jobs = 0;
  EXPECT_THROW(RunSweep(c), std::invalid_argument);
}

TEST(ConvergenceTrace, HuberPlateausEarly) {
  TraceExperiment t;
  t.admm.trace = true;
  t.admm.delta = DBL_MIN;
  t.admm.max_iters = 2000;
  const TraceOutput out = ConvergenceTrace(t);
  ASSERT_EQ(out.result.trace.size(), 2001u);
  const double at50 = out.result.trace[50].objective;
  const double at2000 = out.result.trace[2000].objective;
  EXPECT_LE(std::abs(at50 - at2000), 0.01 * at2000);
  EXPECT_EQ(out.scenario.source, V(2, 3));
}

TEST(ConvergenceTrace, NoiselessReachesSource) {
  TraceExperiment t;
  t.admm.trace = true;
  t.noiseless = true;
  const TraceOutput out = ConvergenceTrace(t);
  EXPECT_LE((out.result.trace.back().x - V(2, 3)).norm(), 1e-3);
  EXPECT_EQ(out.result.trace.size(), static_cast<std::size_t>(out.result.iterations) + 1);
}

TEST(Timing, HuberFasterThanLpAndScalesLinearly) {
  ExperimentConfig c = FixedConfig(20);
  c.record_timing = true;
  c.estimators = {EstimatorSpec::Admm("lp_admm", LossSpec::Lp(1.3)),
                  EstimatorSpec::Admm("huber_admm", LossSpec::Huber(1.0))};
  const TimingReport rep = MakeTimingReport(c);
  ASSERT_EQ(rep.mean_seconds.size(), 2u);
  EXPECT_LT(rep.mean_seconds[1].second, rep.mean_seconds[0].second);
  ASSERT_TRUE(rep.scaling.has_value());
  EXPECT_EQ(rep.scaling->estimator, "huber_admm");
  EXPECT_GT(rep.scaling->seconds_small, 0.0);
  EXPECT_LE(rep.scaling->ratio, 12.0);
}

TEST(Timing, EmptyEstimatorListGivesEmptyReport) {
  ExperimentConfig c = FixedConfig(20);
  c.estimators.clear();
  const TimingReport rep = MakeTimingReport(c);
  EXPECT_TRUE(rep.mean_seconds.empty());
  EXPECT_FALSE(rep.scaling.has_value());
}

TEST(SweepOutput, CsvAndJsonShape) {
  ExperimentConfig c = FixedConfig(2);
  c.sweep = SweepParam::kGsnr;
  c.sweep_values = {17, 19, 21, 23, 25};
  const SweepResult r = RunSweep(c);
  std::ostringstream csv;
  WriteSweepCsv(csv, r);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "sweep_param,value,estimator,rmse,conv_rate,mean_iters,mean_seconds");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line.rfind("gsnr,", 0), 0u) << line;
  }
  EXPECT_EQ(rows, 5 * 4);
  std::ostringstream json;
  WriteSweepJson(json, r);
  EXPECT_NE(json.str().find("\"points\""), std::string::npos);
}

}  // namespace
}  // namespace robloc
