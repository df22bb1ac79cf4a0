#include "robloc/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace robloc {

Scenario::Scenario(Eigen::VectorXd src, Eigen::MatrixXd sensor_cols)
    : source(std::move(src)), sensors(std::move(sensor_cols)) {
  if (source.size() < 1) {
    throw ModelError("scenario: dimension must be positive");
  }
  if (sensors.rows() != source.size()) {
    throw ModelError("scenario: sensor dimension does not match source dimension");
  }
  if (sensors.cols() < 1) {
    throw ModelError("scenario: at least one sensor is required");
  }
  if (!source.allFinite() || !sensors.allFinite()) {
    throw ModelError("scenario: positions must be finite");
  }
  for (Eigen::Index i = 0; i < sensors.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < sensors.cols(); ++j) {
      if ((sensors.col(i) - sensors.col(j)).norm() == 0.0) {
        std::ostringstream msg;
        msg << "scenario: sensors " << i << " and " << j << " coincide";
        throw ModelError(msg.str());
      }
    }
  }
}

std::vector<std::string> Scenario::Warnings() const {
  std::vector<std::string> out;
  if (num_sensors() < dimension() + 1) {
    out.push_back("fewer than dimension + 1 sensors; the fix is not identifiable");
  }
  for (int i = 0; i < num_sensors(); ++i) {
    if ((source - sensors.col(i)).norm() == 0.0) {
      out.push_back("source coincides with sensor " + std::to_string(i));
    }
  }
  return out;
}

bool Measurements::HasNegativeRanges() const { return (ranges.array() < 0.0).any(); }

Measurements MakeMeasurements(Eigen::VectorXd ranges) {
  Measurements m;
  m.sigma = Eigen::VectorXd::Ones(ranges.size());
  m.noise = Eigen::VectorXd::Zero(ranges.size());
  m.ranges = std::move(ranges);
  return m;
}

void StableParams::Validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw ModelError("stable: alpha must lie in (0, 2]");
  }
  if (!(zeta >= -1.0 && zeta <= 1.0)) {
    throw ModelError("stable: zeta must lie in [-1, 1]");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ModelError("stable: gamma must be positive");
  }
  if (!std::isfinite(mu)) {
    throw ModelError("stable: mu must be finite");
  }
}

Eigen::VectorXd TrueRanges(const Scenario& scenario) {
  return (scenario.sensors.colwise() - scenario.source).colwise().norm().transpose();
}

double SampleStableOne(const StableParams& p, Rng& rng) {
  using std::numbers::pi;
  const double v = pi * (rng.Uniform01() - 0.5);
  const double w = rng.Exponential();

  if (p.alpha == 1.0) {
    const double half_pi = pi / 2.0;
    const double shifted = half_pi + p.zeta * v;
    const double x = (shifted * std::tan(v) -
                      p.zeta * std::log((half_pi * w * std::cos(v)) / shifted)) /
                     half_pi;
    return p.gamma * x + (2.0 / pi) * p.zeta * p.gamma * std::log(p.gamma) + p.mu;
  }

  const double tan_term = p.zeta * std::tan(pi * p.alpha / 2.0);
  const double b = std::atan(tan_term) / p.alpha;
  const double s = std::pow(1.0 + tan_term * tan_term, 1.0 / (2.0 * p.alpha));
  const double arg = p.alpha * (v + b);
  const double x = s * std::sin(arg) / std::pow(std::cos(v), 1.0 / p.alpha) *
                   std::pow(std::cos(v - arg) / w, (1.0 - p.alpha) / p.alpha);
  return p.gamma * x + p.mu;
}

Eigen::VectorXd SampleStable(const StableParams& params, std::size_t n, Rng& rng) {
  params.Validate();
  if (n < 1) {
    throw ModelError("stable: sample count must be at least 1");
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  for (auto& value : out) {
    value = SampleStableOne(params, rng);
  }
  return out;
}

Eigen::VectorXd SampleStable(const StableParams& params, std::size_t n, RngSeed seed) {
  Rng rng(seed);
  return SampleStable(params, n, rng);
}

Measurements Measure(const Scenario& scenario, const StableParams& params, Rng& rng) {
  Measurements m;
  m.noise = SampleStable(params, static_cast<std::size_t>(scenario.num_sensors()), rng);
  m.ranges = TrueRanges(scenario) + m.noise;
  m.sigma = Eigen::VectorXd::Ones(scenario.num_sensors());
  return m;
}

Measurements Measure(const Scenario& scenario, const StableParams& params, RngSeed seed) {
  Rng rng(seed);
  return Measure(scenario, params, rng);
}

double Gsnr(const Scenario& scenario, const StableParams& params) {
  if (!(params.gamma > 0.0)) {
    throw ModelError("gsnr: gamma must be positive");
  }
  const double signal = TrueRanges(scenario).squaredNorm();
  return 10.0 * std::log10(signal / (scenario.num_sensors() * std::pow(params.gamma, params.alpha)));
}

double GammaForGsnr(const Scenario& scenario, double alpha, double target_db) {
  if (!std::isfinite(target_db)) {
    throw ModelError("gsnr: target must be finite");
  }
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw ModelError("gsnr: alpha must lie in (0, 2]");
  }
  const double signal = TrueRanges(scenario).squaredNorm();
  if (!(signal > 0.0)) {
    throw ModelError("gsnr: source coincides with every sensor");
  }
  const double ratio = std::pow(10.0, target_db / 10.0);
  return std::pow(signal / (scenario.num_sensors() * ratio), 1.0 / alpha);
}

Eigen::MatrixXd PerimeterSensors(int num_sensors, double side) {
  if (num_sensors < 1) {
    throw ModelError("perimeter: need at least one sensor");
  }
  const double half = side / 2.0;
  const double spacing = 4.0 * side / num_sensors;
  Eigen::MatrixXd out(2, num_sensors);
  for (int i = 0; i < num_sensors; ++i) {
    const double s = i * spacing;
    const int edge = std::min(3, static_cast<int>(s / side));
    const double t = s - edge * side;
    switch (edge) {
      case 0: out.col(i) << -half + t, -half; break;
      case 1: out.col(i) << half, -half + t; break;
      case 2: out.col(i) << half - t, half; break;
      default: out.col(i) << -half, half - t; break;
    }
  }
  return out;
}

Scenario FixedPerimeterScenario(int num_sensors, double side) {
  Eigen::VectorXd source(2);
  source << 2.0, 3.0;
  return Scenario(source, PerimeterSensors(num_sensors, side));
}

Scenario RandomSquareScenario(int num_sensors, double side, Rng& rng) {
  const double half = side / 2.0;
  Eigen::VectorXd source(2);
  source << rng.Uniform(-half, half), rng.Uniform(-half, half);
  Eigen::MatrixXd sensors(2, num_sensors);
  for (int i = 0; i < num_sensors; ++i) {
    sensors(0, i) = rng.Uniform(-half, half);
    sensors(1, i) = rng.Uniform(-half, half);
  }
  return Scenario(source, sensors);
}

}  // namespace robloc
