#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "robloc/rng.hpp"

namespace robloc {

// Source/sensor geometry. Sensors are stored column-wise (dimension x L).
struct Scenario {
  Eigen::VectorXd source;
  Eigen::MatrixXd sensors;

  Scenario() = default;
  Scenario(Eigen::VectorXd src, Eigen::MatrixXd sensor_cols);

  int dimension() const { return static_cast<int>(source.size()); }
  int num_sensors() const { return static_cast<int>(sensors.cols()); }

  // Human-readable problems that do not prevent a solve (L < H + 1, source
  // on top of a sensor). Hard errors throw from the constructor.
  std::vector<std::string> Warnings() const;
};

struct Measurements {
  Eigen::VectorXd ranges;
  // Per-sensor standard deviations; only the l2 baseline uses them.
  Eigen::VectorXd sigma;
  // Additive noise that produced `ranges`, kept for diagnostics.
  Eigen::VectorXd noise;

  int size() const { return static_cast<int>(ranges.size()); }
  bool HasNegativeRanges() const;
};

Measurements MakeMeasurements(Eigen::VectorXd ranges);

// Alpha-stable law S(alpha, zeta, gamma, mu) in the 1-type parameterization.
struct StableParams {
  double alpha = 2.0;
  double zeta = 0.0;
  double gamma = 1.0;
  double mu = 0.0;

  void Validate() const;
};

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Eigen::VectorXd TrueRanges(const Scenario& scenario);

// Chambers-Mallows-Stuck draws.
Eigen::VectorXd SampleStable(const StableParams& params, std::size_t n, RngSeed seed);
Eigen::VectorXd SampleStable(const StableParams& params, std::size_t n, Rng& rng);
double SampleStableOne(const StableParams& params, Rng& rng);

Measurements Measure(const Scenario& scenario, const StableParams& params, RngSeed seed);
Measurements Measure(const Scenario& scenario, const StableParams& params, Rng& rng);

// 10 log10( sum ||x - x_i||^2 / (L gamma^alpha) ).
double Gsnr(const Scenario& scenario, const StableParams& params);
double GammaForGsnr(const Scenario& scenario, double alpha, double target_db);

// L sensors evenly spaced along the perimeter of an origin-centred square,
// starting at the lower-left corner and walking counter-clockwise.
Eigen::MatrixXd PerimeterSensors(int num_sensors, double side);

// Perimeter sensors on the origin-centred square (20 m by default) with the
// source at (2, 3).
Scenario FixedPerimeterScenario(int num_sensors = 8, double side = 20.0);

// Source and sensors uniform in the origin-centred square.
Scenario RandomSquareScenario(int num_sensors, double side, Rng& rng);

}  // namespace robloc
