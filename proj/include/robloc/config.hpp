#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "robloc/admm.hpp"
#include "robloc/experiments.hpp"
#include "robloc/loss.hpp"
#include "robloc/model.hpp"

namespace robloc {

// Every violated field, one entry each ("admm.rho: must be > 0").
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct NoiseConfig {
  StableParams stable;
  bool gamma_given = false;  // otherwise derived from gsnr_db
  double gsnr_db = 20.0;
  bool noiseless = false;
};

struct AppConfig {
  RngSeed seed{1};
  std::optional<Scenario> scenario;
  std::optional<Measurements> measurements;
  GeometryKind geometry = GeometryKind::kFixedPerimeter;
  double side = 20.0;
  NoiseConfig noise;
  LossSpec loss = LossSpec::Huber(1.0);
  AdmmConfig admm;
  std::vector<EstimatorSpec> estimators;
  int n_mc = 200;
  SweepParam sweep = SweepParam::kNone;
  std::vector<double> sweep_values;
  int sensors = 8;
  bool record_timing = false;  // wall times make sweep CSVs non-reproducible

  ExperimentConfig ToExperiment() const;
  TraceExperiment ToTrace() const;
  // Geometry for a single solve: the explicit scenario if given, otherwise
  // the configured geometry (random geometry drawn from the seed).
  Scenario SolveScenario() const;
  Measurements SolveMeasurements(const Scenario& scenario) const;
};

AppConfig ParseConfig(const std::string& json_text);
AppConfig LoadConfig(const std::filesystem::path& path);

}  // namespace robloc
