#include "robloc/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace robloc {
namespace {

using nlohmann::json;

std::string JoinProblems(const std::vector<std::string>& problems) {
  std::string out = "invalid config";
  for (const auto& p : problems) out += "; " + p;
  return out;
}

// Collects problems instead of stopping at the first one.
class Reader {
 public:
  std::vector<std::string> problems;

  void Fail(const std::string& path, const std::string& what) { problems.push_back(path + ": " + what); }

  void CheckKeys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items()) {
      if (!ok.count(key)) Fail(path.empty() ? key : path + "." + key, "unknown field");
    }
  }

  bool Object(const json& parent, const char* key, const std::string& path) {
    if (!parent.contains(key)) return false;
    if (!parent.at(key).is_object()) {
      Fail(path, "must be an object");
      return false;
    }
    return true;
  }

  std::optional<double> Number(const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_number()) {
      Fail(path, "must be a number");
      return std::nullopt;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      Fail(path, "must be finite");
      return std::nullopt;
    }
    return d;
  }

  std::optional<long long> Integer(const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
      Fail(path, "must be an integer");
      return std::nullopt;
    }
    return v.get<long long>();
  }

  std::optional<bool> Bool(const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    if (!obj.at(key).is_boolean()) {
      Fail(path, "must be true or false");
      return std::nullopt;
    }
    return obj.at(key).get<bool>();
  }

  std::optional<std::string> String(const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    if (!obj.at(key).is_string()) {
      Fail(path, "must be a string");
      return std::nullopt;
    }
    return obj.at(key).get<std::string>();
  }

  std::optional<Eigen::VectorXd> Vector(const json& v, const std::string& path) {
    if (!v.is_array()) {
      Fail(path, "must be an array of numbers");
      return std::nullopt;
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        Fail(path + "[" + std::to_string(i) + "]", "must be a finite number");
        return std::nullopt;
      }
      out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    }
    return out;
  }
};

void ReadAdmm(Reader& rd, const json& obj, const std::string& path, AdmmConfig& cfg) {
  rd.CheckKeys(obj, path, {"rho", "delta", "max_iters", "trace"});
  if (auto v = rd.Number(obj, "rho", path + ".rho")) {
    if (*v <= 0.0) rd.Fail(path + ".rho", "must be > 0");
    cfg.rho = *v;
  }
  if (auto v = rd.Number(obj, "delta", path + ".delta")) {
    if (*v <= 0.0) rd.Fail(path + ".delta", "must be > 0");
    cfg.delta = *v;
  }
  if (auto v = rd.Integer(obj, "max_iters", path + ".max_iters")) {
    if (*v < 1 || *v > 100000000) rd.Fail(path + ".max_iters", "must be in [1, 1e8]");
    cfg.max_iters = static_cast<int>(*v);
  }
  if (auto v = rd.Bool(obj, "trace", path + ".trace")) cfg.trace = *v;
}

std::optional<LossSpec> ReadLoss(Reader& rd, const json& obj, const std::string& path) {
  rd.CheckKeys(obj, path, {"kind", "p", "radius"});
  const auto kind = rd.String(obj, "kind", path + ".kind");
  if (!kind) {
    if (!obj.contains("kind")) rd.Fail(path + ".kind", "is required");
    return std::nullopt;
  }
  if (*kind == "l1") return LossSpec::L1();
  if (*kind == "l2") return LossSpec::L2();
  if (*kind == "lp") {
    const auto p = rd.Number(obj, "p", path + ".p");
    if (!p) {
      if (!obj.contains("p")) rd.Fail(path + ".p", "is required for lp");
      return std::nullopt;
    }
    if (!(*p >= 1.0 && *p <= 2.0)) {
      rd.Fail(path + ".p", "must lie in [1, 2]");
      return std::nullopt;
    }
    return LossSpec::Lp(*p);
  }
  if (*kind == "huber") {
    const auto r = rd.Number(obj, "radius", path + ".radius");
    if (!r) {
      if (!obj.contains("radius")) rd.Fail(path + ".radius", "is required for huber");
      return std::nullopt;
    }
    if (*r <= 0.0) {
      rd.Fail(path + ".radius", "must be > 0");
      return std::nullopt;
    }
    return LossSpec::Huber(*r);
  }
  if (*kind == "welsch") {
    rd.Fail(path + ".kind", "welsch has no proximal rule and cannot be solved");
    return std::nullopt;
  }
  rd.Fail(path + ".kind", "must be one of l1, lp, l2, huber");
  return std::nullopt;
}

void ReadScenario(Reader& rd, const json& obj, AppConfig& cfg) {
  rd.CheckKeys(obj, "scenario", {"dimension", "source", "sensors"});
  const auto dim = rd.Integer(obj, "dimension", "scenario.dimension");
  if (dim && *dim < 1) rd.Fail("scenario.dimension", "must be >= 1");
  if (!obj.contains("source")) rd.Fail("scenario.source", "is required");
  if (!obj.contains("sensors")) rd.Fail("scenario.sensors", "is required");
  if (!obj.contains("source") || !obj.contains("sensors")) return;

  const auto source = rd.Vector(obj.at("source"), "scenario.source");
  const json& sensors = obj.at("sensors");
  if (!sensors.is_array() || sensors.empty()) {
    rd.Fail("scenario.sensors", "must be a non-empty array of positions");
    return;
  }
  if (!source) return;
  const Eigen::Index h = source->size();
  if (dim && *dim != h) rd.Fail("scenario.dimension", "does not match the length of scenario.source");
  Eigen::MatrixXd cols(h, static_cast<Eigen::Index>(sensors.size()));
  bool ok = true;
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const std::string p = "scenario.sensors[" + std::to_string(i) + "]";
    auto v = rd.Vector(sensors[i], p);
    if (!v) {
      ok = false;
      continue;
    }
    if (v->size() != h) {
      rd.Fail(p, "dimension does not match scenario.source");
      ok = false;
      continue;
    }
    cols.col(static_cast<Eigen::Index>(i)) = *v;
  }
  if (!ok) return;
  try {
    cfg.scenario = Scenario(*source, cols);
  } catch (const ModelError& e) {
    rd.Fail("scenario", e.what());
  }
}

void ReadNoise(Reader& rd, const json& obj, NoiseConfig& noise) {
  rd.CheckKeys(obj, "noise", {"alpha", "zeta", "gamma", "mu", "gsnr_db", "noiseless"});
  if (auto v = rd.Number(obj, "alpha", "noise.alpha")) {
    if (!(*v > 0.0 && *v <= 2.0)) rd.Fail("noise.alpha", "must lie in (0, 2]");
    noise.stable.alpha = *v;
  }
  if (auto v = rd.Number(obj, "zeta", "noise.zeta")) {
    if (!(*v >= -1.0 && *v <= 1.0)) rd.Fail("noise.zeta", "must lie in [-1, 1]");
    noise.stable.zeta = *v;
  }
  if (auto v = rd.Number(obj, "gamma", "noise.gamma")) {
    if (*v <= 0.0) rd.Fail("noise.gamma", "must be > 0");
    noise.stable.gamma = *v;
    noise.gamma_given = true;
  }
  if (auto v = rd.Number(obj, "mu", "noise.mu")) noise.stable.mu = *v;
  if (auto v = rd.Number(obj, "gsnr_db", "noise.gsnr_db")) noise.gsnr_db = *v;
  if (auto v = rd.Bool(obj, "noiseless", "noise.noiseless")) noise.noiseless = *v;
}

void ReadEstimators(Reader& rd, const json& arr, AppConfig& cfg) {
  if (!arr.is_array()) {
    rd.Fail("estimators", "must be an array");
    return;
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = "estimators[" + std::to_string(i) + "]";
    const json& e = arr[i];
    if (!e.is_object()) {
      rd.Fail(path, "must be an object");
      continue;
    }
    rd.CheckKeys(e, path, {"name", "type", "loss", "admm", "p", "tol", "max_iters", "irls_epsilon"});
    const auto name = rd.String(e, "name", path + ".name");
    if (!name && !e.contains("name")) rd.Fail(path + ".name", "is required");
    if (name && (name->empty() || name->find_first_of(",\n\"") != std::string::npos)) {
      rd.Fail(path + ".name", "must be non-empty without commas, quotes or newlines");
    }
    if (name && !names.insert(*name).second) rd.Fail(path + ".name", "duplicates an earlier estimator");
    const auto type = rd.String(e, "type", path + ".type");
    if (!type) {
      if (!e.contains("type")) rd.Fail(path + ".type", "is required");
      continue;
    }
    if (*type == "admm") {
      AdmmConfig admm = cfg.admm;
      if (rd.Object(e, "admm", path + ".admm")) ReadAdmm(rd, e.at("admm"), path + ".admm", admm);
      std::optional<LossSpec> loss;
      if (rd.Object(e, "loss", path + ".loss")) {
        loss = ReadLoss(rd, e.at("loss"), path + ".loss");
      } else if (!e.contains("loss")) {
        rd.Fail(path + ".loss", "is required for admm");
      }
      if (loss && name) cfg.estimators.push_back(EstimatorSpec::Admm(*name, *loss, admm));
    } else if (*type == "gn_l2" || *type == "irls_lp") {
      BaselineConfig bc;
      if (auto v = rd.Number(e, "tol", path + ".tol")) {
        if (*v <= 0.0) rd.Fail(path + ".tol", "must be > 0");
        bc.tol = *v;
      }
      if (auto v = rd.Integer(e, "max_iters", path + ".max_iters")) {
        if (*v < 1 || *v > 100000000) rd.Fail(path + ".max_iters", "must be in [1, 1e8]");
        bc.max_iters = static_cast<int>(*v);
      }
      if (auto v = rd.Number(e, "irls_epsilon", path + ".irls_epsilon")) {
        if (*v <= 0.0) rd.Fail(path + ".irls_epsilon", "must be > 0");
        bc.irls_epsilon = *v;
      }
      if (*type == "gn_l2") {
        if (name) cfg.estimators.push_back(EstimatorSpec::GaussNewton(*name, bc));
      } else {
        const auto p = rd.Number(e, "p", path + ".p");
        if (!p) {
          if (!e.contains("p")) rd.Fail(path + ".p", "is required for irls_lp");
        } else if (!(*p >= 1.0 && *p <= 2.0)) {
          rd.Fail(path + ".p", "must lie in [1, 2]");
        } else if (name) {
          cfg.estimators.push_back(EstimatorSpec::Irls(*name, *p, bc));
        }
      }
    } else {
      rd.Fail(path + ".type", "must be one of admm, gn_l2, irls_lp");
    }
  }
}

void ReadSweep(Reader& rd, const json& obj, AppConfig& cfg) {
  rd.CheckKeys(obj, "sweep", {"param", "values"});
  const auto param = rd.String(obj, "param", "sweep.param");
  if (!param) {
    if (!obj.contains("param")) rd.Fail("sweep.param", "is required");
  } else if (*param == "gsnr") {
    cfg.sweep = SweepParam::kGsnr;
  } else if (*param == "sensors") {
    cfg.sweep = SweepParam::kSensors;
  } else if (*param == "alpha") {
    cfg.sweep = SweepParam::kAlpha;
  } else {
    rd.Fail("sweep.param", "must be one of gsnr, sensors, alpha");
  }
  if (!obj.contains("values")) {
    rd.Fail("sweep.values", "is required");
    return;
  }
  const auto values = rd.Vector(obj.at("values"), "sweep.values");
  if (!values) return;
  if (values->size() == 0) rd.Fail("sweep.values", "must not be empty");
  for (Eigen::Index i = 0; i < values->size(); ++i) {
    const double v = (*values)(i);
    const std::string p = "sweep.values[" + std::to_string(i) + "]";
    if (cfg.sweep == SweepParam::kSensors && (v < 1.0 || v != std::floor(v))) rd.Fail(p, "sensor count must be a positive integer");
    if (cfg.sweep == SweepParam::kAlpha && !(v > 0.0 && v <= 2.0)) rd.Fail(p, "alpha must lie in (0, 2]");
    cfg.sweep_values.push_back(v);
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(JoinProblems(problems)), problems_(std::move(problems)) {}

AppConfig ParseConfig(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("json: ") + e.what()});
  }
  if (!doc.is_object()) throw ConfigError({"json: top level must be an object"});

  Reader rd;
  AppConfig cfg;
  rd.CheckKeys(doc, "", {"seed", "scenario", "measurements", "geometry", "noise", "loss", "admm", "estimators",
                         "n_mc", "sweep", "sensors", "record_timing"});

  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) {
      rd.Fail("seed", "must be a non-negative integer");
    } else {
      cfg.seed.value = doc.at("seed").get<std::uint64_t>();
    }
  }
  if (rd.Object(doc, "admm", "admm")) ReadAdmm(rd, doc.at("admm"), "admm", cfg.admm);
  if (rd.Object(doc, "scenario", "scenario")) ReadScenario(rd, doc.at("scenario"), cfg);
  if (rd.Object(doc, "noise", "noise")) ReadNoise(rd, doc.at("noise"), cfg.noise);
  if (rd.Object(doc, "loss", "loss")) {
    if (auto loss = ReadLoss(rd, doc.at("loss"), "loss")) cfg.loss = *loss;
  }
  if (rd.Object(doc, "geometry", "geometry")) {
    const json& g = doc.at("geometry");
    rd.CheckKeys(g, "geometry", {"kind", "side"});
    if (auto kind = rd.String(g, "kind", "geometry.kind")) {
      if (*kind == "fixed_perimeter") {
        cfg.geometry = GeometryKind::kFixedPerimeter;
      } else if (*kind == "random_square") {
        cfg.geometry = GeometryKind::kRandomSquare;
      } else {
        rd.Fail("geometry.kind", "must be fixed_perimeter or random_square");
      }
    }
    if (auto side = rd.Number(g, "side", "geometry.side")) {
      if (*side <= 0.0) rd.Fail("geometry.side", "must be > 0");
      cfg.side = *side;
    }
  }
  if (doc.contains("measurements")) {
    const json& m = doc.at("measurements");
    if (!m.is_object()) {
      rd.Fail("measurements", "must be an object");
    } else {
      rd.CheckKeys(m, "measurements", {"ranges", "sigma"});
      if (!cfg.scenario) rd.Fail("measurements", "requires an explicit scenario");
      if (!m.contains("ranges")) rd.Fail("measurements.ranges", "is required");
      std::optional<Eigen::VectorXd> ranges;
      if (m.contains("ranges")) ranges = rd.Vector(m.at("ranges"), "measurements.ranges");
      if (ranges) {
        Measurements meas = MakeMeasurements(*ranges);
        if (cfg.scenario && ranges->size() != cfg.scenario->num_sensors()) {
          rd.Fail("measurements.ranges", "length must equal the number of sensors");
        }
        if (m.contains("sigma")) {
          if (auto sigma = rd.Vector(m.at("sigma"), "measurements.sigma")) {
            if (sigma->size() != ranges->size()) rd.Fail("measurements.sigma", "length must equal ranges");
            else if ((sigma->array() <= 0.0).any()) rd.Fail("measurements.sigma", "entries must be > 0");
            else meas.sigma = *sigma;
          }
        }
        cfg.measurements = meas;
      }
    }
  }
  if (doc.contains("estimators")) ReadEstimators(rd, doc.at("estimators"), cfg);
  if (auto v = rd.Integer(doc, "n_mc", "n_mc")) {
    if (*v < 1 || *v > 100000000) rd.Fail("n_mc", "must be in [1, 1e8]");
    cfg.n_mc = static_cast<int>(*v);
  }
  if (auto v = rd.Integer(doc, "sensors", "sensors")) {
    if (*v < 1 || *v > 1000000) rd.Fail("sensors", "must be in [1, 1e6]");
    cfg.sensors = static_cast<int>(*v);
  }
  if (rd.Object(doc, "sweep", "sweep")) ReadSweep(rd, doc.at("sweep"), cfg);
  if (auto v = rd.Bool(doc, "record_timing", "record_timing")) cfg.record_timing = *v;

  if (!rd.problems.empty()) throw ConfigError(std::move(rd.problems));
  return cfg;
}

AppConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"config: cannot read " + path.string()});
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseConfig(buf.str());
}

ExperimentConfig AppConfig::ToExperiment() const {
  ExperimentConfig c;
  c.geometry = geometry;
  c.side = side;
  c.n_mc = n_mc;
  c.estimators = estimators;
  c.sweep = sweep;
  c.sweep_values = sweep_values;
  c.alpha = noise.stable.alpha;
  c.zeta = noise.stable.zeta;
  c.gsnr_db = noise.gsnr_db;
  c.sensors = sensors;
  c.noiseless = noise.noiseless;
  c.seed = seed;
  c.record_timing = record_timing;
  return c;
}

TraceExperiment AppConfig::ToTrace() const {
  TraceExperiment t;
  t.loss = loss;
  t.admm = admm;
  t.alpha = noise.stable.alpha;
  t.gsnr_db = noise.gsnr_db;
  t.noiseless = noise.noiseless;
  t.seed = seed;
  return t;
}

Scenario AppConfig::SolveScenario() const {
  if (scenario) return *scenario;
  if (geometry == GeometryKind::kFixedPerimeter) return FixedPerimeterScenario(sensors, side);
  Rng rng = Rng::Stream(seed, 0, 0);
  return RandomSquareScenario(sensors, side, rng);
}

Measurements AppConfig::SolveMeasurements(const Scenario& s) const {
  if (measurements) return *measurements;
  if (noise.noiseless) return MakeMeasurements(TrueRanges(s));
  StableParams p = noise.stable;
  if (!noise.gamma_given) p.gamma = GammaForGsnr(s, p.alpha, noise.gsnr_db);
  // Same stream position as the first run of a sweep on this geometry.
  Rng rng = Rng::Stream(seed, 0, 0);
  if (!scenario && geometry == GeometryKind::kRandomSquare) {
    RandomSquareScenario(sensors, side, rng);
  }
  return Measure(s, p, rng);
}

}  // namespace robloc
