#include "robloc/cli.hpp"

#include <filesystem>
#include <iomanip>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "robloc/config.hpp"
#include "robloc/csv.hpp"
#include "robloc/experiments.hpp"
#include "robloc/prox_check.hpp"

namespace robloc {
namespace {

namespace fs = std::filesystem;

constexpr double kProxCheckTolerance = 1e-4;

struct Options {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool quiet = false;
};

std::string Vec(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += FormatDouble(v(i));
  }
  return s;
}

AppConfig Load(const Options& opt) {
  AppConfig cfg = LoadConfig(opt.config_path);
  if (opt.seed) cfg.seed.value = *opt.seed;
  return cfg;
}

fs::path OutDir(const Options& opt) {
  fs::path dir(opt.out_dir);
  fs::create_directories(dir);
  return dir;
}

nlohmann::json ToJson(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

int CmdSolve(const Options& opt, std::ostream& out) {
  const AppConfig cfg = Load(opt);
  const Scenario scenario = cfg.SolveScenario();
  const Measurements m = cfg.SolveMeasurements(scenario);
  const SolveResult res = SolveAdmm(scenario, m, cfg.loss, cfg.admm);
  const KktReport kkt = KktResiduals(res, scenario, m, cfg.loss);

  out << "loss " << cfg.loss.Describe() << '\n';
  out << "estimate " << Vec(res.estimate) << '\n';
  out << "iterations " << res.iterations << '\n';
  out << "converged " << (res.converged ? "true" : "false") << '\n';
  out << "primal_residual " << FormatDouble(res.primal_residual) << '\n';
  out << "kkt dual_x_residual " << FormatDouble(kkt.dual_x_residual) << '\n';
  out << "kkt d_stationarity " << FormatDouble(kkt.d_stationarity) << '\n';
  out << "kkt beta_stationarity " << FormatDouble(kkt.beta_stationarity) << '\n';
  out << "kkt primal_feasibility " << FormatDouble(kkt.primal_feasibility) << '\n';
  out << "kkt beta_norm_violation " << FormatDouble(kkt.beta_norm_violation) << '\n';
  if (!opt.quiet) {
    for (const auto& w : res.warnings) out << "warning " << w << '\n';
  }

  nlohmann::json doc;
  doc["loss"] = cfg.loss.Describe();
  doc["estimate"] = ToJson(res.estimate);
  doc["truth"] = ToJson(scenario.source);
  doc["iterations"] = res.iterations;
  doc["converged"] = res.converged;
  doc["primal_residual"] = res.primal_residual;
  doc["kkt"] = {{"dual_x_residual", kkt.dual_x_residual},
                {"d_stationarity", kkt.d_stationarity},
                {"beta_stationarity", kkt.beta_stationarity},
                {"primal_feasibility", kkt.primal_feasibility},
                {"beta_norm_violation", kkt.beta_norm_violation}};
  doc["baselines"] = nlohmann::json::array();
  for (const auto& est : cfg.estimators) {
    const SolveResult r = est.Run(scenario, m);
    out << "estimator " << est.name << " estimate " << Vec(r.estimate) << " converged "
        << (r.converged ? "true" : "false") << '\n';
    doc["baselines"].push_back({{"name", est.name}, {"estimate", ToJson(r.estimate)}, {"converged", r.converged},
                                {"iterations", r.iterations}});
  }

  const fs::path dir = OutDir(opt);
  WriteFileAtomically(dir / "solve.json", [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  if (cfg.admm.trace) {
    WriteFileAtomically(dir / "trace.csv", [&](std::ostream& os) { WriteTraceCsv(os, res.trace); });
  }
  return 0;
}

int CmdSweep(const Options& opt, std::ostream& out) {
  const AppConfig cfg = Load(opt);
  if (cfg.estimators.empty()) {
    throw ConfigError({"estimators: sweep needs at least one estimator"});
  }
  ExperimentConfig exp = cfg.ToExperiment();
  exp.jobs = opt.jobs;
  const SweepResult result = RunSweep(exp);
  const fs::path dir = OutDir(opt);
  WriteFileAtomically(dir / "sweep.csv", [&](std::ostream& os) { WriteSweepCsv(os, result); });
  WriteFileAtomically(dir / "sweep.json", [&](std::ostream& os) { WriteSweepJson(os, result); });
  if (!opt.quiet) {
    out << std::left << std::setw(10) << SweepParamName(result.param) << std::setw(20) << "estimator"
        << std::setw(12) << "rmse" << std::setw(10) << "conv" << "iters\n";
    for (const auto& p : result.points) {
      for (const auto& e : p.estimators) {
        out << std::left << std::setw(10) << p.value << std::setw(20) << e.name << std::setw(12) << e.rmse
            << std::setw(10) << e.conv_rate << e.mean_iters << '\n';
      }
    }
  }
  out << "wrote " << (dir / "sweep.csv").string() << '\n';
  return 0;
}

int CmdTrace(const Options& opt, std::ostream& out) {
  const AppConfig cfg = Load(opt);
  const TraceOutput t = ConvergenceTrace(cfg.ToTrace());
  const fs::path dir = OutDir(opt);
  WriteFileAtomically(dir / "trace.csv", [&](std::ostream& os) { WriteTraceCsv(os, t.result.trace); });
  out << "iterations " << t.result.iterations << '\n';
  out << "converged " << (t.result.converged ? "true" : "false") << '\n';
  out << "estimate " << Vec(t.result.estimate) << '\n';
  out << "wrote " << (dir / "trace.csv").string() << '\n';
  return 0;
}

int CmdProxCheck(const Options& opt, std::ostream& out) {
  RngSeed seed{1};
  if (!opt.config_path.empty()) seed = Load(opt).seed;
  if (opt.seed) seed.value = *opt.seed;
  const auto rows = RunProxCheck(1000, seed);
  bool ok = true;
  for (const auto& row : rows) {
    out << LossKindName(row.kind) << " instances " << row.instances << " max_deviation "
        << FormatDouble(row.max_deviation) << '\n';
    ok = ok && row.max_deviation <= kProxCheckTolerance;
  }
  out << (ok ? "prox-check passed" : "prox-check FAILED") << '\n';
  return ok ? 0 : 1;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust TOA source localization by ADMM"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--config", opt.config_path, "JSON experiment configuration");
  app.add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", opt.seed, "Override the configured seed");
  app.add_option("--jobs", opt.jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", opt.quiet, "Only print essential results");

  auto* solve = app.add_subcommand("solve", "Single ADMM estimate with KKT diagnostics");
  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo RMSE sweep");
  auto* trace = app.add_subcommand("trace", "Convergence trace on the fixed perimeter scenario");
  auto* prox = app.add_subcommand("prox-check", "Check proximal maps against a brute-force oracle");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << '\n';
    return 2;
  }

  try {
    if (!prox->parsed() && opt.config_path.empty()) {
      throw ConfigError({"--config: is required"});
    }
    if (solve->parsed()) return CmdSolve(opt, out);
    if (sweep->parsed()) return CmdSweep(opt, out);
    if (trace->parsed()) return CmdTrace(opt, out);
    return CmdProxCheck(opt, out);
  } catch (const ConfigError& e) {
    err << "error: config: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: runtime: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace robloc
