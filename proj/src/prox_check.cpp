#include "robloc/prox_check.hpp"

#include <cmath>

#include "robloc/scalar_min.hpp"

namespace robloc {

std::vector<ProxCheckRow> RunProxCheck(int instances_per_kind, RngSeed seed) {
  Rng rng(seed);
  std::vector<ProxCheckRow> rows;
  for (LossKind kind : {LossKind::kL1, LossKind::kLp, LossKind::kL2, LossKind::kHuber}) {
    ProxCheckRow row;
    row.kind = kind;
    row.instances = instances_per_kind;
    for (int n = 0; n < instances_per_kind; ++n) {
      LossSpec loss;
      switch (kind) {
        case LossKind::kLp: loss = LossSpec::Lp(rng.Uniform(1.0, 2.0)); break;
        case LossKind::kHuber: loss = LossSpec::Huber(rng.Uniform(0.1, 5.0)); break;
        case LossKind::kL1: loss = LossSpec::L1(); break;
        default: loss = LossSpec::L2(); break;
      }
      const double b = rng.Uniform(-20.0, 20.0);
      const double tau = rng.Uniform(0.01, 10.0);
      const double reach = std::abs(b) + 1.0;
      const ScalarMinimum ref = GridGoldenMinimize(
          [&](double a) { return Eval(loss, a) + (a - b) * (a - b) / (2.0 * tau); }, -reach, reach);
      const double dev = std::abs(Prox(loss, {tau}, b) - ref.argmin);
      if (dev >= row.max_deviation) {
        row.max_deviation = dev;
        row.worst_loss = loss;
        row.worst_tau = tau;
        row.worst_b = b;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace robloc
