#pragma once

#include <vector>

#include "robloc/loss.hpp"
#include "robloc/rng.hpp"

namespace robloc {

struct ProxCheckRow {
  LossKind kind = LossKind::kL1;
  int instances = 0;
  double max_deviation = 0.0;
  // Instance that produced max_deviation.
  LossSpec worst_loss;
  double worst_tau = 0.0;
  double worst_b = 0.0;
};

// Compares Prox against a brute-force grid + golden-section minimisation of
// f(a) + (a - b)^2 / (2 tau) on random instances: b in [-20, 20],
// tau in [0.01, 10], p in (1, 2), R in (0.1, 5).
std::vector<ProxCheckRow> RunProxCheck(int instances_per_kind, RngSeed seed);

}  // namespace robloc
