#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace robloc {

enum class LossKind { kL1, kLp, kL2, kHuber, kWelsch };

std::string_view LossKindName(LossKind kind);
LossKind ParseLossKind(std::string_view name);

// Even, nonnegative loss with f(0) = 0, strictly increasing on [0, inf).
// Welsch is available for evaluation only; it has no proximal rule here.
struct LossSpec {
  LossKind kind = LossKind::kL2;
  double p = 2.0;       // kLp only
  double radius = 1.0;  // kHuber only; Welsch bandwidth for kWelsch

  static LossSpec L1();
  static LossSpec L2();
  // p == 1 and p == 2 collapse to the closed-form kinds.
  static LossSpec Lp(double p);
  static LossSpec Huber(double radius);
  static LossSpec Welsch(double sigma);

  void Validate() const;
  bool HasProx() const { return kind != LossKind::kWelsch; }
  std::string Describe() const;
};

bool operator==(const LossSpec& a, const LossSpec& b);

class LossError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class RootFindingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProxParams {
  double tau = 1.0;
};

double Eval(const LossSpec& loss, double z);

// Derivative f'(z). At the kink of l1 this returns 0; callers needing the
// full subdifferential use `SubgradientNearest`.
double Derivative(const LossSpec& loss, double z);

// Element of the subdifferential of f at z closest to `target`.
double SubgradientNearest(const LossSpec& loss, double z, double target);

// argmin_a f(a) + (a - b)^2 / (2 tau).
double Prox(const LossSpec& loss, ProxParams params, double b);

// Root of (a - b)/tau + p |a|^(p-1) sign(a) = 0 on [0, b] (or [b, 0]), found
// by bisection. Throws RootFindingError if the bracket does not collapse
// within the iteration cap.
double LpRoot(double p, double tau, double b);

inline constexpr int kLpRootMaxIterations = 200;

}  // namespace robloc
