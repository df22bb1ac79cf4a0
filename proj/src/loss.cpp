#include "robloc/loss.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace robloc {

std::string_view LossKindName(LossKind kind) {
  switch (kind) {
    case LossKind::kL1: return "l1";
    case LossKind::kLp: return "lp";
    case LossKind::kL2: return "l2";
    case LossKind::kHuber: return "huber";
    case LossKind::kWelsch: return "welsch";
  }
  return "unknown";
}

LossKind ParseLossKind(std::string_view name) {
  if (name == "l1") return LossKind::kL1;
  if (name == "lp") return LossKind::kLp;
  if (name == "l2") return LossKind::kL2;
  if (name == "huber") return LossKind::kHuber;
  if (name == "welsch") return LossKind::kWelsch;
  throw LossError("unknown loss kind '" + std::string(name) + "'");
}

LossSpec LossSpec::L1() { return {LossKind::kL1, 1.0, 1.0}; }
LossSpec LossSpec::L2() { return {LossKind::kL2, 2.0, 1.0}; }

LossSpec LossSpec::Lp(double p) {
  if (p == 1.0) return L1();
  if (p == 2.0) return L2();
  LossSpec spec{LossKind::kLp, p, 1.0};
  spec.Validate();
  return spec;
}

LossSpec LossSpec::Huber(double radius) {
  LossSpec spec{LossKind::kHuber, 2.0, radius};
  spec.Validate();
  return spec;
}

LossSpec LossSpec::Welsch(double sigma) {
  LossSpec spec{LossKind::kWelsch, 2.0, sigma};
  spec.Validate();
  return spec;
}

void LossSpec::Validate() const {
  if (kind == LossKind::kLp && !(p > 1.0 && p < 2.0)) {
    throw LossError("loss: lp exponent must lie in (1, 2)");
  }
  if ((kind == LossKind::kHuber || kind == LossKind::kWelsch) &&
      !(radius > 0.0 && std::isfinite(radius))) {
    throw LossError("loss: radius must be positive");
  }
}

std::string LossSpec::Describe() const {
  std::ostringstream out;
  out << LossKindName(kind);
  if (kind == LossKind::kLp) out << "(p=" << p << ")";
  if (kind == LossKind::kHuber) out << "(R=" << radius << ")";
  if (kind == LossKind::kWelsch) out << "(sigma=" << radius << ")";
  return out.str();
}

bool operator==(const LossSpec& a, const LossSpec& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case LossKind::kLp: return a.p == b.p;
    case LossKind::kHuber:
    case LossKind::kWelsch: return a.radius == b.radius;
    default: return true;
  }
}

double Eval(const LossSpec& loss, double z) {
  const double az = std::abs(z);
  switch (loss.kind) {
    case LossKind::kL1: return az;
    case LossKind::kLp: return std::pow(az, loss.p);
    case LossKind::kL2: return z * z;
    case LossKind::kHuber:
      return az <= loss.radius ? z * z : 2.0 * loss.radius * az - loss.radius * loss.radius;
    case LossKind::kWelsch:
      return 1.0 - std::exp(-z * z / (2.0 * loss.radius * loss.radius));
  }
  return 0.0;
}

double Derivative(const LossSpec& loss, double z) {
  const double sign = (z > 0.0) - (z < 0.0);
  const double az = std::abs(z);
  switch (loss.kind) {
    case LossKind::kL1: return sign;
    case LossKind::kLp: return loss.p * std::pow(az, loss.p - 1.0) * sign;
    case LossKind::kL2: return 2.0 * z;
    case LossKind::kHuber: return az <= loss.radius ? 2.0 * z : 2.0 * loss.radius * sign;
    case LossKind::kWelsch: {
      const double s2 = loss.radius * loss.radius;
      return z / s2 * std::exp(-z * z / (2.0 * s2));
    }
  }
  return 0.0;
}

double SubgradientNearest(const LossSpec& loss, double z, double target) {
  if (loss.kind == LossKind::kL1 && z == 0.0) {
    return std::clamp(target, -1.0, 1.0);
  }
  return Derivative(loss, z);
}

double LpRoot(double p, double tau, double b) {
  if (b == 0.0) return 0.0;
  if (b < 0.0) return -LpRoot(p, tau, -b);

  // g is increasing on [0, b] with g(0) = -b/tau < 0 and g(b) = p b^(p-1) > 0.
  auto g = [&](double a) { return (a - b) / tau + p * std::pow(a, p - 1.0); };
  const double width_tol = 1e-14 * std::max(1.0, b);
  constexpr double kResidualTol = 1e-10;

  // At the root p a^(p-1) = (b - a)/tau, which is at most b/tau and at least
  // (b - hi)/tau. For p near 1 the root can sit hundreds of binades below b,
  // out of reach of bisection on [0, b] alone.
  const double inv = 1.0 / (p - 1.0);
  double hi = std::min(b, std::pow(b / (p * tau), inv));
  if (hi == 0.0) return 0.0;  // root underflows
  double lo = std::pow((b - hi) / (p * tau), inv);
  // pow rounding can push the analytic bounds past the root; widen until the
  // sign change is restored.
  for (int i = 0; i < 64 && hi < b && g(hi) < 0.0; ++i) hi = std::min(b, 2.0 * hi);
  if (g(hi) < 0.0) hi = b;
  for (int i = 0; i < 64 && lo > 0.0 && g(lo) > 0.0; ++i) lo *= 0.5;
  if (lo > hi || g(lo) > 0.0) lo = 0.0;
  for (int iter = 0; iter < kLpRootMaxIterations; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      // Bracket exhausted at double precision.
      return mid;
    }
    const double g_mid = g(mid);
    if (hi - lo <= width_tol && std::abs(g_mid) <= kResidualTol) {
      return mid;
    }
    if (g_mid > 0.0) {
      hi = mid;
    } else if (g_mid < 0.0) {
      lo = mid;
    } else {
      return mid;
    }
  }
  std::ostringstream msg;
  msg << "lp root: bisection did not converge (p=" << p << ", tau=" << tau << ", b=" << b << ")";
  throw RootFindingError(msg.str());
}

double Prox(const LossSpec& loss, ProxParams params, double b) {
  const double tau = params.tau;
  switch (loss.kind) {
    case LossKind::kL1:
      return std::max(b - tau, 0.0) - std::max(-b - tau, 0.0);
    case LossKind::kL2:
      return b / (1.0 + 2.0 * tau);
    case LossKind::kHuber: {
      const double r = loss.radius;
      return b - 2.0 * tau * r * b / std::max(std::abs(b), r + 2.0 * tau * r);
    }
    case LossKind::kLp: {
      if (b == 0.0) return 0.0;
      const double root = LpRoot(loss.p, tau, b);
      auto objective = [&](double a) {
        return std::pow(std::abs(a), loss.p) + (a - b) * (a - b) / (2.0 * tau);
      };
      return objective(root) <= objective(0.0) ? root : 0.0;
    }
    case LossKind::kWelsch:
      break;
  }
  throw LossError("loss: no proximal mapping for " + loss.Describe());
}

}  // namespace robloc
