#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "qitags/errors.hpp"

namespace qitags {

struct HeuristicContext {
  double q_root = 0.0;   // quality of the all-ones allocation
  double q_null = 0.0;   // quality of the all-zeros allocation
  double c_max = 1.0;    // time budget
  double c_worst = 0.0;  // makespan of the root allocation
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Normalized Allocation Quality: (q_root - q) / (q_root - q_null).
inline double naq(double q_bar, const HeuristicContext& ctx) {
  expects(q_bar >= ctx.q_null - kTolerance && q_bar <= ctx.q_root + kTolerance,
          "allocation quality outside [q_null, q_root]");
  const double span = ctx.q_root - ctx.q_null;
  if (std::abs(span) <= kTolerance) return 0.0;
  return std::clamp((ctx.q_root - q_bar) / span, 0.0, 1.0);
}

// Time Budget Overrun: max((C - C_max) / |C_worst - C_max|, 0). Not capped
// at 1; it exceeds 1 when C_worst < C_max or C > C_worst.
inline double tbo(double makespan, const HeuristicContext& ctx) {
  expects(makespan >= 0.0, "makespan must be non-negative");
  if (makespan <= ctx.c_max) return 0.0;
  const double span = std::abs(ctx.c_worst - ctx.c_max);
  if (span <= kTolerance || std::isinf(makespan)) return kInfinity;
  return (makespan - ctx.c_max) / span;
}

// (1 - alpha) naq + alpha tbo. alpha = 0 ignores an infinite TBO.
inline double tetam(double naq_v, double tbo_v, double alpha) {
  require(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0,1]");
  if (alpha == 0.0) return naq_v;
  if (alpha == 1.0) return tbo_v;
  return (1.0 - alpha) * naq_v + alpha * tbo_v;
}

}  // namespace qitags
