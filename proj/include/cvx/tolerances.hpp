#pragma once

namespace cvx {

// Floating-point slack used across the library. The CLI exposes the
// active/support/membership entries as flags.
struct Tolerances {
  double rank = 1e-10;        // relative to the largest row norm
  double anchor = 1e-8;       // ||S y - zeta|| for fiber anchors
  double active = 1e-9;       // piece activity, scaled by |max value| + 1
  double support = 1e-7;      // support-function / slice-interval agreement
  double convexity = 1e-9;    // midpoint slack on restricted functions
  double marginal_gap = 1e-8; // lower bound -gap for marginal midpoint gaps
  double strict_gap = 1e-8;   // strictness floor on PD-quadratic marginals
  double domain = 1e-8;       // membership of x in Im(S^T)
  double feasibility = 1e-7;  // ||S^T r - x|| for marginal witnesses
  double membership = 1e-6;   // f-value slack for argmin membership
  double box_radius = 1e3;    // inner LP bounding box for marginals
};

}  // namespace cvx
