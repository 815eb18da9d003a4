#pragma once

namespace inls {

/// Snapshot of the monitored functionals at time t.
struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double grad_sq = 0.0;
  double potential = 0.0;
  double morawetz_action = 0.0;
  double local_mass = 0.0;
  double h1_norm = 0.0;
};

}  // namespace inls
