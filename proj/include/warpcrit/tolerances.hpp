#pragma once

#include <string>
#include <utility>
#include <vector>

namespace warpcrit {

/// Numerical thresholds shared by every module. Relative entries are scaled
/// by the quantity named in the comment.
struct Tolerances {
  double rtol = 1e-10;
  double atol = 1e-12;
  double conservation = 1e-10;     // x (1 + |kappa0|)
  double lambda_identity = 1e-8;   // x (1 + max|lambda|)
  double critical = 1e-8;
  double scalar = 1e-8;            // x (1 + |R|)
  double weyl = 1e-8;
  double einstein = 1e-8;
  double fiber = 1e-8;             // x (1 + |kappa0|)
  double root = 1e-12;
  double matching = 1e-8;
  double lambda_floor = 1e-4;      // x max|lambda|
  double positivity_floor = 1e-6;  // x r(0)
  double constant_detect = 1e-12;
  double degenerate = 1e-12;
  double quadrature = 1e-11;       // relative, per grid cell
  double tail = 1e-10;             // neglected tail correction / total

  /// Sets a field by name; returns false for unknown names.
  bool set(const std::string& name, double value);

  [[nodiscard]] std::vector<std::pair<std::string, double>> entries() const;
};

}  // namespace warpcrit
