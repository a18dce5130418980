#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gbi/gauss_core.hpp"

namespace gbi {

struct VerifyCheck {
  std::string name;
  double value;      // worst case over the grid
  double tolerance;  // pass iff value <= tolerance
  bool passed;
  std::string detail;
};

struct VerifyOptions {
  std::vector<double> r_grid;
  // Source of the CCM under test; defaults to purification_x_matrix. Tests swap
  // in a perturbed matrix to exercise the failure path.
  std::function<Matrix(double)> x_source;
};

/// 0.05, 0.10, ..., 2.00
std::vector<double> default_r_grid();

/// Parses "start:stop:count" into `count` equally spaced points.
std::vector<double> parse_r_grid(const std::string& text);

std::vector<VerifyCheck> run_verification(const VerifyOptions& options);

}  // namespace gbi
