#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "pgc/geometry.hpp"

namespace pgc {

struct CheckOptions {
  int samples = 50;
  std::uint64_t seed = 1;
  int target_order = 8;
  /// Negative control: perturbs the top alpha coefficient before assembly,
  /// which the Dirichlet suite must catch.
  bool corrupt_alpha = false;
};

struct CheckRow {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  long cases = 0;
  bool passed() const { return max_error <= tolerance; }
  /// The configuration behind max_error, for replay.
  nlohmann::json worst;
};

struct CheckReport {
  std::vector<CheckRow> rows;
  bool passed() const;
  std::string table() const;
};

/// Compares the closed-form engine against direct quadrature on random
/// interior points of the cage: kernel values, Dirichlet and Neumann
/// coordinates, and identity reproduction.
CheckReport run_checks(const Cage& cage, const CheckOptions& options = {});

}  // namespace pgc
