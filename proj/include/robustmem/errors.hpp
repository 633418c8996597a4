// Copyright 2026 The robustmem Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace robustmem {

// Bad arguments, shape mismatches, malformed inputs. CLI exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : UsageError {
  using UsageError::UsageError;
};

// Malformed serialized input; carries a byte position when known.
struct ParseError : UsageError {
  ParseError(const std::string& what, std::size_t position)
      : UsageError(what + " (at byte " + std::to_string(position) + ")"),
        pos(position) {}
  explicit ParseError(const std::string& what) : UsageError(what), pos(0) {}
  std::size_t pos;
};

// A construction or search could not complete. CLI exit code 3.
struct ConstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parameters outside the feasible range of a construction.
struct InfeasibleError : ConstructionError {
  using ConstructionError::ConstructionError;
};

// A randomized search exhausted its budget. Distinct from infeasibility.
struct SearchError : ConstructionError {
  using ConstructionError::ConstructionError;
};

// Sphere cover did not reach the target radius within the center budget.
struct CoverError : ConstructionError {
  CoverError(const std::string& what, double gap)
      : ConstructionError(what), achieved_max_gap(gap) {}
  double achieved_max_gap;
};

struct GenerationError : ConstructionError {
  using ConstructionError::ConstructionError;
};

}  // namespace robustmem
