#pragma once

#include <stdexcept>
#include <string>

namespace mvpb {

/// A required input file is absent or unreadable.
struct MissingInput : std::runtime_error {
  explicit MissingInput(const std::string& what) : std::runtime_error(what) {}
};

/// Structurally valid input whose shape contradicts what it is used with
/// (view counts, dimensions, voter indices, weight lengths).
struct SchemaMismatch : std::runtime_error {
  explicit SchemaMismatch(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mvpb
