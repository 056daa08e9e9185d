#pragma once

#include <stdexcept>
#include <string>

namespace detmode {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Mismatched grids or dimensions between operands.
struct shape_error : error {
    using error::error;
};

/// Physically meaningless request: zero mean field, vanishing detection
/// normalization, empty measurement.
struct degenerate_error : error {
    using error::error;
};

/// Invalid scenario configuration; the message names the offending key.
struct config_error : error {
    using error::error;
};

/// Two independent computations of the same quantity disagree beyond
/// tolerance.
struct crosscheck_error : error {
    using error::error;
};

/// A constructed value violates one of its invariants.
struct validation_error : error {
    using error::error;
};

} // namespace detmode
