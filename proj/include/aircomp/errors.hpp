#pragma once

#include <stdexcept>
#include <string>

namespace aircomp {

/// An input violates a domain invariant (instance, weights, gains).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Aggregation weights are undefined because no device contributes data.
class DegenerateWeightsError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A numerical procedure observed behaviour its structure rules out, e.g.
/// more than two crossings of a convex curve with a line.
class NumericalAnomaly : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace aircomp
