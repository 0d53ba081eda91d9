#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace widthlab {

/// Multiplier operator Λ acting diagonally on Fourier coefficients. Either a
/// function λ(θ) of the eigenvalue (expanded over a spectrum with each value
/// repeated by the eigenspace dimension) or an explicit sequence λ_1, λ_2, ...
struct MultiplierSpec {
  std::function<double(double)> lambda_fn;
  std::vector<double> sequence;
  /// Decreasing continuous λ with λ(Ct) ≫ λ(t); the expanded sequence is
  /// then nonincreasing.
  bool class_a = false;
  /// First eigenspace degree used when expanding lambda_fn (1 drops constants).
  int start_degree = 1;
  std::string label;

  static MultiplierSpec from_function(std::function<double(double)> fn, bool class_a,
                                      std::string label = "lambda");
  /// Throws PreconditionFailed on a nonpositive entry, or on an increasing
  /// step when class_a is set.
  static MultiplierSpec from_sequence(std::vector<double> values, bool class_a,
                                      std::string label = "sequence");

  bool is_function() const { return static_cast<bool>(lambda_fn); }
};

}  // namespace widthlab
