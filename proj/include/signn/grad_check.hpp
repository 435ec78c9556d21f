#pragma once

#include <functional>
#include <string>
#include <vector>

#include "signn/tape.hpp"

namespace signn::num {

struct GradCheckEntry {
  std::string name;
  double max_rel_err = 0.0;
  double max_abs_err = 0.0;
};

struct GradCheckReport {
  bool passed = false;
  bool aborted = false;       // non-finite loss encountered
  std::string message;        // diagnostics when aborted
  double loss = 0.0;
  double max_rel_err = 0.0;
  std::vector<GradCheckEntry> per_param;

  std::string summary() const;
};

/// Scalar-valued computation: builds the loss on the given tape from the
/// current values of the checked params.  Must be deterministic.
using LossFn = std::function<Var(Tape&)>;

/// Central finite differences vs. reverse-mode gradients for every entry of
/// every param.  The computation must run in Smooth mode so both routes
/// differentiate the same function.  Relative error uses a small absolute
/// floor so near-zero gradients are compared sensibly.
GradCheckReport grad_check(const LossFn& f, const std::vector<Param*>& params,
                           double eps, double tol);

}  // namespace signn::num
