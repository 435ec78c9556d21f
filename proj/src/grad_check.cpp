#include "signn/grad_check.hpp"

#include <cmath>
#include <sstream>

namespace signn::num {

namespace {

// Floor for the relative-error denominator: below this magnitude the central
// difference itself is dominated by roundoff, so errors are taken absolutely.
constexpr double kRelFloor = 1e-6;

double eval_loss(const LossFn& f) {
  Tape tape;
  Var loss = f(tape);
  return tape.value(loss).data[0];
}

}  // namespace

std::string GradCheckReport::summary() const {
  std::ostringstream os;
  if (aborted) {
    os << "grad check ABORTED: " << message;
    return os.str();
  }
  os << "grad check " << (passed ? "passed" : "FAILED")
     << ", max rel err " << max_rel_err;
  for (const auto& e : per_param)
    os << "\n  " << e.name << ": rel " << e.max_rel_err << " abs " << e.max_abs_err;
  return os.str();
}

GradCheckReport grad_check(const LossFn& f, const std::vector<Param*>& params,
                           double eps, double tol) {
  GradCheckReport report;

  for (Param* p : params) p->reset_grad();
  {
    Tape tape;
    Var loss = f(tape);
    const double lv = tape.value(loss).data[0];
    if (!std::isfinite(lv)) {
      report.aborted = true;
      report.message = "loss not finite at base point (" + std::to_string(lv) + ")";
      return report;
    }
    report.loss = lv;
    tape.backward(loss);
  }

  for (Param* p : params) {
    GradCheckEntry entry;
    entry.name = p->name;
    for (std::size_t i = 0; i < p->value.data.size(); ++i) {
      const double saved = p->value.data[i];
      p->value.data[i] = saved + eps;
      const double lp = eval_loss(f);
      p->value.data[i] = saved - eps;
      const double lm = eval_loss(f);
      p->value.data[i] = saved;
      if (!std::isfinite(lp) || !std::isfinite(lm)) {
        report.aborted = true;
        report.message = "loss not finite while perturbing " + p->name +
                         "[" + std::to_string(i) + "]";
        return report;
      }
      const double fd = (lp - lm) / (2.0 * eps);
      const double an = p->grad.data[i];
      const double abs_err = std::fabs(fd - an);
      const double rel = abs_err / std::max({std::fabs(fd), std::fabs(an), kRelFloor});
      entry.max_abs_err = std::max(entry.max_abs_err, abs_err);
      entry.max_rel_err = std::max(entry.max_rel_err, rel);
    }
    report.max_rel_err = std::max(report.max_rel_err, entry.max_rel_err);
    report.per_param.push_back(std::move(entry));
  }
  report.passed = report.max_rel_err < tol;
  return report;
}

}  // namespace signn::num
