#include "pdbench/metrics.hpp"

#include "pdbench/errors.hpp"

namespace pdbench {

Metric precision(const ConfusionMatrix& m) {
  if (m.tp + m.fp == 0) return std::nullopt;
  return static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
}

Metric recall(const ConfusionMatrix& m) {
  if (m.tp + m.fn == 0) return std::nullopt;
  return static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
}

Metric f1(const ConfusionMatrix& m) {
  Metric p = precision(m);
  Metric r = recall(m);
  if ((p && *p == 0.0) || (r && *r == 0.0)) return 0.0;
  if (!p || !r) return std::nullopt;
  return 2.0 * *p * *r / (*p + *r);
}

FoldResult make_fold_result(const ConfusionMatrix& m, std::size_t budget_exceeded) {
  return FoldResult{m, precision(m), recall(m), f1(m), budget_exceeded};
}

FoldResult classify_fold(const PetriNet& net, const std::vector<Trace>& fitting_tests,
                         const std::vector<Trace>& noised_tests,
                         const ReplayOptions& options) {
  ReplayEngine engine(net, options);
  ConfusionMatrix m;
  std::size_t exceeded = 0;
  for (const auto& t : fitting_tests) {
    ReplayVerdict v = engine.replay(t);
    if (v == ReplayVerdict::budget_exceeded) ++exceeded;
    (v == ReplayVerdict::fits ? m.tp : m.fn)++;
  }
  for (const auto& t : noised_tests) {
    ReplayVerdict v = engine.replay(t);
    if (v == ReplayVerdict::budget_exceeded) ++exceeded;
    (v == ReplayVerdict::fits ? m.fp : m.tn)++;
  }
  return make_fold_result(m, exceeded);
}

AveragedMetrics average_folds(const std::vector<FoldResult>& folds, UndefinedPolicy policy) {
  AveragedMetrics out;
  auto mean = [&](Metric FoldResult::*field) -> Metric {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& f : folds) {
      const Metric& v = f.*field;
      if (v) {
        sum += *v;
        ++n;
      } else if (policy == UndefinedPolicy::zero) {
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  };
  for (const auto& f : folds)
    if (!f.precision || !f.recall || !f.f1) ++out.undefined_folds;
  bool any_defined = false;
  for (const auto& f : folds)
    if (f.precision || f.recall || f.f1) any_defined = true;
  if (!any_defined) throw AllUndefined("no fold has a defined metric");
  out.precision = mean(&FoldResult::precision);
  out.recall = mean(&FoldResult::recall);
  out.f1 = mean(&FoldResult::f1);
  return out;
}

}  // namespace pdbench
