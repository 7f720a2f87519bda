#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "pdbench/event_log.hpp"
#include "pdbench/petri_net.hpp"
#include "pdbench/replay.hpp"

namespace pdbench {

/// Positives are traces that fit the original model; the predicted class is
/// whether the trace fits the discovered model.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  bool operator==(const ConfusionMatrix&) const = default;
};

/// nullopt marks an undefined metric (zero denominator).
using Metric = std::optional<double>;

Metric precision(const ConfusionMatrix& m);
Metric recall(const ConfusionMatrix& m);
/// Harmonic mean of precision and recall. A defined zero in either makes the
/// result 0; otherwise undefined if either side is undefined.
Metric f1(const ConfusionMatrix& m);

struct FoldResult {
  ConfusionMatrix matrix;
  Metric precision;
  Metric recall;
  Metric f1;
  std::size_t replay_budget_exceeded = 0;
};

FoldResult make_fold_result(const ConfusionMatrix& m, std::size_t budget_exceeded = 0);

/// Replays both test halves on `net`. Budget-exceeded verdicts count as
/// not-fitting and are tallied separately. Throws InvalidNet.
FoldResult classify_fold(const PetriNet& net, const std::vector<Trace>& fitting_tests,
                         const std::vector<Trace>& noised_tests,
                         const ReplayOptions& options = {});

enum class UndefinedPolicy { exclude, zero };

struct AveragedMetrics {
  Metric precision;
  Metric recall;
  Metric f1;
  /// Folds with at least one undefined metric.
  std::size_t undefined_folds = 0;
};

/// Mean per metric over the folds where it is defined (or with undefined
/// values read as 0 under UndefinedPolicy::zero). Throws AllUndefined when no
/// fold has any defined metric.
AveragedMetrics average_folds(const std::vector<FoldResult>& folds,
                              UndefinedPolicy policy = UndefinedPolicy::exclude);

}  // namespace pdbench
