#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "pdbench/event_log.hpp"
#include "pdbench/random.hpp"

namespace pdbench {

struct Fold {
  std::vector<std::size_t> training;      // ascending log indices
  std::vector<std::size_t> fitting_test;  // first half of the test fold
  std::vector<std::size_t> to_noise;      // second half of the test fold
};

/// k-fold cross-validation plan over trace indices of one log.
struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::size_t> assignment;  // fold index per trace
  std::vector<Fold> folds;

  bool operator==(const FoldPlan&) const = default;
};

/// Random permutation followed by round-robin assignment. Odd test folds give
/// the extra trace to the fitting half. Throws TooSmall if |log| < 2k and
/// std::invalid_argument if k < 2.
FoldPlan split_kfold(const EventLog& log, std::size_t k, Rng& rng);

inline bool operator==(const Fold& a, const Fold& b) {
  return a.training == b.training && a.fitting_test == b.fitting_test &&
         a.to_noise == b.to_noise;
}

std::string to_json(const FoldPlan& plan);
FoldPlan parse_fold_plan(std::string_view json);

}  // namespace pdbench
