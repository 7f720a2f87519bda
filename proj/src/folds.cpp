#include "pdbench/folds.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

#include "pdbench/errors.hpp"

namespace pdbench {

FoldPlan split_kfold(const EventLog& log, std::size_t k, Rng& rng) {
  if (k < 2) throw std::invalid_argument("cross-validation needs k >= 2");
  if (log.size() < 2 * k)
    throw TooSmall("log of " + std::to_string(log.size()) + " traces is too small for " +
                   std::to_string(k) + " folds");
  std::vector<std::size_t> perm(log.size());
  std::iota(perm.begin(), perm.end(), 0);
  shuffle_in_place(perm, rng);

  FoldPlan plan;
  plan.k = k;
  plan.assignment.assign(log.size(), 0);
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t pos = 0; pos < perm.size(); ++pos) {
    plan.assignment[perm[pos]] = pos % k;
    members[pos % k].push_back(perm[pos]);
  }
  plan.folds.resize(k);
  for (std::size_t f = 0; f < k; ++f) {
    Fold& fold = plan.folds[f];
    const auto& m = members[f];
    std::size_t fitting = (m.size() + 1) / 2;
    fold.fitting_test.assign(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(fitting));
    fold.to_noise.assign(m.begin() + static_cast<std::ptrdiff_t>(fitting), m.end());
    for (std::size_t i = 0; i < log.size(); ++i)
      if (plan.assignment[i] != f) fold.training.push_back(i);
  }
  return plan;
}

std::string to_json(const FoldPlan& plan) {
  nlohmann::ordered_json j;
  j["k"] = plan.k;
  j["assignment"] = plan.assignment;
  auto folds = nlohmann::ordered_json::array();
  for (const auto& f : plan.folds) {
    nlohmann::ordered_json fj;
    fj["fitting_test"] = f.fitting_test;
    fj["to_noise"] = f.to_noise;
    folds.push_back(std::move(fj));
  }
  j["folds"] = std::move(folds);
  return j.dump();
}

FoldPlan parse_fold_plan(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    FoldPlan plan;
    plan.k = j.at("k").get<std::size_t>();
    plan.assignment = j.at("assignment").get<std::vector<std::size_t>>();
    for (const auto& fj : j.at("folds")) {
      Fold f;
      f.fitting_test = fj.at("fitting_test").get<std::vector<std::size_t>>();
      f.to_noise = fj.at("to_noise").get<std::vector<std::size_t>>();
      plan.folds.push_back(std::move(f));
    }
    if (plan.folds.size() != plan.k) throw ParseError("fold plan: fold count differs from k");
    // Training sets are implied by the assignment.
    for (std::size_t f = 0; f < plan.k; ++f)
      for (std::size_t i = 0; i < plan.assignment.size(); ++i)
        if (plan.assignment[i] != f) plan.folds[f].training.push_back(i);
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("fold plan: ") + e.what());
  }
}

}  // namespace pdbench
