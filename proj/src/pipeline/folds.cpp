#include <algorithm>
#include <map>
#include <string>

#include "smc/error.hpp"
#include "smc/pipeline.hpp"
#include "smc/random.hpp"

namespace smc {

SplitPlan stratified_folds(std::span<const int> labels, int fold_count, std::uint64_t seed) {
  require(fold_count >= 2, "fold_count must be at least 2");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  for (const auto& [label, members] : by_class) {
    if (members.size() < static_cast<std::size_t>(fold_count)) {
      fail(ErrorCode::InvalidInput, "class " + std::to_string(label) + " has " +
                                        std::to_string(members.size()) + " samples, fewer than " +
                                        std::to_string(fold_count) + " folds");
    }
  }

  SplitPlan plan;
  plan.fold_count = fold_count;
  plan.labeled_fraction = 1.0 - 1.0 / fold_count;
  plan.seed = seed;
  plan.sample_count = labels.size();
  plan.test.assign(static_cast<std::size_t>(fold_count), {});

  std::size_t deal = 0;
  for (auto& [label, members] : by_class) {
    Rng rng(derive_seed(seed, {"class", std::to_string(label)}));
    rng.shuffle(members.begin(), members.end());
    for (std::size_t idx : members) {
      plan.test[deal % static_cast<std::size_t>(fold_count)].push_back(idx);
      ++deal;
    }
  }

  plan.train.resize(plan.test.size());
  for (std::size_t f = 0; f < plan.test.size(); ++f) {
    std::sort(plan.test[f].begin(), plan.test[f].end());
    std::vector<char> in_test(labels.size(), 0);
    for (std::size_t i : plan.test[f]) in_test[i] = 1;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (!in_test[i]) plan.train[f].push_back(i);
    }
  }
  return plan;
}

}  // namespace smc
