#include "toporec/folds.hpp"

#include "toporec/errors.hpp"
#include "toporec/rng.hpp"

namespace toporec {

FoldPlan make_folds(const std::vector<int>& labels, int num_classes, int k, std::uint64_t seed) {
  if (k < 2) throw Error("make_folds: k must be >= 2");
  if (labels.empty()) throw EmptyDataset("make_folds");

  FoldPlan plan;
  plan.k = k;
  plan.assignment.assign(labels.size(), -1);
  plan.class_counts.assign(num_classes, std::vector<int>(k, 0));

  std::vector<std::vector<int>> by_class(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    if (y < 0 || y >= num_classes) throw Error("make_folds: label out of range");
    by_class[y].push_back(static_cast<int>(i));
  }

  Rng rng(derive_seed(seed, 0x666f6c64));
  for (int cls = 0; cls < num_classes; ++cls) {
    auto& members = by_class[cls];
    if (members.size() % k != 0 && plan.warning.empty())
      plan.warning = "class " + std::to_string(cls) + " count " +
                     std::to_string(members.size()) + " not divisible by " + std::to_string(k) +
                     "; using near-equal stratified split";
    rng.shuffle(members);
    for (std::size_t i = 0; i < members.size(); ++i) {
      const int fold = static_cast<int>(i % k);
      plan.assignment[members[i]] = fold;
      ++plan.class_counts[cls][fold];
    }
  }
  return plan;
}

}  // namespace toporec
