#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace toporec {

struct FoldPlan {
  int k = 0;
  std::vector<int> assignment;                 // sample index -> fold
  std::vector<std::vector<int>> class_counts;  // [class][fold]
  std::string warning;                         // set when a class is not divisible by k
};

// Stratified k-fold: seeded shuffle within each class, then round-robin
// assignment. When a class count is not divisible by k the plan degrades to
// a near-equal stratified split and records a warning instead of failing.
FoldPlan make_folds(const std::vector<int>& labels, int num_classes, int k, std::uint64_t seed);

}  // namespace toporec
