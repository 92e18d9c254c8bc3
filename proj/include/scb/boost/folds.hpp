#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace scb::boost {

struct Fold {
  std::string held_out;  // subject id for LOSO, fold number for k-fold
  std::vector<std::size_t> train, test;
};

// One fold per distinct subject, in sorted subject order. Throws SingleSubject.
std::vector<Fold> loso_folds(const std::vector<std::string>& subject_of_sample);

// Shuffled k-fold over sample indices, ignoring subjects.
std::vector<Fold> kfold(std::size_t n, int k, std::uint64_t seed);

}  // namespace scb::boost
