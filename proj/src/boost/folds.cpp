#include "scb/boost/folds.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "scb/common/error.hpp"

namespace scb::boost {

std::vector<Fold> loso_folds(const std::vector<std::string>& subject_of_sample) {
  const std::set<std::string> subjects(subject_of_sample.begin(), subject_of_sample.end());
  if (subjects.size() < 2) throw Error(Errc::SingleSubject, "leave-one-subject-out needs at least two subjects");
  std::vector<Fold> folds;
  for (const auto& s : subjects) {
    Fold f;
    f.held_out = s;
    for (std::size_t i = 0; i < subject_of_sample.size(); ++i) (subject_of_sample[i] == s ? f.test : f.train).push_back(i);
    folds.push_back(std::move(f));
  }
  return folds;
}

std::vector<Fold> kfold(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2 || static_cast<std::size_t>(k) > n) throw Error(Errc::InvalidArgument, "k must be in [2, n]");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Fold> folds(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) folds[static_cast<std::size_t>(f)].held_out = std::to_string(f);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t fi = i % static_cast<std::size_t>(k);
    for (std::size_t f = 0; f < folds.size(); ++f) (f == fi ? folds[f].test : folds[f].train).push_back(order[i]);
  }
  for (auto& f : folds) {
    std::sort(f.train.begin(), f.train.end());
    std::sort(f.test.begin(), f.test.end());
  }
  return folds;
}

}  // namespace scb::boost
