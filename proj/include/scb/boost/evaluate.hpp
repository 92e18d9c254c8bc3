#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace scb::boost {

enum class Level { Window, Trial };

const char* level_name(Level l);

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;  // positive class = move (1)

  std::size_t n() const { return tp + fp + fn + tn; }
  bool operator==(const Confusion&) const = default;
};

struct Interval {
  double lo = 0.0, hi = 0.0;
};

struct FoldSummary {
  std::string name;
  std::size_t n = 0;
  double accuracy = 0.0, f1 = 0.0, macro_f1 = 0.0;
};

struct EvalReport {
  Level level = Level::Window;
  std::string classifier;  // e.g. "adaboost"
  std::size_t n = 0;
  double accuracy = 0.0, f1 = 0.0, macro_f1 = 0.0;
  Interval ci95;  // accuracy, Wilson score
  Interval f1_ci95, macro_f1_ci95;  // bootstrap
  Confusion confusion;
  std::vector<FoldSummary> folds;
  std::string latency_ref;  // path of the latency stats this report refers to, if any
  std::map<std::string, double> diagnostics;  // extra named figures, e.g. silhouettes
};

constexpr int kReportSchemaVersion = 1;
constexpr int kBootstrapResamples = 1000;

Confusion confusion_of(const std::vector<int>& preds, const std::vector<int>& labels);

// F1 of one class; 1.0 when the class is absent from both predictions and labels.
double class_f1(const Confusion& c, int cls);
double macro_f1(const Confusion& c);

Interval wilson_interval(std::size_t successes, std::size_t n, double z = 1.959963984540054);

// Majority vote per trial id (ties -> rest); the trial's true label is the
// majority of its window labels (ties -> rest). Trials come out sorted by id.
struct TrialVotes {
  std::vector<int> trial_ids, preds, labels;
};
TrialVotes vote_trials(const std::vector<int>& preds, const std::vector<int>& labels, const std::vector<int>& trial_map);

// Throws EmptyInput for no samples, InvalidArgument for mismatched lengths or
// a missing trial map at trial level. The bootstrap resamples the confusion
// cells, so the report does not depend on sample order.
EvalReport evaluate(const std::vector<int>& preds, const std::vector<int>& labels, Level level,
                    const std::vector<int>* trial_map = nullptr, std::uint64_t seed = 0,
                    int resamples = kBootstrapResamples);

nlohmann::ordered_json to_json(const EvalReport& r);
EvalReport report_from_json(const nlohmann::json& j);

}  // namespace scb::boost
