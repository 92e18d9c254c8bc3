#include "scb/boost/evaluate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>

#include "scb/common/error.hpp"

namespace scb::boost {

namespace {

double ratio(std::size_t a, std::size_t b) { return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0; }

Interval percentile_interval(std::vector<double> v, double point) {
  std::sort(v.begin(), v.end());
  auto at = [&](double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  return {std::min(at(0.025), point), std::max(at(0.975), point)};
}

}  // namespace

const char* level_name(Level l) { return l == Level::Window ? "window" : "trial"; }

Confusion confusion_of(const std::vector<int>& preds, const std::vector<int>& labels) {
  if (preds.size() != labels.size()) throw Error(Errc::InvalidArgument, "predictions and labels differ in length");
  Confusion c;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool p = preds[i] == 1, y = labels[i] == 1;
    if (p && y) ++c.tp;
    else if (p && !y) ++c.fp;
    else if (!p && y) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double class_f1(const Confusion& c, int cls) {
  const std::size_t tp = cls == 1 ? c.tp : c.tn;
  const std::size_t fp = cls == 1 ? c.fp : c.fn;
  const std::size_t fn = cls == 1 ? c.fn : c.fp;
  const std::size_t den = 2 * tp + fp + fn;
  return den ? 2.0 * static_cast<double>(tp) / static_cast<double>(den) : 1.0;
}

double macro_f1(const Confusion& c) { return 0.5 * (class_f1(c, 0) + class_f1(c, 1)); }

Interval wilson_interval(std::size_t successes, std::size_t n, double z) {
  if (n == 0) throw Error(Errc::EmptyInput, "Wilson interval of zero trials");
  const double nn = static_cast<double>(n), p = ratio(successes, n), z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

TrialVotes vote_trials(const std::vector<int>& preds, const std::vector<int>& labels, const std::vector<int>& trial_map) {
  if (trial_map.size() != preds.size() || labels.size() != preds.size())
    throw Error(Errc::InvalidArgument, "trial map must cover every window");
  std::map<int, std::array<std::size_t, 4>> votes;  // pred0, pred1, label0, label1
  for (std::size_t i = 0; i < preds.size(); ++i) {
    auto& v = votes[trial_map[i]];
    ++v[preds[i] == 1 ? 1 : 0];
    ++v[labels[i] == 1 ? 3 : 2];
  }
  TrialVotes out;
  for (const auto& [id, v] : votes) {
    out.trial_ids.push_back(id);
    out.preds.push_back(v[1] > v[0] ? 1 : 0);
    out.labels.push_back(v[3] > v[2] ? 1 : 0);
  }
  return out;
}

EvalReport evaluate(const std::vector<int>& preds, const std::vector<int>& labels, Level level,
                    const std::vector<int>* trial_map, std::uint64_t seed, int resamples) {
  if (preds.size() != labels.size()) throw Error(Errc::InvalidArgument, "predictions and labels differ in length");
  if (preds.empty()) throw Error(Errc::EmptyInput, "nothing to evaluate");
  if (resamples < 1) throw Error(Errc::InvalidArgument, "resamples must be positive");

  EvalReport r;
  r.level = level;
  if (level == Level::Trial) {
    if (!trial_map) throw Error(Errc::InvalidArgument, "trial-level evaluation needs a trial map");
    const TrialVotes tv = vote_trials(preds, labels, *trial_map);
    r.confusion = confusion_of(tv.preds, tv.labels);
  } else {
    r.confusion = confusion_of(preds, labels);
  }
  const Confusion& c = r.confusion;
  r.n = c.n();
  r.accuracy = ratio(c.tp + c.tn, r.n);
  r.f1 = class_f1(c, 1);
  r.macro_f1 = macro_f1(c);
  r.ci95 = wilson_interval(c.tp + c.tn, r.n);

  // Resample the cells in a canonical order (tp, fp, fn, tn).
  const std::size_t bounds[4] = {c.tp, c.tp + c.fp, c.tp + c.fp + c.fn, r.n};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, r.n - 1);
  std::vector<double> f1s, macros;
  f1s.reserve(static_cast<std::size_t>(resamples));
  macros.reserve(static_cast<std::size_t>(resamples));
  for (int b = 0; b < resamples; ++b) {
    Confusion s;
    for (std::size_t i = 0; i < r.n; ++i) {
      const std::size_t k = pick(rng);
      if (k < bounds[0]) ++s.tp;
      else if (k < bounds[1]) ++s.fp;
      else if (k < bounds[2]) ++s.fn;
      else ++s.tn;
    }
    f1s.push_back(class_f1(s, 1));
    macros.push_back(macro_f1(s));
  }
  r.f1_ci95 = percentile_interval(std::move(f1s), r.f1);
  r.macro_f1_ci95 = percentile_interval(std::move(macros), r.macro_f1);
  return r;
}

nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["level"] = level_name(r.level);
  j["classifier"] = r.classifier;
  j["n"] = r.n;
  j["accuracy"] = r.accuracy;
  j["f1"] = r.f1;
  j["macro_f1"] = r.macro_f1;
  j["ci95"] = {r.ci95.lo, r.ci95.hi};
  j["f1_ci95"] = {r.f1_ci95.lo, r.f1_ci95.hi};
  j["macro_f1_ci95"] = {r.macro_f1_ci95.lo, r.macro_f1_ci95.hi};
  j["confusion"] = {{"tp", r.confusion.tp}, {"fp", r.confusion.fp}, {"fn", r.confusion.fn}, {"tn", r.confusion.tn}};
  nlohmann::ordered_json folds = nlohmann::ordered_json::array();
  for (const auto& f : r.folds)
    folds.push_back({{"name", f.name}, {"n", f.n}, {"accuracy", f.accuracy}, {"f1", f.f1}, {"macro_f1", f.macro_f1}});
  j["folds"] = std::move(folds);
  if (!r.latency_ref.empty()) j["latency_ref"] = r.latency_ref;
  if (!r.diagnostics.empty()) {
    nlohmann::ordered_json d = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.diagnostics) d[k] = v;
    j["diagnostics"] = std::move(d);
  }
  return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != kReportSchemaVersion)
      throw Error(Errc::InvalidArgument, "unsupported report schema version");
    EvalReport r;
    const std::string level = j.at("level").get<std::string>();
    if (level != "window" && level != "trial") throw Error(Errc::InvalidArgument, "unknown level " + level);
    r.level = level == "window" ? Level::Window : Level::Trial;
    r.classifier = j.value("classifier", "");
    r.n = j.at("n").get<std::size_t>();
    r.accuracy = j.at("accuracy").get<double>();
    r.f1 = j.at("f1").get<double>();
    r.macro_f1 = j.at("macro_f1").get<double>();
    auto interval = [&](const char* key) { return Interval{j.at(key).at(0).get<double>(), j.at(key).at(1).get<double>()}; };
    r.ci95 = interval("ci95");
    r.f1_ci95 = interval("f1_ci95");
    r.macro_f1_ci95 = interval("macro_f1_ci95");
    const auto& c = j.at("confusion");
    r.confusion = {c.at("tp").get<std::size_t>(), c.at("fp").get<std::size_t>(), c.at("fn").get<std::size_t>(),
                   c.at("tn").get<std::size_t>()};
    for (const auto& f : j.value("folds", nlohmann::json::array()))
      r.folds.push_back({f.at("name").get<std::string>(), f.at("n").get<std::size_t>(), f.at("accuracy").get<double>(),
                         f.at("f1").get<double>(), f.at("macro_f1").get<double>()});
    r.latency_ref = j.value("latency_ref", "");
    if (j.contains("diagnostics"))
      for (const auto& [k, v] : j.at("diagnostics").items()) r.diagnostics[k] = v.get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("malformed report: ") + e.what());
  }
}

}  // namespace scb::boost
