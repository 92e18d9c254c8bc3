// Acceptance gate: one PASS/FAIL line per criterion.
//
//   acceptance <path-to-scb> [work-dir]
//
// The end-to-end benchmark drives the scb command line exactly as a user
// would; the remaining checks call the libraries directly.

#include <unistd.h>

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "scb/boost/adaboost.hpp"
#include "scb/data/pipeline.hpp"
#include "scb/data/recording_file.hpp"
#include "scb/data/synthetic.hpp"
#include "scb/dsp/filter.hpp"
#include "scb/ica/ica.hpp"
#include "scb/session/engine.hpp"
#include "scb/session/runner.hpp"
#include "scb/session/session.hpp"
#include "scb/session/sources.hpp"
#include "scb/session/state_machine.hpp"
#include "support/grad_oracle.hpp"
#include "support/ica_fixture.hpp"
#include "support/ref_adaboost.hpp"

namespace fs = std::filesystem;
using namespace scb;
using Seconds = std::chrono::duration<double>;

namespace {

int g_failed = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  if (!ok) ++g_failed;
}

template <class F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return Seconds(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  return std::string(std::istreambuf_iterator<char>(fa), {}) == std::string(std::istreambuf_iterator<char>(fb), {});
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

struct Cli {
  fs::path exe, work;
  int run(const std::string& args) const {
    const std::string cmd = exe.string() + " -q " + args + " >>" + (work / "cli.log").string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  }
};

// --- library-level criteria --------------------------------------------------

void filter_contract() {
  dsp::FilterCoeffs f;
  const double secs = timed([&] { f = dsp::design_bandpass(8.0, 40.0, 4, 250.0); });
  const double g20 = f.gain_db(20.0), g4 = f.gain_db(4.0), g0 = f.gain_db(0.0), gn = f.gain_db(125.0);
  const double r = f.max_pole_radius();
  const bool ok = std::abs(g20) <= 0.5 && g4 <= -24.0 && g0 <= -60.0 && gn <= -60.0 && r < 1.0 && secs < 1.0;
  report("filter contract", ok,
         "20 Hz " + fmt(g20) + " dB, 4 Hz " + fmt(g4) + " dB, DC " + fmt(g0) + " dB, Nyquist " + fmt(gn) +
             " dB, max pole radius " + fmt(r, 6) + ", " + fmt(secs, 3) + " s");
}

void gradient_gate() {
  testing::GradCheck gc;
  const double secs = timed([&] { gc = testing::finite_difference_check(11, 25, 1e-4); });
  double worst = 0.0;
  for (const auto& s : gc.samples) worst = std::max(worst, s.rel_error);
  const bool ok = gc.samples.size() >= 25 && worst < 1e-4 && secs < 60.0;
  report("gradient gate", ok,
         std::to_string(gc.samples.size()) + " parameters, worst relative error " + fmt(worst, 3) + ", " +
             fmt(secs, 3) + " s");
}

void ica_recovery() {
  int good = 0;
  double worst = 0.0;
  const double secs = timed([&] {
    for (int seed = 0; seed < 10; ++seed) {
      const auto s = testing::source_bank(4, 6000, 500 + seed);
      const auto a = testing::random_matrix(12, 4, 600 + seed);
      const auto x = testing::mixed_recording(s, a, 1e-3, 700 + seed);
      const auto m = ica::fit(x, {.k = 4, .tol = 1e-7, .max_iter = 1000, .seed = static_cast<std::uint64_t>(seed)});
      const double ai = testing::amari_index(m.channel_unmixing() * a);
      worst = std::max(worst, ai);
      good += ai < 0.1;
    }
  });
  report("ICA recovery", good >= 9 && secs < 60.0,
         std::to_string(good) + "/10 seeds with Amari index < 0.1 (worst " + fmt(worst, 3) + "), " + fmt(secs, 3) +
             " s");
}

void adaboost_oracle() {
  Eigen::MatrixXd x, held;
  std::vector<int> y, held_y;
  testing::gaussian_two_class(200, 64, 8, 0.6, 11, x, y);
  testing::gaussian_two_class(200, 64, 8, 0.6, 12, held, held_y);
  std::size_t mismatches = 0, compared = 0;
  const double secs = timed([&] {
    const auto e = boost::train_adaboost(x, y, 50);
    const auto ref = testing::ref_adaboost(x, y, 50);
    for (const auto* m : {&x, &held})
      for (Eigen::Index i = 0; i < m->rows(); ++i) {
        ++compared;
        mismatches += boost::predict(e, m->row(i)).label != ref.predict(m->row(i));
      }
    if (e.size() != ref.stumps.size()) ++mismatches;
  });
  report("AdaBoost oracle equivalence", mismatches == 0 && secs < 30.0,
         std::to_string(mismatches) + " mismatches over " + std::to_string(compared) + " predictions, T = 50, " +
             fmt(secs, 3) + " s");
}

// --- streaming helpers -------------------------------------------------------

std::vector<session::GatedDecision> offline_decisions(const data::DecoderModel& m, const Recording& rec,
                                                      const session::EngineConfig& cfg) {
  const Eigen::MatrixXd filtered = data::preprocess(rec, Eigen::MatrixXd::Identity(12, 12), m.config);
  std::vector<session::GatedDecision> out;
  for (const auto& w : dsp::epoch_stream(rec, 250, cfg.stride, dsp::WindowLabeling::Unlabeled)) {
    session::GatedDecision d;
    d.start_sample = w.start_sample;
    const Eigen::MatrixXd win = filtered.middleCols(static_cast<Eigen::Index>(w.start_sample), 250);
    if (session::gate_window(win, cfg.gate) == session::Gate::Artifact) {
      d.gate = session::Gate::Artifact;
    } else {
      const auto p = m.decide(win, cfg.backend);
      d.raw_label = p.label;
      d.margin = p.margin;
      d.gate = session::gate(win, p.margin, cfg.gate);
    }
    out.push_back(d);
  }
  return out;
}

bool same_decisions(const std::vector<session::GatedDecision>& a, const std::vector<session::GatedDecision>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].start_sample != b[i].start_sample || a[i].raw_label != b[i].raw_label || a[i].margin != b[i].margin ||
        a[i].gate != b[i].gate)
      return false;
  return true;
}

void stream_equivalence(const Cli& cli, const fs::path& model_path, const fs::path& recording) {
  auto model = std::make_shared<data::DecoderModel>(data::load_model(model_path));
  const Recording rec = data::conform_recording(data::read_recording(recording));
  bool ok = true;
  std::size_t n = 0, artifacts = 0;

  // Command line: replay at max speed, decisions written as CSV.
  const fs::path csv = cli.work / "replay_decisions.csv";
  ok &= cli.run("stream --model " + model_path.string() + " --source replay:" + recording.string() +
                " --max-speed --decisions-out " + csv.string()) == 0;
  const auto off = offline_decisions(*model, rec, {});
  std::vector<session::GatedDecision> on;
  {
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      std::string f[6];
      for (auto& s : f) std::getline(ls, s, ',');
      session::GatedDecision d;
      d.start_sample = std::stoull(f[0]);
      d.raw_label = std::stoi(f[2]);
      d.margin = std::stod(f[3]);
      d.gate = f[4] == "accepted" ? session::Gate::Accepted
               : f[4] == "artifact" ? session::Gate::Artifact
                                    : session::Gate::LowConfidence;
      on.push_back(d);
    }
  }
  ok &= same_decisions(on, off);
  n += off.size();
  for (const auto& d : off) artifacts += d.gate == session::Gate::Artifact;

  // Library: random chunk sizes, both backends, two strides.
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<Eigen::Index> len(1, 97);
  for (auto backend : {data::Backend::Float, data::Backend::Int8}) {
    for (std::size_t stride : {125u, 50u}) {
      session::EngineConfig cfg;
      cfg.stride = stride;
      cfg.backend = backend;
      session::DecodeEngine engine(model, cfg);
      std::vector<session::GatedDecision> got;
      for (Eigen::Index t = 0; t < rec.data.cols();) {
        const Eigen::Index k = std::min(len(rng), rec.data.cols() - t);
        for (const auto& d : engine.push_samples(rec.data.middleCols(t, k))) got.push_back(d);
        t += k;
      }
      const auto ref = offline_decisions(*model, rec, cfg);
      ok &= same_decisions(got, ref);
      n += ref.size();
    }
  }
  report("stream/offline equivalence", ok,
         std::to_string(n) + " decisions identical (command-line replay, float and int8, strides 125 and 50; " +
             std::to_string(artifacts) + " artifact-gated)");
}

void latency(const fs::path& model_path, double float_acc, double int8_acc, bool have_int8) {
  auto model = std::make_shared<data::DecoderModel>(data::load_model(model_path));
  session::Session s(model, {});
  s.set_mode(session::Mode::Active);
  session::SynthLiveSource src(data::SynthConfig{}, 7, s.intent(), 20.0);
  {
    session::StreamRunner runner(s, src, {});
    runner.wait();
  }
  s.actuator().wait_idle();
  const auto lat = s.latency();
  const double gap = std::abs(float_acc - int8_acc) * 100.0;
  const bool ok = lat.n > 0 && lat.mean_ms < 50.0 && have_int8 && gap <= 2.0;
  report("latency", ok,
         "paced 20 s live session, float encoder: " + std::to_string(lat.n) + " decisions, mean " +
             fmt(lat.mean_ms, 3) + " ms, p95 " + fmt(lat.p95_ms, 3) + " ms, max " + fmt(lat.max_ms, 3) +
             " ms; benchmark accuracy float " + fmt(float_acc) + " vs int8 " + fmt(int8_acc) + " (" + fmt(gap, 3) +
             " points)");
}

void safety(const fs::path& model_path) {
  bool ok = true;
  // Exhaustive model check of the debouncer.
  std::vector<session::GatedDecision> alphabet;
  for (int label : {0, 1})
    for (auto g : {session::Gate::Accepted, session::Gate::LowConfidence, session::Gate::Artifact}) {
      session::GatedDecision d;
      d.raw_label = label;
      d.gate = g;
      alphabet.push_back(d);
    }
  std::size_t states = 0;
  for (int k = 1; k <= 5; ++k) {
    std::set<std::tuple<int, int, int, int>> seen;
    std::vector<std::pair<session::MachineState, int>> frontier{{session::MachineState{}, -1}};
    while (!frontier.empty()) {
      auto [st, last] = frontier.back();
      frontier.pop_back();
      if (!seen.insert({static_cast<int>(st.hand), st.move_streak, st.rest_streak, last}).second) continue;
      for (const auto& d : alphabet) {
        const auto step = session::step_state_machine(st, d, k);
        int next = last;
        if (step.command) {
          const int kind = static_cast<int>(step.command->kind);
          ok &= d.accepted() && kind != last;
          next = kind;
        } else if (!d.accepted()) {
          ok &= step.state.hand == st.hand && step.state.move_streak == st.move_streak &&
                step.state.rest_streak == st.rest_streak;
        }
        frontier.push_back({step.state, next});
      }
    }
    states += seen.size();
  }

  // Live sessions on a blink-heavy recording.
  auto model = std::make_shared<data::DecoderModel>(data::load_model(model_path));
  data::SynthConfig sc;
  sc.n_subjects = 1;
  sc.trials = 12;
  sc.blink_rate_per_min = 30.0;
  sc.blink_uv = 150.0;
  sc.seed = 77;
  const Recording rec = data::generate_synthetic(sc)[0].recording;
  std::size_t commands = 0, gated = 0;
  for (double theta : {0.6, 1.5}) {
    session::SessionConfig cfg;
    cfg.engine.gate.theta = theta;
    cfg.k_debounce = 2;
    session::Session s(model, cfg);
    s.set_mode(session::Mode::Active);
    for (Eigen::Index t = 0; t < rec.data.cols(); t += 25)
      s.feed(rec.data.middleCols(t, std::min<Eigen::Index>(25, rec.data.cols() - t)));
    const auto cmds = s.commands();
    for (std::size_t i = 0; i < cmds.size(); ++i) {
      ok &= cmds[i].decision.has_value() && cmds[i].decision->accepted();
      if (i > 0) ok &= cmds[i].kind != cmds[i - 1].kind;
    }
    for (const auto& d : s.decisions()) gated += !d.accepted();
    if (theta > 1.0) ok &= cmds.empty();  // margins never exceed 1
    commands += cmds.size();
    s.actuator().wait_idle();
    ok &= s.actuator().errors() == 0;
  }
  report("safety", ok,
         "model check k = 1..5 over " + std::to_string(states) + " (state, last command) pairs; live sessions issued " +
             std::to_string(commands) + " commands, none from the " + std::to_string(gated) +
             " gated decisions, none repeated");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-scb> [work-dir]\n";
    return 2;
  }
  Cli cli;
  cli.exe = fs::absolute(argv[1]);
  cli.work = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / ("scb-acceptance-" + std::to_string(getpid()));
  fs::remove_all(cli.work);
  fs::create_directories(cli.work);

  filter_contract();
  gradient_gate();
  ica_recovery();
  adaboost_oracle();

  // End-to-end benchmark through the command line.
  const fs::path data = cli.work / "data", model = cli.work / "model.scbm", loso = cli.work / "loso.json";
  bool ran = true;
  const double secs = timed([&] {
    ran &= cli.run("synth --subjects 5 --trials 15 --seed 7 --out " + data.string()) == 0;
    ran &= cli.run("train --data " + data.string() + " --out " + model.string() + " --seed 7") == 0;
    ran &= cli.run("eval --data " + data.string() + " --model " + model.string() + " --loso --seed 7 --out " +
                   loso.string()) == 0;
  });
  double mean_acc = 0.0, int8_acc = 0.0, sil_latent = 0.0, sil_raw = 0.0;
  bool have_int8 = false;
  std::size_t folds = 0;
  if (ran) {
    const auto j = read_json(loso);
    const auto& diag = j["diagnostics"];
    mean_acc = diag["mean_fold_accuracy"].get<double>();
    sil_latent = diag["silhouette_latent"].get<double>();
    sil_raw = diag["silhouette_raw"].get<double>();
    have_int8 = diag.contains("mean_fold_accuracy_int8");
    if (have_int8) int8_acc = diag["mean_fold_accuracy_int8"].get<double>();
    folds = j["folds"].size();
  }
  report("end-to-end synthetic benchmark", ran && folds == 5 && mean_acc >= 0.85 && sil_latent > sil_raw && secs < 900.0,
         "LOSO mean window accuracy " + fmt(mean_acc) + " over " + std::to_string(folds) +
             " folds, silhouette latent " + fmt(sil_latent, 3) + " vs raw " + fmt(sil_raw, 3) + ", " + fmt(secs, 4) +
             " s");

  const fs::path quantized = cli.work / "model_int8.scbm";
  if (ran) ran &= cli.run("quantize --model " + model.string() + " --data " + data.string() + " --out " +
                          quantized.string()) == 0;
  if (ran) {
    stream_equivalence(cli, quantized, data / "S01.eeg");
    latency(model, mean_acc, int8_acc, have_int8);
    safety(model);
  } else {
    report("stream/offline equivalence", false, "benchmark model unavailable");
    report("latency", false, "benchmark model unavailable");
    report("safety", false, "benchmark model unavailable");
  }

  // Determinism: the same commands again.
  const fs::path data2 = cli.work / "data2", model2 = cli.work / "model2.scbm";
  bool det = ran;
  det &= cli.run("synth --subjects 5 --trials 15 --seed 7 --out " + data2.string()) == 0;
  for (const auto* id : {"S01", "S03", "S05"}) {
    det &= same_bytes(data / (std::string(id) + ".eeg"), data2 / (std::string(id) + ".eeg"));
    det &= same_bytes(data / (std::string(id) + ".events.csv"), data2 / (std::string(id) + ".events.csv"));
  }
  det &= cli.run("train --data " + data2.string() + " --out " + model2.string() + " --seed 7") == 0;
  det &= same_bytes(model, model2);
  det &= same_bytes(model.string() + ".report.json", model2.string() + ".report.json");
  const fs::path e1 = cli.work / "eval1.json", e2 = cli.work / "eval2.json";
  det &= cli.run("eval --data " + data.string() + " --model " + model.string() + " --level trial --out " + e1.string()) == 0;
  det &= cli.run("eval --data " + data2.string() + " --model " + model2.string() + " --level trial --out " + e2.string()) == 0;
  det &= same_bytes(e1, e2);
  report("determinism", det, "synthetic data, model file, training report and evaluation report byte-identical across two runs");

  if (g_failed == 0) fs::remove_all(cli.work);
  std::cout << (g_failed == 0 ? "all criteria passed" : std::to_string(g_failed) + " criteria failed") << std::endl;
  return g_failed == 0 ? 0 : 1;
}
