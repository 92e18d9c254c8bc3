// scb: synthetic data, offline training and evaluation, and live streaming.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "scb/common/error.hpp"
#include "scb/data/pipeline.hpp"
#include "scb/data/recording_file.hpp"
#include "scb/data/synthetic.hpp"
#include "scb/session/messages.hpp"
#include "scb/session/runner.hpp"
#include "scb/session/service.hpp"
#include "scb/session/session.hpp"
#include "scb/session/sources.hpp"

namespace fs = std::filesystem;
using namespace scb;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

volatile std::sig_atomic_t g_interrupted = 0;

struct Common {
  std::uint64_t seed = 7;
  bool quiet = false;
};

data::Progress progress_for(const Common& c) {
  if (c.quiet) return {};
  return [](const std::string& msg) { std::cerr << msg << '\n'; };
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
}

data::WindowDataset load_windows(const fs::path& dir, const data::PipelineConfig& cfg, const Common& c) {
  std::vector<data::PreparedRecording> prep;
  for (const auto& r : data::read_dataset(dir)) {
    prep.push_back(data::prepare_recording(r.subject, r.recording, cfg));
    if (!c.quiet)
      std::cerr << r.subject << ": " << r.recording.n_samples() << " samples, " << prep.back().rejected.size()
                << " ICA components removed\n";
  }
  auto ds = data::build_dataset(prep, cfg);
  if (ds.size() == 0) throw Error(Errc::EmptyInput, "no labelled windows in " + dir.string());
  return ds;
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
  data::SynthConfig cfg;
  fs::path out;
};

void add_synth(CLI::App& app, SynthArgs& a, Common& c, std::function<int()>& run) {
  auto* cmd = app.add_subcommand("synth", "Generate a synthetic EEG dataset (one .eeg + .events.csv per subject)");
  cmd->add_option("--subjects", a.cfg.n_subjects, "Number of subjects")->capture_default_str();
  cmd->add_option("--trials", a.cfg.trials, "Move trials per subject")->capture_default_str();
  cmd->add_option("--out", a.out, "Output directory")->required();
  cmd->add_option("--move-s", a.cfg.move_s, "Move interval length (s)")->capture_default_str();
  cmd->add_option("--rest-s", a.cfg.rest_s, "Rest gap length (s)")->capture_default_str();
  cmd->add_option("--mu-uv", a.cfg.mu_uv, "Mu amplitude (uV)")->capture_default_str();
  cmd->add_option("--mu-depth", a.cfg.mu_depth, "Mu desynchronisation depth")->capture_default_str();
  cmd->add_option("--beta-uv", a.cfg.beta_uv, "Beta amplitude (uV)")->capture_default_str();
  cmd->add_option("--beta-depth", a.cfg.beta_depth, "Beta desynchronisation depth")->capture_default_str();
  cmd->add_option("--noise-uv", a.cfg.noise_uv, "Pink noise RMS (uV)")->capture_default_str();
  cmd->add_option("--blink-rate", a.cfg.blink_rate_per_min, "Blinks per minute")->capture_default_str();
  cmd->add_option("--subject-spread", a.cfg.subject_offset_spread, "Per-subject rhythm gain spread")
      ->capture_default_str();
  cmd->add_flag("--ers", a.cfg.ers, "Add a beta rebound after each move");
  cmd->callback([&] {
    run = [&] {
      a.cfg.seed = c.seed;
      fs::create_directories(a.out);
      for (const auto& s : data::generate_synthetic(a.cfg)) {
        data::write_recording(a.out / (s.id + ".eeg"), s.recording);
        if (!c.quiet) std::cerr << "wrote " << (a.out / (s.id + ".eeg")).string() << '\n';
      }
      return 0;
    };
  });
}

// --- train -----------------------------------------------------------------

struct PipelineArgs {
  int max_epochs = -1, patience = -1;
  bool no_ica = false;
  std::vector<int> rounds;
  std::size_t stride = 0;
};

void add_pipeline_options(CLI::App* cmd, PipelineArgs& p) {
  cmd->add_option("--max-epochs", p.max_epochs, "Encoder epoch cap");
  cmd->add_option("--patience", p.patience, "Early-stopping patience");
  cmd->add_flag("--no-ica", p.no_ica, "Skip ICA artifact removal");
  cmd->add_option("--rounds", p.rounds, "Boosting round grid")->delimiter(',');
  cmd->add_option("--stride", p.stride, "Training window stride (samples)");
}

data::PipelineConfig pipeline_from(const PipelineArgs& p, std::uint64_t seed) {
  data::PipelineConfig cfg;
  if (p.max_epochs >= 0) cfg.train.max_epochs = p.max_epochs;
  if (p.patience >= 0) cfg.train.patience = p.patience;
  if (p.no_ica) cfg.ica = false;
  if (!p.rounds.empty()) cfg.rounds_grid = p.rounds;
  if (p.stride > 0) cfg.stride = p.stride;
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

struct TrainArgs {
  fs::path data, out, report;
  PipelineArgs pipeline;
};

void add_train(CLI::App& app, TrainArgs& a, Common& c, std::function<int()>& run) {
  auto* cmd = app.add_subcommand("train", "Fit the decoder (ICA, encoder, boosting) and write a model file");
  cmd->add_option("--data", a.data, "Dataset directory")->required();
  cmd->add_option("--out", a.out, "Model file (.scbm)")->required();
  cmd->add_option("--report", a.report, "Validation report (default: <out>.report.json)");
  add_pipeline_options(cmd, a.pipeline);
  cmd->callback([&] {
    run = [&] {
      const auto cfg = pipeline_from(a.pipeline, c.seed);
      const auto ds = load_windows(a.data, cfg, c);
      data::FitInfo info;
      const auto model = data::fit_decoder(ds, all_indices(ds.size()), cfg, cfg.seed, &info, progress_for(c));
      data::save_model(a.out, model);
      auto report = data::evaluate_model(model, ds, info.val, boost::Level::Window);
      report.diagnostics["best_epoch"] = info.best_epoch;
      report.diagnostics["rounds"] = info.rounds;
      report.diagnostics["stumps"] = static_cast<double>(model.ensemble.stumps.size());
      const fs::path rp = a.report.empty() ? fs::path(a.out.string() + ".report.json") : a.report;
      write_text(rp, boost::to_json(report).dump(2) + "\n");
      if (!c.quiet)
        std::cerr << "validation accuracy " << report.accuracy << " on " << report.n << " windows; wrote "
                  << a.out.string() << '\n';
      return 0;
    };
  });
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  fs::path data, model, out;
  bool loso = false;
  std::string level = "window";
  std::string backend = "float";
};

void add_eval(CLI::App& app, EvalArgs& a, Common& c, std::function<int()>& run) {
  auto* cmd = app.add_subcommand(
      "eval", "Evaluate a model on a dataset, or retrain it leave-one-subject-out with --loso");
  cmd->add_option("--data", a.data, "Dataset directory")->required();
  cmd->add_option("--model", a.model, "Model file; with --loso only its pipeline settings are used")->required();
  cmd->add_flag("--loso", a.loso, "Leave-one-subject-out: one retrained decoder per held-out subject");
  cmd->add_option("--level", a.level, "window | trial")->check(CLI::IsMember({"window", "trial"}))->capture_default_str();
  cmd->add_option("--backend", a.backend, "Encoder backend for holdout evaluation: float | int8 | fp16")
      ->check(CLI::IsMember({"float", "int8", "fp16"}))
      ->capture_default_str();
  cmd->add_option("--out", a.out, "Report path (default: stdout)");
  cmd->callback([&] {
    run = [&] {
      const auto model = data::load_model(a.model);
      auto cfg = model.config;
      cfg.seed = c.seed;
      const auto ds = load_windows(a.data, cfg, c);
      const auto level = a.level == "trial" ? boost::Level::Trial : boost::Level::Window;
      boost::EvalReport report;
      if (a.loso) {
        auto loso = data::run_loso(ds, cfg, progress_for(c));
        report = level == boost::Level::Trial ? loso.trial : loso.window;
        try {
          report.diagnostics["mean_fold_accuracy_int8"] = data::loso_accuracy(loso, ds, data::Backend::Int8);
        } catch (const Error& e) {
          if (e.code() != Errc::CalibrationTooSmall) throw;
          if (!c.quiet) std::cerr << "skipping int8 folds: " << e.what() << '\n';
        }
      } else {
        report = data::evaluate_model(model, ds, all_indices(ds.size()), level, data::parse_backend(a.backend));
      }
      const std::string text = boost::to_json(report).dump(2) + "\n";
      if (a.out.empty())
        std::cout << text;
      else
        write_text(a.out, text);
      if (!c.quiet) std::cerr << "accuracy " << report.accuracy << " over " << report.n << " " << a.level << "s\n";
      return 0;
    };
  });
}

// --- quantize --------------------------------------------------------------

struct QuantizeArgs {
  fs::path model, data, out;
  std::string precision = "int8";
  std::size_t calibration = 512;
};

void add_quantize(CLI::App& app, QuantizeArgs& a, Common& c, std::function<int()>& run) {
  auto* cmd = app.add_subcommand("quantize", "Attach INT8 or FP16 encoder parameters calibrated on a dataset");
  cmd->add_option("--model", a.model, "Input model file")->required();
  cmd->add_option("--data", a.data, "Calibration dataset directory")->required();
  cmd->add_option("--out", a.out, "Output model file")->required();
  cmd->add_option("--precision", a.precision, "int8 | fp16")->check(CLI::IsMember({"int8", "fp16"}))->capture_default_str();
  cmd->add_option("--calibration", a.calibration, "Maximum calibration windows")->capture_default_str();
  cmd->callback([&] {
    run = [&] {
      auto model = data::load_model(a.model);
      const auto ds = load_windows(a.data, model.config, c);
      model.quantized = data::quantize_model(model, ds, all_indices(ds.size()), cae::parse_precision(a.precision),
                                             a.calibration);
      data::save_model(a.out, model);
      if (!c.quiet) {
        const auto b = data::parse_backend(a.precision);
        const auto f = data::evaluate_model(model, ds, all_indices(ds.size()), boost::Level::Window);
        const auto q = data::evaluate_model(model, ds, all_indices(ds.size()), boost::Level::Window, b);
        std::cerr << "accuracy float " << f.accuracy << ", " << a.precision << " " << q.accuracy << '\n';
      }
      return 0;
    };
  });
}

// --- stream ----------------------------------------------------------------

struct StreamArgs {
  fs::path model;
  std::string source = "synth-live";
  std::string serve;
  std::size_t stride = 125;
  double theta = 0.6, amp_limit = 100.0;
  int debounce = 3;
  bool max_speed = false;
  std::string backend = "float";
  std::string mode = "active";
  std::string actuator = "sim";
  int protocol = -1;
  double cue_s = 4.0, rest_s = 3.0;
  double duration_s = 0.0;
  double passive_period_s = 4.0;
  std::size_t chunk = 10;
  fs::path latency_out, report_out, decisions_out;
};

std::unique_ptr<session::ActuatorLink> make_link(const std::string& spec) {
  if (spec == "sim") return std::make_unique<session::SimulatedActuator>();
  if (spec.rfind("serial:", 0) == 0) return std::make_unique<session::SerialActuator>(spec.substr(7));
  throw CLI::ValidationError("--actuator", "expected sim or serial:<device>");
}

void add_stream(CLI::App& app, StreamArgs& a, Common& c, std::function<int()>& run) {
  auto* cmd = app.add_subcommand("stream", "Run the live decoder on a replayed file or a live synthetic subject");
  cmd->add_option("--model", a.model, "Model file")->required();
  cmd->add_option("--source", a.source, "replay:<file.eeg> | synth-live")->capture_default_str();
  cmd->add_option("--serve", a.serve, "Session service address host:port");
  cmd->add_option("--stride", a.stride, "Decision stride (samples)")->capture_default_str();
  cmd->add_option("--theta", a.theta, "Confidence gate on |margin|")->capture_default_str();
  cmd->add_option("--amp-limit", a.amp_limit, "Artifact gate, peak-to-peak uV")->capture_default_str();
  cmd->add_option("--debounce", a.debounce, "Consecutive accepted decisions per command")->capture_default_str();
  cmd->add_flag("--max-speed", a.max_speed, "Do not pace the source on the wall clock");
  cmd->add_option("--backend", a.backend, "float | int8 | fp16")
      ->check(CLI::IsMember({"float", "int8", "fp16"}))
      ->capture_default_str();
  cmd->add_option("--mode", a.mode, "Initial mode: active | passive | idle")
      ->check(CLI::IsMember({"active", "passive", "idle"}))
      ->capture_default_str();
  cmd->add_option("--passive-period", a.passive_period_s, "Passive open/close cycle (s)")->capture_default_str();
  cmd->add_option("--actuator", a.actuator, "sim | serial:<device>")->capture_default_str();
  cmd->add_option("--protocol", a.protocol, "Run a cued protocol with this many trials");
  cmd->add_option("--cue-s", a.cue_s, "Cue length (s)")->capture_default_str();
  cmd->add_option("--rest-s", a.rest_s, "Rest gap before each cue (s)")->capture_default_str();
  cmd->add_option("--duration", a.duration_s, "Stop a synth-live source after this many seconds");
  cmd->add_option("--chunk", a.chunk, "Frames per source chunk")->capture_default_str();
  cmd->add_option("--latency-out", a.latency_out, "Write latency statistics JSON");
  cmd->add_option("--report-out", a.report_out, "Write the protocol's trial-level report JSON");
  cmd->add_option("--decisions-out", a.decisions_out, "Write every decision as CSV");
  cmd->callback([&] {
    run = [&] {
      if (a.debounce < 1) throw CLI::ValidationError("--debounce", "must be >= 1");
      if (a.stride < 1) throw CLI::ValidationError("--stride", "must be >= 1");
      auto model = std::make_shared<data::DecoderModel>(data::load_model(a.model));

      session::SessionConfig cfg;
      cfg.engine.stride = a.stride;
      cfg.engine.gate.theta = a.theta;
      cfg.engine.gate.amp_limit_uv = a.amp_limit;
      cfg.engine.backend = data::parse_backend(a.backend);
      cfg.k_debounce = a.debounce;
      cfg.passive_period_s = a.passive_period_s;
      cfg.seed = c.seed;
      session::Session sess(model, cfg, make_link(a.actuator));

      std::unique_ptr<session::SampleSource> source;
      if (a.source == "synth-live") {
        std::optional<double> dur;
        if (a.duration_s > 0.0) dur = a.duration_s;
        source = std::make_unique<session::SynthLiveSource>(data::SynthConfig{}, c.seed, sess.intent(), dur);
      } else if (a.source.rfind("replay:", 0) == 0) {
        source = std::make_unique<session::ReplaySource>(data::read_recording(a.source.substr(7)));
      } else {
        throw CLI::ValidationError("--source", "expected replay:<file> or synth-live");
      }
      if (a.source == "synth-live" && a.duration_s <= 0.0 && a.serve.empty() && a.protocol < 0)
        throw CLI::ValidationError("--duration", "an endless synth-live source needs --duration, --protocol or --serve");

      if (!c.quiet)
        sess.set_listener([](const nlohmann::ordered_json& j) { std::cerr << j.dump() << '\n'; });

      std::unique_ptr<session::SessionServer> server;
      if (!a.serve.empty()) {
        const auto [host, port] = session::parse_endpoint(a.serve);
        server = std::make_unique<session::SessionServer>(sess, host, port);
        std::cerr << "serving on ws://" << host << ":" << server->port() << "/\n";
      }
      sess.set_mode(session::parse_mode(a.mode));

      if (a.protocol >= 0 && a.max_speed && !server) {
        // Synchronous and deterministic.
        session::run_trial_protocol(sess, *source, {a.protocol, a.cue_s, a.rest_s}, a.chunk);
      } else {
        std::signal(SIGINT, [](int) { g_interrupted = 1; });
        std::signal(SIGTERM, [](int) { g_interrupted = 1; });
        session::StreamOptions opts;
        opts.chunk_frames = a.chunk;
        opts.max_speed = a.max_speed;
        session::StreamRunner runner(sess, *source, opts);
        if (a.protocol >= 0) sess.start_protocol({a.protocol, a.cue_s, a.rest_s});
        bool started = a.protocol >= 0;
        while (!runner.finished() && !g_interrupted) {
          std::this_thread::sleep_for(std::chrono::milliseconds(50));
          if (started && !sess.protocol_running() && !server) break;
        }
        runner.request_stop();
        runner.wait();
        sess.stop();
        if (runner.dropped() > 0) std::cerr << "dropped " << runner.dropped() << " chunks\n";
      }
      sess.actuator().wait_idle();
      if (server) server->stop();

      const auto decisions = sess.decisions();
      if (!a.decisions_out.empty()) {
        std::ostringstream csv;
        csv << "start_sample,end_sample,label,margin,gate,latency_ms\n";
        csv.precision(17);
        for (const auto& d : decisions)
          csv << d.start_sample << ',' << d.end_sample << ',' << d.raw_label << ',' << d.margin << ','
              << session::gate_name(d.gate) << ',' << d.latency_ms << '\n';
        write_text(a.decisions_out, csv.str());
      }
      if (!decisions.empty()) {
        const auto lat = sess.latency();
        const std::string text = session::to_json(lat).dump(2) + "\n";
        if (a.latency_out.empty()) {
          if (!c.quiet) std::cerr << text;
        } else {
          write_text(a.latency_out, text);
        }
      }
      if (auto p = sess.last_protocol()) {
        if (!c.quiet)
          std::cerr << "protocol: " << p->summary.completed << "/" << p->summary.trials << " trials, accuracy "
                    << p->summary.accuracy << ", TP rate " << p->summary.tp_rate << ", FP rate "
                    << p->summary.fp_rate << (p->summary.aborted ? " (aborted)" : "") << '\n';
        if (!a.report_out.empty()) {
          if (p->ledger.empty()) throw Error(Errc::EmptyInput, "protocol completed no trials");
          write_text(a.report_out, boost::to_json(session::protocol_report(p->ledger)).dump(2) + "\n");
        }
      }
      if (sess.actuator().errors() > 0) std::cerr << sess.actuator().errors() << " actuator errors\n";
      return 0;
    };
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scb: EEG motor-intent decoder"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--seed", common.seed, "Seed for every random choice")->capture_default_str();
  app.add_flag("-q,--quiet", common.quiet, "Suppress progress output");

  std::function<int()> run;
  SynthArgs synth;
  TrainArgs train;
  EvalArgs eval;
  QuantizeArgs quant;
  StreamArgs stream;
  add_synth(app, synth, common, run);
  add_train(app, train, common, run);
  add_eval(app, eval, common, run);
  add_quantize(app, quant, common, run);
  add_stream(app, stream, common, run);
  // Subcommand options may also carry --seed and --quiet.
  for (auto* sub : app.get_subcommands({})) {
    sub->add_option("--seed", common.seed, "Seed for every random choice");
    sub->add_flag("-q,--quiet", common.quiet, "Suppress progress output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    return run();
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}
