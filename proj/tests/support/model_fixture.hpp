#pragma once

#include <memory>
#include <numeric>

#include "scb/data/pipeline.hpp"
#include "scb/data/synthetic.hpp"

namespace scb::testing {

inline data::PipelineConfig quick_pipeline() {
  data::PipelineConfig p;
  p.ica = false;
  p.train.max_epochs = 20;
  p.train.patience = 5;
  p.rounds_grid = {50};
  return p;
}

// Small decoder trained once per process on three synthetic subjects, with
// INT8 parameters attached.
inline std::shared_ptr<const data::DecoderModel> quick_model() {
  static const std::shared_ptr<const data::DecoderModel> model = [] {
    data::SynthConfig sc;
    sc.n_subjects = 3;
    sc.trials = 8;
    sc.seed = 101;
    const auto p = quick_pipeline();
    std::vector<data::PreparedRecording> prep;
    for (const auto& s : data::generate_synthetic(sc)) prep.push_back(data::prepare_recording(s.id, s.recording, p));
    const auto ds = data::build_dataset(prep, p);
    std::vector<std::size_t> all(ds.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    auto m = std::make_shared<data::DecoderModel>(data::fit_decoder(ds, all, p, 5));
    m->quantized = data::quantize_model(*m, ds, all, cae::Precision::Int8);
    return std::shared_ptr<const data::DecoderModel>(m);
  }();
  return model;
}

}  // namespace scb::testing
