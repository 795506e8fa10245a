#pragma once

#include <cstdint>

#include "hfo/convnet.hpp"
#include "hfo/ecoc.hpp"
#include "hfo/eval.hpp"
#include "hfo/signal.hpp"
#include "hfo/tfr.hpp"

namespace hfo::hybrid {

// Scalogram -> CNN feature extractor -> ECOC-SVM classifier.
struct HybridModel {
    cnn::ConvNet feature_net;
    ecoc::EcocModel ecoc_model;
    tfr::ScalogramConfig scalogram_cfg;
};

struct HybridTrainResult {
    HybridModel model;
    eval::EvaluationReport report; // held-out split
    eval::SplitIndices split;
};

// Pipeline: scalograms -> stratified split -> CNN trained on the train side
// -> penultimate-layer features -> ECOC-SVM on those features -> evaluation
// on the held-out features. The CNN and the SVM stage see the same split.
HybridTrainResult train_hybrid(const LabeledDataset& dataset, const cnn::ConvNetArch& arch,
                               const cnn::TrainHyper& hyper, ecoc::CodingScheme scheme,
                               const svm::SvmConfig& svm_cfg, std::uint64_t split_seed,
                               const tfr::ScalogramConfig& scfg, double train_frac = 0.7);

// ecoc_predict(extract_features(scalogram(signal))).
ecoc::EcocPrediction hybrid_predict(const HybridModel& model, const SignalSegment& signal);

} // namespace hfo::hybrid
