#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hfo/hybrid.hpp"

namespace hfo::pipeline {

enum class ModelKind { svm, cnn, hybrid };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

// Everything needed to train any of the three model families; embedded in
// saved model files so k-fold evaluation can retrain per fold.
struct PipelineConfig {
    ModelKind kind = ModelKind::svm;
    tfr::ScalogramConfig scfg;
    ecoc::CodingScheme scheme = ecoc::CodingScheme::one_vs_all;
    svm::SvmConfig svm_cfg;
    cnn::TrainHyper hyper;
    int pool_size = 16; // flat-SVM features: maps mean-pooled to pool_size^2
    double train_frac = 0.7;
    std::uint64_t seed = 0;
};

struct TrainedModel {
    ModelKind kind = ModelKind::svm;
    PipelineConfig cfg;
    std::vector<std::string> class_names;
    std::optional<ecoc::EcocModel> svm_model;
    std::optional<cnn::ConvNet> cnn_model;
    std::optional<hybrid::HybridModel> hybrid_model;
};

struct TrainOutcome {
    TrainedModel model;
    eval::EvaluationReport report; // held-out split
    std::vector<cnn::EpochStats> history; // cnn / hybrid families
};

struct Prediction {
    int class_index = 0;
    std::vector<double> per_class_score;
};

// Stratified train/test split, fit on the train side, report on the test
// side. All randomness flows from cfg.seed.
TrainOutcome train(const LabeledDataset& dataset, const PipelineConfig& cfg);

Prediction predict(const TrainedModel& model, const SignalSegment& signal);

// Evaluate an already-trained model on every segment of a dataset.
eval::EvaluationReport evaluate(const TrainedModel& model, const LabeledDataset& dataset);

struct KfoldOutcome {
    std::vector<eval::EvaluationReport> fold_reports;
    eval::EvaluationReport pooled; // every example scored by its held-out fold
};

// Stratified k-fold cross-validation retraining a fresh model per fold from
// the stored configuration.
KfoldOutcome kfold(const LabeledDataset& dataset, const PipelineConfig& cfg, int k);

} // namespace hfo::pipeline
