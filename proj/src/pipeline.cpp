#include "hfo/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "hfo/rng.hpp"

namespace hfo::pipeline {

namespace {

constexpr std::uint64_t kSplitSalt = 1;
constexpr std::uint64_t kModelSalt = 2;
constexpr std::uint64_t kSvmSalt = 3;
constexpr std::uint64_t kFoldSalt = 4;

struct Prepared {
    std::vector<int> labels;
    std::vector<cnn::Image> images; // scalogram values, scfg.size^2 each
    std::vector<std::string> class_names;
};

Prepared prepare(const LabeledDataset& dataset, const tfr::ScalogramConfig& scfg) {
    Prepared p;
    const std::vector<EventClass> classes = profile_classes(dataset.profile);
    for (EventClass c : classes) p.class_names.push_back(to_string(c));
    p.labels.reserve(dataset.segments.size());
    p.images.reserve(dataset.segments.size());
    for (const SignalSegment& seg : dataset.segments) {
        p.labels.push_back(class_index(classes, seg.label));
        p.images.push_back(tfr::scalogram(seg, scfg).values);
    }
    return p;
}

std::vector<double> pooled_features(const cnn::Image& image, int map_size, int pool_size) {
    tfr::TimeFrequencyMap map;
    map.size = map_size;
    map.values = image;
    return tfr::mean_pool(map, pool_size);
}

// Fit one family on everything it is given (no internal split).
TrainedModel fit(const Prepared& p, const std::vector<std::size_t>& idx,
                 const PipelineConfig& cfg, std::uint64_t seed) {
    TrainedModel model;
    model.kind = cfg.kind;
    model.cfg = cfg;
    model.class_names = p.class_names;

    std::vector<int> labels;
    labels.reserve(idx.size());
    for (std::size_t i : idx) labels.push_back(p.labels[i]);

    const int classes = static_cast<int>(p.class_names.size());
    const ecoc::CodeMatrix matrix = ecoc::build_code_matrix(cfg.scheme, classes);

    if (cfg.kind == ModelKind::svm) {
        std::vector<std::vector<double>> feats;
        feats.reserve(idx.size());
        for (std::size_t i : idx)
            feats.push_back(pooled_features(p.images[i], cfg.scfg.size, cfg.pool_size));
        svm::SvmConfig scfg = cfg.svm_cfg;
        scfg.seed = rng::mix(seed, kSvmSalt);
        model.svm_model = ecoc::train_ecoc(feats, labels, matrix, scfg, p.class_names);
        return model;
    }

    std::vector<cnn::Image> images;
    images.reserve(idx.size());
    for (std::size_t i : idx) images.push_back(p.images[i]);
    cnn::TrainHyper hyper = cfg.hyper;
    hyper.seed = rng::mix(seed, kModelSalt);
    const cnn::ConvNetArch arch = cnn::ConvNetArch::compact(classes, cfg.scfg.size);
    cnn::TrainResult trained = cnn::train_convnet(images, labels, arch, hyper);

    if (cfg.kind == ModelKind::cnn) {
        model.cnn_model = std::move(trained.net);
        return model;
    }

    // hybrid: CNN features -> ECOC-SVM, same examples for both stages
    std::vector<std::vector<double>> feats;
    feats.reserve(idx.size());
    for (std::size_t i : idx)
        feats.push_back(cnn::extract_features(trained.net, p.images[i]));
    svm::SvmConfig sconf = cfg.svm_cfg;
    sconf.seed = rng::mix(seed, kSvmSalt);
    hybrid::HybridModel hm;
    hm.feature_net = std::move(trained.net);
    hm.scalogram_cfg = cfg.scfg;
    hm.ecoc_model = ecoc::train_ecoc(feats, labels, matrix, sconf, p.class_names);
    model.hybrid_model = std::move(hm);
    return model;
}

Prediction predict_from_image(const TrainedModel& model, const cnn::Image& image) {
    Prediction out;
    switch (model.kind) {
        case ModelKind::svm: {
            const auto feats =
                pooled_features(image, model.cfg.scfg.size, model.cfg.pool_size);
            const ecoc::EcocPrediction p = ecoc::ecoc_predict(*model.svm_model, feats);
            out.class_index = p.class_index;
            out.per_class_score = p.per_class_score;
            break;
        }
        case ModelKind::cnn: {
            const cnn::Forward f = cnn::forward(*model.cnn_model, {image});
            out.per_class_score = f.probabilities[0];
            out.class_index = static_cast<int>(
                std::max_element(out.per_class_score.begin(), out.per_class_score.end()) -
                out.per_class_score.begin());
            break;
        }
        case ModelKind::hybrid: {
            const auto feats =
                cnn::extract_features(model.hybrid_model->feature_net, image);
            const ecoc::EcocPrediction p =
                ecoc::ecoc_predict(model.hybrid_model->ecoc_model, feats);
            out.class_index = p.class_index;
            out.per_class_score = p.per_class_score;
            break;
        }
    }
    return out;
}

eval::EvaluationReport report_on(const TrainedModel& model, const Prepared& p,
                                 const std::vector<std::size_t>& idx) {
    std::vector<int> truth, pred;
    std::vector<std::vector<double>> scores(p.class_names.size());
    for (std::size_t i : idx) {
        const Prediction pr = predict_from_image(model, p.images[i]);
        truth.push_back(p.labels[i]);
        pred.push_back(pr.class_index);
        for (std::size_t j = 0; j < scores.size(); ++j)
            scores[j].push_back(pr.per_class_score[j]);
    }
    return eval::build_report(truth, pred, scores, p.class_names);
}

} // namespace

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::svm: return "svm";
        case ModelKind::cnn: return "cnn";
        case ModelKind::hybrid: return "hybrid";
    }
    throw std::logic_error("unreachable model kind");
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "svm") return ModelKind::svm;
    if (s == "cnn") return ModelKind::cnn;
    if (s == "hybrid") return ModelKind::hybrid;
    throw std::invalid_argument("unknown model kind: " + s);
}

TrainOutcome train(const LabeledDataset& dataset, const PipelineConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    TrainOutcome out;

    if (cfg.kind == ModelKind::hybrid) {
        // canonical hybrid path
        cnn::TrainHyper hyper = cfg.hyper;
        hyper.seed = rng::mix(cfg.seed, kModelSalt);
        svm::SvmConfig sconf = cfg.svm_cfg;
        sconf.seed = rng::mix(cfg.seed, kSvmSalt);
        const cnn::ConvNetArch arch = cnn::ConvNetArch::compact(
            static_cast<int>(profile_classes(dataset.profile).size()), cfg.scfg.size);
        hybrid::HybridTrainResult r =
            hybrid::train_hybrid(dataset, arch, hyper, cfg.scheme, sconf,
                                 rng::mix(cfg.seed, kSplitSalt), cfg.scfg, cfg.train_frac);
        out.model.kind = cfg.kind;
        out.model.cfg = cfg;
        out.model.class_names = r.report.class_names;
        out.model.hybrid_model = std::move(r.model);
        out.report = std::move(r.report);
        out.report.runtime_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return out;
    }

    const Prepared p = prepare(dataset, cfg.scfg);
    const eval::SplitIndices split =
        eval::stratified_split(p.labels, cfg.train_frac, rng::mix(cfg.seed, kSplitSalt));
    out.model = fit(p, split.train, cfg, cfg.seed);
    out.report = report_on(out.model, p, split.test);
    out.report.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

Prediction predict(const TrainedModel& model, const SignalSegment& signal) {
    const tfr::TimeFrequencyMap map = tfr::scalogram(signal, model.cfg.scfg);
    return predict_from_image(model, map.values);
}

eval::EvaluationReport evaluate(const TrainedModel& model, const LabeledDataset& dataset) {
    const auto t0 = std::chrono::steady_clock::now();
    const Prepared p = prepare(dataset, model.cfg.scfg);
    std::vector<std::size_t> all(p.labels.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    eval::EvaluationReport rep = report_on(model, p, all);
    rep.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

KfoldOutcome kfold(const LabeledDataset& dataset, const PipelineConfig& cfg, int k) {
    const auto t0 = std::chrono::steady_clock::now();
    const Prepared p = prepare(dataset, cfg.scfg);
    const auto folds = eval::kfold_indices(p.labels, k, rng::mix(cfg.seed, kFoldSalt));

    KfoldOutcome out;
    std::vector<int> pooled_truth(p.labels.size()), pooled_pred(p.labels.size());
    std::vector<std::vector<double>> pooled_scores(
        p.class_names.size(), std::vector<double>(p.labels.size(), 0.0));

    for (std::size_t f = 0; f < folds.size(); ++f) {
        const TrainedModel model =
            fit(p, folds[f].train, cfg, rng::mix(cfg.seed, 100 + f));
        std::vector<int> truth, pred;
        std::vector<std::vector<double>> scores(p.class_names.size());
        for (std::size_t i : folds[f].test) {
            const Prediction pr = predict_from_image(model, p.images[i]);
            truth.push_back(p.labels[i]);
            pred.push_back(pr.class_index);
            pooled_truth[i] = p.labels[i];
            pooled_pred[i] = pr.class_index;
            for (std::size_t j = 0; j < scores.size(); ++j) {
                scores[j].push_back(pr.per_class_score[j]);
                pooled_scores[j][i] = pr.per_class_score[j];
            }
        }
        out.fold_reports.push_back(eval::build_report(truth, pred, scores, p.class_names));
    }
    out.pooled = eval::build_report(pooled_truth, pooled_pred, pooled_scores, p.class_names);
    out.pooled.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

} // namespace hfo::pipeline
