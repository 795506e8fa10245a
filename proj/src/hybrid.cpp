#include "hfo/hybrid.hpp"

#include <chrono>
#include <stdexcept>

namespace hfo::hybrid {

namespace {

std::vector<std::string> profile_class_names(const std::string& profile) {
    std::vector<std::string> names;
    for (EventClass c : profile_classes(profile)) names.push_back(to_string(c));
    return names;
}

} // namespace

HybridTrainResult train_hybrid(const LabeledDataset& dataset, const cnn::ConvNetArch& arch,
                               const cnn::TrainHyper& hyper, ecoc::CodingScheme scheme,
                               const svm::SvmConfig& svm_cfg, std::uint64_t split_seed,
                               const tfr::ScalogramConfig& scfg, double train_frac) {
    if (arch.input_size != scfg.size)
        throw std::invalid_argument("train_hybrid: network input size must match scalogram size");
    const auto t0 = std::chrono::steady_clock::now();

    const std::vector<EventClass> classes = profile_classes(dataset.profile);
    std::vector<int> labels;
    labels.reserve(dataset.segments.size());
    std::vector<cnn::Image> images;
    images.reserve(dataset.segments.size());
    for (const SignalSegment& seg : dataset.segments) {
        labels.push_back(class_index(classes, seg.label));
        images.push_back(tfr::scalogram(seg, scfg).values);
    }

    const eval::SplitIndices split = eval::stratified_split(labels, train_frac, split_seed);

    std::vector<cnn::Image> train_images;
    std::vector<int> train_labels;
    for (std::size_t i : split.train) {
        train_images.push_back(images[i]);
        train_labels.push_back(labels[i]);
    }

    cnn::TrainResult trained = cnn::train_convnet(train_images, train_labels, arch, hyper);

    std::vector<std::vector<double>> train_features;
    train_features.reserve(split.train.size());
    for (std::size_t i : split.train)
        train_features.push_back(cnn::extract_features(trained.net, images[i]));

    const ecoc::CodeMatrix matrix =
        ecoc::build_code_matrix(scheme, static_cast<int>(classes.size()));
    HybridTrainResult result;
    result.model.feature_net = std::move(trained.net);
    result.model.scalogram_cfg = scfg;
    result.model.ecoc_model = ecoc::train_ecoc(train_features, train_labels, matrix,
                                               svm_cfg, profile_class_names(dataset.profile));
    result.split = split;

    std::vector<int> truth, pred;
    std::vector<std::vector<double>> scores(classes.size());
    for (std::size_t i : split.test) {
        const auto features = cnn::extract_features(result.model.feature_net, images[i]);
        const ecoc::EcocPrediction p = ecoc::ecoc_predict(result.model.ecoc_model, features);
        truth.push_back(labels[i]);
        pred.push_back(p.class_index);
        for (std::size_t j = 0; j < classes.size(); ++j)
            scores[j].push_back(p.per_class_score[j]);
    }
    result.report = eval::build_report(truth, pred, scores,
                                       profile_class_names(dataset.profile));
    result.report.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

ecoc::EcocPrediction hybrid_predict(const HybridModel& model, const SignalSegment& signal) {
    const tfr::TimeFrequencyMap map = tfr::scalogram(signal, model.scalogram_cfg);
    const std::vector<double> features = cnn::extract_features(model.feature_net, map.values);
    return ecoc::ecoc_predict(model.ecoc_model, features);
}

} // namespace hfo::hybrid
