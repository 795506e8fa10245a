#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace hfo::eval {

struct ConfusionMatrix {
    int classes = 0;
    std::vector<std::int64_t> counts; // row = true class, column = predicted

    std::int64_t at(int t, int p) const { return counts[static_cast<std::size_t>(t) * classes + p]; }
    std::int64_t& at(int t, int p) { return counts[static_cast<std::size_t>(t) * classes + p]; }
    std::int64_t total() const;
};

// One-vs-rest reduction for a single class.
struct ConfusionCounts {
    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct ClassMetrics {
    double precision = 0.0;
    double f1 = 0.0;
    double specificity = 0.0;
    double sensitivity = 0.0;
    double accuracy = 0.0;
    bool zero_division = false; // some denominator was 0 and the metric was set to 0
};

struct EvaluationReport {
    ConfusionMatrix cm;
    std::vector<ClassMetrics> per_class;
    ClassMetrics macro;
    std::vector<std::vector<std::pair<double, double>>> roc; // per class, (fpr,tpr)
    std::vector<double> auc;                                 // per class
    std::vector<std::string> class_names;
    double runtime_s = 0.0; // informational; never serialized into report files
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

ConfusionMatrix confusion_matrix(const std::vector<int>& truth,
                                 const std::vector<int>& pred, int classes);

ConfusionCounts one_vs_rest(const ConfusionMatrix& cm, int cls);

// Accuracy, precision, F1, sensitivity, specificity per class plus their
// unweighted macro average. Zero denominators yield 0 with the flag set.
std::pair<std::vector<ClassMetrics>, ClassMetrics> metrics_from_cm(const ConfusionMatrix& cm);

// Per class, the split nearest to train_frac; deterministic shuffle by seed.
SplitIndices stratified_split(const std::vector<int>& labels, double train_frac,
                              std::uint64_t seed);

// Stratified k folds; test sets partition the dataset, per-class fold sizes
// differ by at most one.
std::vector<SplitIndices> kfold_indices(const std::vector<int>& labels, int k,
                                        std::uint64_t seed);

struct RocResult {
    std::vector<std::pair<double, double>> points; // (fpr, tpr)
    double auc = 0.0;
};

// Threshold sweep over distinct score values, trapezoidal AUC. Ties collapse
// onto one point, which matches the midpoint rank convention.
RocResult roc_auc(const std::vector<double>& scores, const std::vector<int>& truth_binary);

// Assembles the full report from predictions and per-class ranking scores
// (scores[j][i] ranks example i for class j; pass empty to skip ROC).
EvaluationReport build_report(const std::vector<int>& truth, const std::vector<int>& pred,
                              const std::vector<std::vector<double>>& scores,
                              const std::vector<std::string>& class_names);

} // namespace hfo::eval
