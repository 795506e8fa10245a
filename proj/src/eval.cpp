#include "hfo/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hfo/rng.hpp"

namespace hfo::eval {

std::int64_t ConfusionMatrix::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

ConfusionMatrix confusion_matrix(const std::vector<int>& truth,
                                 const std::vector<int>& pred, int classes) {
    if (truth.size() != pred.size())
        throw std::invalid_argument("confusion_matrix: length mismatch");
    if (classes < 1) throw std::invalid_argument("confusion_matrix: classes must be >= 1");
    ConfusionMatrix cm;
    cm.classes = classes;
    cm.counts.assign(static_cast<std::size_t>(classes) * classes, 0);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || truth[i] >= classes || pred[i] < 0 || pred[i] >= classes)
            throw std::invalid_argument("confusion_matrix: class index out of range");
        ++cm.at(truth[i], pred[i]);
    }
    return cm;
}

ConfusionCounts one_vs_rest(const ConfusionMatrix& cm, int cls) {
    ConfusionCounts c;
    const std::int64_t total = cm.total();
    c.tp = cm.at(cls, cls);
    for (int i = 0; i < cm.classes; ++i) {
        if (i == cls) continue;
        c.fp += cm.at(i, cls);
        c.fn += cm.at(cls, i);
    }
    c.tn = total - c.tp - c.fp - c.fn;
    return c;
}

namespace {

double safe_div(std::int64_t num, std::int64_t den, bool& flag) {
    if (den == 0) {
        flag = true;
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

ClassMetrics metrics_from_counts(const ConfusionCounts& c) {
    ClassMetrics m;
    m.accuracy = safe_div(c.tp + c.tn, c.tp + c.fp + c.fn + c.tn, m.zero_division);
    m.precision = safe_div(c.tp, c.tp + c.fp, m.zero_division);
    m.f1 = safe_div(2 * c.tp, 2 * c.tp + c.fp + c.fn, m.zero_division);
    m.sensitivity = safe_div(c.tp, c.tp + c.fn, m.zero_division);
    if (c.fp + c.tn == 0) {
        m.zero_division = true;
        m.specificity = 0.0;
    } else {
        m.specificity =
            1.0 - static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
    }
    return m;
}

} // namespace

std::pair<std::vector<ClassMetrics>, ClassMetrics> metrics_from_cm(const ConfusionMatrix& cm) {
    if (cm.classes == 0 || cm.total() == 0)
        throw std::invalid_argument("metrics_from_cm: empty confusion matrix");
    std::vector<ClassMetrics> per;
    per.reserve(cm.classes);
    ClassMetrics macro;
    for (int j = 0; j < cm.classes; ++j) {
        per.push_back(metrics_from_counts(one_vs_rest(cm, j)));
        macro.precision += per.back().precision;
        macro.f1 += per.back().f1;
        macro.specificity += per.back().specificity;
        macro.sensitivity += per.back().sensitivity;
        macro.accuracy += per.back().accuracy;
        macro.zero_division = macro.zero_division || per.back().zero_division;
    }
    const double inv = 1.0 / cm.classes;
    macro.precision *= inv;
    macro.f1 *= inv;
    macro.specificity *= inv;
    macro.sensitivity *= inv;
    macro.accuracy *= inv;
    return {std::move(per), macro};
}

namespace {

std::vector<std::vector<std::size_t>> indices_by_class(const std::vector<int>& labels) {
    int classes = 0;
    for (int l : labels) {
        if (l < 0) throw std::invalid_argument("labels must be non-negative");
        classes = std::max(classes, l + 1);
    }
    std::vector<std::vector<std::size_t>> by_class(classes);
    for (std::size_t i = 0; i < labels.size(); ++i)
        by_class[labels[i]].push_back(i);
    return by_class;
}

} // namespace

SplitIndices stratified_split(const std::vector<int>& labels, double train_frac,
                              std::uint64_t seed) {
    if (!(train_frac > 0.0 && train_frac < 1.0))
        throw std::invalid_argument("train_frac must lie in (0,1)");
    auto by_class = indices_by_class(labels);

    SplitIndices out;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& idx = by_class[c];
        if (idx.size() < 2)
            throw std::invalid_argument("stratified_split: class " + std::to_string(c) +
                                        " has fewer than 2 examples");
        Rng r = Rng::substream(seed, c);
        r.shuffle(idx);
        auto n_train = static_cast<std::size_t>(
            std::llround(train_frac * static_cast<double>(idx.size())));
        n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
        out.train.insert(out.train.end(), idx.begin(), idx.begin() + static_cast<long>(n_train));
        out.test.insert(out.test.end(), idx.begin() + static_cast<long>(n_train), idx.end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

std::vector<SplitIndices> kfold_indices(const std::vector<int>& labels, int k,
                                        std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("kfold_indices: k must be >= 2");
    auto by_class = indices_by_class(labels);
    for (std::size_t c = 0; c < by_class.size(); ++c)
        if (by_class[c].size() < static_cast<std::size_t>(k))
            throw std::invalid_argument("kfold_indices: class " + std::to_string(c) +
                                        " has fewer than k examples");

    std::vector<std::vector<std::size_t>> test_folds(k);
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& idx = by_class[c];
        Rng r = Rng::substream(seed, c);
        r.shuffle(idx);
        for (std::size_t i = 0; i < idx.size(); ++i)
            test_folds[i % k].push_back(idx[i]);
    }

    std::vector<SplitIndices> folds(k);
    for (int f = 0; f < k; ++f) {
        folds[f].test = test_folds[f];
        std::sort(folds[f].test.begin(), folds[f].test.end());
        for (int g = 0; g < k; ++g) {
            if (g == f) continue;
            folds[f].train.insert(folds[f].train.end(), test_folds[g].begin(),
                                  test_folds[g].end());
        }
        std::sort(folds[f].train.begin(), folds[f].train.end());
    }
    return folds;
}

RocResult roc_auc(const std::vector<double>& scores, const std::vector<int>& truth_binary) {
    if (scores.size() != truth_binary.size())
        throw std::invalid_argument("roc_auc: length mismatch");
    std::int64_t n_pos = 0, n_neg = 0;
    for (int t : truth_binary) (t != 0 ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("roc_auc: both labels must be present");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocResult out;
    out.points.emplace_back(0.0, 0.0);
    std::int64_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double s = scores[order[i]];
        while (i < order.size() && scores[order[i]] == s) {
            (truth_binary[order[i]] != 0 ? tp : fp)++;
            ++i;
        }
        out.points.emplace_back(static_cast<double>(fp) / static_cast<double>(n_neg),
                                static_cast<double>(tp) / static_cast<double>(n_pos));
    }
    for (std::size_t j = 1; j < out.points.size(); ++j) {
        const auto& [x0, y0] = out.points[j - 1];
        const auto& [x1, y1] = out.points[j];
        out.auc += (x1 - x0) * (y0 + y1) * 0.5;
    }
    return out;
}

EvaluationReport build_report(const std::vector<int>& truth, const std::vector<int>& pred,
                              const std::vector<std::vector<double>>& scores,
                              const std::vector<std::string>& class_names) {
    const int classes = static_cast<int>(class_names.size());
    EvaluationReport rep;
    rep.class_names = class_names;
    rep.cm = confusion_matrix(truth, pred, classes);
    std::tie(rep.per_class, rep.macro) = metrics_from_cm(rep.cm);
    if (!scores.empty()) {
        rep.roc.resize(classes);
        rep.auc.resize(classes, 0.0);
        for (int j = 0; j < classes; ++j) {
            std::vector<int> bin(truth.size());
            for (std::size_t i = 0; i < truth.size(); ++i) bin[i] = (truth[i] == j) ? 1 : 0;
            const bool both = std::count(bin.begin(), bin.end(), 1) > 0 &&
                              std::count(bin.begin(), bin.end(), 0) > 0;
            if (!both) continue; // class missing from this evaluation set
            RocResult rr = roc_auc(scores[j], bin);
            rep.roc[j] = std::move(rr.points);
            rep.auc[j] = rr.auc;
        }
    }
    return rep;
}

} // namespace hfo::eval
