#include "hfo/ecoc.hpp"

#include <algorithm>
#include <stdexcept>

#include "hfo/rng.hpp"

namespace hfo::ecoc {

std::string to_string(CodingScheme s) {
    switch (s) {
        case CodingScheme::one_vs_all: return "ova";
        case CodingScheme::one_vs_one: return "ovo";
        case CodingScheme::exhaustive: return "exhaustive";
    }
    throw std::logic_error("unreachable coding scheme");
}

CodingScheme coding_from_string(const std::string& s) {
    if (s == "ova" || s == "one_vs_all") return CodingScheme::one_vs_all;
    if (s == "ovo" || s == "one_vs_one") return CodingScheme::one_vs_one;
    if (s == "exhaustive") return CodingScheme::exhaustive;
    throw std::invalid_argument("unknown coding scheme: " + s);
}

CodeMatrix build_code_matrix(CodingScheme scheme, int c) {
    if (c < 2) throw std::invalid_argument("code matrix needs at least 2 classes");
    CodeMatrix m;
    m.cols = c;
    m.scheme = scheme;
    switch (scheme) {
        case CodingScheme::one_vs_all:
            m.rows = c;
            m.entries.assign(static_cast<std::size_t>(c) * c, -1);
            for (int i = 0; i < c; ++i) m.entries[static_cast<std::size_t>(i) * c + i] = 1;
            break;
        case CodingScheme::one_vs_one:
            m.rows = c * (c - 1) / 2;
            m.entries.assign(static_cast<std::size_t>(m.rows) * c, 0);
            for (int a = 0, r = 0; a < c; ++a) {
                for (int b = a + 1; b < c; ++b, ++r) {
                    m.entries[static_cast<std::size_t>(r) * c + a] = 1;
                    m.entries[static_cast<std::size_t>(r) * c + b] = -1;
                }
            }
            break;
        case CodingScheme::exhaustive: {
            if (c > 10)
                throw std::invalid_argument("exhaustive coding limited to c <= 10");
            m.rows = (1 << (c - 1)) - 1;
            m.entries.assign(static_cast<std::size_t>(m.rows) * c, 0);
            // row r (1-based bit pattern): class 0 always +1, the remaining
            // classes follow the bits, most significant first
            for (int r = 1; r <= m.rows; ++r) {
                std::int8_t* row = &m.entries[static_cast<std::size_t>(r - 1) * c];
                row[0] = 1;
                for (int j = 1; j < c; ++j)
                    row[j] = ((r >> (c - 1 - j)) & 1) ? -1 : 1;
            }
            break;
        }
    }
    return m;
}

int min_hamming_distance(const CodeMatrix& m) {
    int best = m.rows + 1;
    for (int a = 0; a < m.cols; ++a) {
        for (int b = a + 1; b < m.cols; ++b) {
            int d = 0;
            for (int r = 0; r < m.rows; ++r) {
                const int ea = m.at(r, a), eb = m.at(r, b);
                if (ea != 0 && eb != 0 && ea != eb) ++d;
            }
            best = std::min(best, d);
        }
    }
    return best;
}

EcocModel train_ecoc(const std::vector<std::vector<double>>& features,
                     const std::vector<int>& labels, const CodeMatrix& matrix,
                     const svm::SvmConfig& svm_cfg,
                     const std::vector<std::string>& class_names) {
    if (features.size() != labels.size())
        throw std::invalid_argument("train_ecoc: feature/label length mismatch");
    if (static_cast<int>(class_names.size()) != matrix.cols)
        throw std::invalid_argument("train_ecoc: class name count mismatch");

    std::vector<int> class_counts(matrix.cols, 0);
    for (int l : labels) {
        if (l < 0 || l >= matrix.cols)
            throw std::invalid_argument("train_ecoc: label out of range");
        ++class_counts[l];
    }
    for (int j = 0; j < matrix.cols; ++j)
        if (class_counts[j] == 0)
            throw std::invalid_argument("train_ecoc: class " + class_names[j] +
                                        " absent from training data");

    EcocModel model;
    model.matrix = matrix;
    model.class_names = class_names;
    model.feature_dim = features.empty() ? 0 : static_cast<int>(features[0].size());
    model.classifiers.resize(matrix.rows);

    for (int r = 0; r < matrix.rows; ++r) {
        std::vector<std::vector<double>> x;
        std::vector<int> y;
        for (std::size_t i = 0; i < features.size(); ++i) {
            const int e = matrix.at(r, labels[i]);
            if (e == 0) continue;
            x.push_back(features[i]);
            y.push_back(e);
        }
        const bool has_pos = std::find(y.begin(), y.end(), 1) != y.end();
        const bool has_neg = std::find(y.begin(), y.end(), -1) != y.end();
        if (!has_pos || !has_neg) {
            svm::BinarySvmModel constant;
            constant.constant = true;
            constant.bias = has_pos ? 1.0 : -1.0;
            constant.C = svm_cfg.C;
            model.classifiers[r] = std::move(constant);
            continue;
        }
        svm::SvmConfig cfg = svm_cfg;
        cfg.seed = rng::mix(svm_cfg.seed, static_cast<std::uint64_t>(r));
        model.classifiers[r] = svm::train_binary_svm(x, y, cfg);
    }
    return model;
}

EcocPrediction ecoc_predict(const EcocModel& model, const std::vector<double>& x) {
    const CodeMatrix& m = model.matrix;
    EcocPrediction out;
    out.decision_values.resize(m.rows);
    for (int r = 0; r < m.rows; ++r)
        out.decision_values[r] = svm::decision_value(model.classifiers[r], x);

    out.per_class_distance.assign(m.cols, 0.0);
    out.per_class_score.assign(m.cols, 0.0);
    for (int j = 0; j < m.cols; ++j) {
        for (int r = 0; r < m.rows; ++r) {
            const int e = m.at(r, j);
            if (e == 0) continue;
            const double f = out.decision_values[r];
            const int sign = (f >= 0.0) ? 1 : -1;
            if (sign != e) out.per_class_distance[j] += 1.0;
            out.per_class_score[j] -= std::max(0.0, 1.0 - e * f);
        }
    }
    out.class_index = static_cast<int>(
        std::min_element(out.per_class_distance.begin(), out.per_class_distance.end()) -
        out.per_class_distance.begin());
    return out;
}

} // namespace hfo::ecoc
