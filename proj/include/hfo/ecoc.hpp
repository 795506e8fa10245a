#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hfo/svm.hpp"

namespace hfo::ecoc {

enum class CodingScheme { one_vs_all, one_vs_one, exhaustive };

std::string to_string(CodingScheme s);
CodingScheme coding_from_string(const std::string& s);

// Decomposition matrix: rows = binary dichotomies, columns = class codewords.
// Entries are -1/0/+1; zero excludes the class from that dichotomy.
struct CodeMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<std::int8_t> entries;
    CodingScheme scheme = CodingScheme::one_vs_all;

    int at(int r, int c) const { return entries[static_cast<std::size_t>(r) * cols + c]; }
};

// one_vs_all: c rows; one_vs_one: c(c-1)/2 rows; exhaustive: 2^(c-1)-1 rows of
// pure +-1 in lexicographic order. Throws for c < 2 or exhaustive with c > 10.
CodeMatrix build_code_matrix(CodingScheme scheme, int c);

// Minimum over codeword pairs of the count of rows where both entries are
// nonzero and differ.
int min_hamming_distance(const CodeMatrix& m);

struct EcocModel {
    CodeMatrix matrix;
    std::vector<svm::BinarySvmModel> classifiers; // one per row
    std::vector<std::string> class_names;
    int feature_dim = 0;
};

// One binary SVM per row, trained on the examples whose class has a nonzero
// entry, with that entry as the target. A row whose induced problem is
// single-class gets a constant classifier carrying the present sign.
EcocModel train_ecoc(const std::vector<std::vector<double>>& features,
                     const std::vector<int>& labels, const CodeMatrix& matrix,
                     const svm::SvmConfig& svm_cfg,
                     const std::vector<std::string>& class_names);

struct EcocPrediction {
    int class_index = 0;
    std::vector<double> per_class_distance; // sign-based Hamming, zeros skipped
    std::vector<double> per_class_score;    // negated hinge loss, for ranking
    std::vector<double> decision_values;    // one per row
};

// Minimum-Hamming decoding of the row decision signs; ties break to the
// lowest class index. The score channel is only used for ROC ranking.
EcocPrediction ecoc_predict(const EcocModel& model, const std::vector<double>& x);

} // namespace hfo::ecoc
