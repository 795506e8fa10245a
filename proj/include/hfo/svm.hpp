#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace hfo::svm {

struct KernelSpec {
    enum class Kind { linear, rbf };
    Kind kind = Kind::rbf;
    double gamma = 1.0; // rbf only, must be > 0
};

double kernel_eval(const KernelSpec& kernel, const std::vector<double>& x,
                   const std::vector<double>& z);

// Per-dimension zero-mean unit-variance transform, fitted on the training
// split (population variance; near-constant dimensions are left unscaled).
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> inv_std;

    static Standardizer fit(const std::vector<std::vector<double>>& x);
    std::vector<double> apply(const std::vector<double>& x) const;
};

struct BinarySvmModel {
    KernelSpec kernel;
    double C = 1.0;
    Standardizer scaler;
    std::vector<std::vector<double>> support_vectors; // standardized space
    std::vector<double> alphas_signed;                // alpha_i * y_i
    std::vector<int> sv_indices;                      // into the training set
    double bias = 0.0;
    bool constant = false; // degenerate single-class dichotomy
};

struct SvmConfig {
    KernelSpec::Kind kind = KernelSpec::Kind::rbf;
    std::optional<double> gamma; // nullopt = 1 / (dim * feature variance)
    double C = 1.0;
    double tol = 1e-3;
    int max_epochs = 1000; // bound of n*max_epochs working-pair updates
    std::uint64_t seed = 0;
};

// Soft-margin binary SVM trained by sequential minimal optimization with
// second-order working-pair selection. Deterministic given cfg.seed (the
// seed fixes the tie-breaking scan order). Throws on single-class input or
// non-finite features.
BinarySvmModel train_binary_svm(const std::vector<std::vector<double>>& x,
                                const std::vector<int>& y, const SvmConfig& cfg);

// sum_i alphas_signed[i] * K(sv_i, x) + bias, with x standardized first.
double decision_value(const BinarySvmModel& model, const std::vector<double>& x);

// Dual objective sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij of a
// trained model (zero-alpha terms vanish). Used by the solver checks.
double dual_objective(const BinarySvmModel& model);

} // namespace hfo::svm
