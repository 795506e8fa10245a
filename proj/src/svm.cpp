#include "hfo/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hfo/rng.hpp"

namespace hfo::svm {

double kernel_eval(const KernelSpec& kernel, const std::vector<double>& x,
                   const std::vector<double>& z) {
    if (x.size() != z.size())
        throw std::invalid_argument("kernel_eval: dimension mismatch");
    if (kernel.kind == KernelSpec::Kind::linear) {
        double dot = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * z[i];
        return dot;
    }
    if (!(kernel.gamma > 0.0)) throw std::invalid_argument("rbf requires gamma > 0");
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - z[i];
        d2 += d * d;
    }
    return std::exp(-kernel.gamma * d2);
}

Standardizer Standardizer::fit(const std::vector<std::vector<double>>& x) {
    const std::size_t n = x.size();
    const std::size_t d = x.empty() ? 0 : x[0].size();
    Standardizer s;
    s.mean.assign(d, 0.0);
    s.inv_std.assign(d, 1.0);
    if (n == 0) return s;
    for (const auto& row : x)
        for (std::size_t j = 0; j < d; ++j) s.mean[j] += row[j];
    for (auto& m : s.mean) m /= static_cast<double>(n);
    for (std::size_t j = 0; j < d; ++j) {
        double var = 0.0;
        for (const auto& row : x) {
            const double dv = row[j] - s.mean[j];
            var += dv * dv;
        }
        var /= static_cast<double>(n);
        s.inv_std[j] = (var > 1e-24) ? 1.0 / std::sqrt(var) : 1.0;
    }
    return s;
}

std::vector<double> Standardizer::apply(const std::vector<double>& x) const {
    if (x.size() != mean.size())
        throw std::invalid_argument("standardizer: dimension mismatch");
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) * inv_std[j];
    return out;
}

namespace {

double pooled_variance(const std::vector<std::vector<double>>& x) {
    double sum = 0.0, sum2 = 0.0;
    std::size_t count = 0;
    for (const auto& row : x)
        for (double v : row) {
            sum += v;
            sum2 += v * v;
            ++count;
        }
    if (count == 0) return 1.0;
    const double mean = sum / static_cast<double>(count);
    return std::max(sum2 / static_cast<double>(count) - mean * mean, 1e-12);
}

} // namespace

BinarySvmModel train_binary_svm(const std::vector<std::vector<double>>& x,
                                const std::vector<int>& y, const SvmConfig& cfg) {
    const std::size_t n = x.size();
    if (n == 0 || y.size() != n)
        throw std::invalid_argument("train_binary_svm: bad problem size");
    if (!(cfg.C > 0.0)) throw std::invalid_argument("C must be positive");
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("tol must be positive");

    bool has_pos = false, has_neg = false;
    for (int t : y) {
        if (t == 1) has_pos = true;
        else if (t == -1) has_neg = true;
        else throw std::invalid_argument("labels must be -1 or +1");
    }
    if (!has_pos || !has_neg)
        throw std::invalid_argument("train_binary_svm: both classes required");
    for (const auto& row : x) {
        if (row.size() != x[0].size())
            throw std::invalid_argument("train_binary_svm: ragged feature matrix");
        for (double v : row)
            if (!std::isfinite(v))
                throw std::invalid_argument("train_binary_svm: non-finite feature");
    }

    BinarySvmModel model;
    model.C = cfg.C;
    model.scaler = Standardizer::fit(x);
    std::vector<std::vector<double>> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = model.scaler.apply(x[i]);

    model.kernel.kind = cfg.kind;
    if (cfg.kind == KernelSpec::Kind::rbf) {
        model.kernel.gamma =
            cfg.gamma ? *cfg.gamma
                      : 1.0 / (static_cast<double>(xs[0].size()) * pooled_variance(xs));
        if (!(model.kernel.gamma > 0.0))
            throw std::invalid_argument("rbf requires gamma > 0");
    }

    // Full Gram cache; problems stay desk-scale.
    std::vector<double> K(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double v = kernel_eval(model.kernel, xs[i], xs[j]);
            K[i * n + j] = v;
            K[j * n + i] = v;
        }
    }

    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0); // gradient of 1/2 a'Qa - e'a
    const double C = cfg.C;
    const double tau = 1e-12;

    // seeded scan order; only affects tie-breaking among equal violations
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng perm_rng = Rng::substream(cfg.seed, 0x534D4F); // "SMO"
    perm_rng.shuffle(order);

    const auto in_up = [&](std::size_t t) {
        return (y[t] == 1 && alpha[t] < C) || (y[t] == -1 && alpha[t] > 0.0);
    };
    const auto in_low = [&](std::size_t t) {
        return (y[t] == -1 && alpha[t] < C) || (y[t] == 1 && alpha[t] > 0.0);
    };

    const long max_iter = static_cast<long>(cfg.max_epochs) * static_cast<long>(n);
    double m_up = 0.0, m_low = 0.0;
    for (long iter = 0; iter < max_iter; ++iter) {
        // first-order max violation over I_up, second-order partner in I_low
        long i = -1;
        m_up = -std::numeric_limits<double>::infinity();
        m_low = std::numeric_limits<double>::infinity();
        for (std::size_t t : order) {
            const double v = -y[t] * grad[t];
            if (in_up(t) && v > m_up) {
                m_up = v;
                i = static_cast<long>(t);
            }
            if (in_low(t) && v < m_low) m_low = v;
        }
        if (i < 0 || m_up - m_low <= cfg.tol) break;

        long j = -1;
        double best = 0.0;
        const std::size_t ii = static_cast<std::size_t>(i);
        for (std::size_t t : order) {
            if (!in_low(t)) continue;
            const double b = m_up + y[t] * grad[t]; // m_up - (-y_t g_t)
            if (b <= 0.0) continue;
            double a = K[ii * n + ii] + K[t * n + t] - 2.0 * K[ii * n + t];
            if (a <= 0.0) a = tau;
            const double gain = -(b * b) / a;
            if (gain < best) {
                best = gain;
                j = static_cast<long>(t);
            }
        }
        if (j < 0) break;
        const std::size_t jj = static_cast<std::size_t>(j);

        double a = K[ii * n + ii] + K[jj * n + jj] - 2.0 * K[ii * n + jj];
        if (a <= 0.0) a = tau;
        const double b = -y[ii] * grad[ii] + y[jj] * grad[jj];

        const double old_ai = alpha[ii], old_aj = alpha[jj];
        alpha[ii] += y[ii] * b / a;
        alpha[jj] -= y[jj] * b / a;

        // clip back into the box while preserving y_i a_i + y_j a_j
        const double sum = y[ii] * old_ai + y[jj] * old_aj;
        alpha[ii] = std::clamp(alpha[ii], 0.0, C);
        alpha[jj] = y[jj] * (sum - y[ii] * alpha[ii]);
        alpha[jj] = std::clamp(alpha[jj], 0.0, C);
        alpha[ii] = y[ii] * (sum - y[jj] * alpha[jj]);
        alpha[ii] = std::clamp(alpha[ii], 0.0, C);

        const double d_i = alpha[ii] - old_ai;
        const double d_j = alpha[jj] - old_aj;
        for (std::size_t t = 0; t < n; ++t)
            grad[t] += y[t] * (y[ii] * K[ii * n + t] * d_i + y[jj] * K[jj * n + t] * d_j);
    }

    // bias from free support vectors, else midpoint of the violation bounds
    double bias_sum = 0.0;
    int free_count = 0;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0.0 && alpha[t] < C) {
            bias_sum += -y[t] * grad[t];
            ++free_count;
        }
    }
    model.bias = free_count > 0 ? bias_sum / free_count : (m_up + m_low) / 2.0;

    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 1e-12) {
            model.support_vectors.push_back(xs[t]);
            model.alphas_signed.push_back(alpha[t] * y[t]);
            model.sv_indices.push_back(static_cast<int>(t));
        }
    }
    return model;
}

double decision_value(const BinarySvmModel& model, const std::vector<double>& x) {
    if (model.constant || model.support_vectors.empty()) return model.bias;
    const std::vector<double> xs = model.scaler.apply(x);
    double f = model.bias;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i)
        f += model.alphas_signed[i] * kernel_eval(model.kernel, model.support_vectors[i], xs);
    return f;
}

double dual_objective(const BinarySvmModel& model) {
    const std::size_t m = model.support_vectors.size();
    double sum_alpha = 0.0;
    for (double a : model.alphas_signed) sum_alpha += std::abs(a);
    double quad = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            quad += model.alphas_signed[i] * model.alphas_signed[j] *
                    kernel_eval(model.kernel, model.support_vectors[i],
                                model.support_vectors[j]);
    return sum_alpha - 0.5 * quad;
}

} // namespace hfo::svm
