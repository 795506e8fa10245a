#include "hfo/tfr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hfo/fft.hpp"

namespace hfo::tfr {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kMorletNorm = 0.7511255444649425; // pi^(-1/4)
} // namespace

std::complex<double> morlet(double t) {
    const double envelope = kMorletNorm * std::exp(-0.5 * t * t);
    return {envelope * std::cos(kMorletOmega0 * t), envelope * std::sin(kMorletOmega0 * t)};
}

ScaleGrid scales_for_band(double fs_hz, double fmin_hz, double fmax_hz, int voices) {
    if (!(fs_hz > 0.0)) throw std::invalid_argument("fs_hz must be positive");
    if (!(fmin_hz > 0.0) || !(fmin_hz <= fmax_hz))
        throw std::invalid_argument("need 0 < fmin <= fmax");
    if (!(fmax_hz < fs_hz / 2.0))
        throw std::invalid_argument("fmax must be below Nyquist");
    if (voices < 1) throw std::invalid_argument("voices must be >= 1");

    ScaleGrid grid;
    grid.voices_per_octave = voices;
    grid.fs_hz = fs_hz;

    const double octaves = std::log2(fmax_hz / fmin_hz);
    const int n = (fmin_hz == fmax_hz)
                      ? 1
                      : static_cast<int>(std::ceil(octaves * voices)) + 1;
    grid.center_freqs_hz.resize(n);
    for (int i = 0; i < n; ++i)
        grid.center_freqs_hz[i] =
            fmax_hz * std::pow(2.0, -static_cast<double>(i) / voices);
    grid.center_freqs_hz.back() = fmin_hz; // snap the bracketing scale

    grid.scales.resize(n);
    for (int i = 0; i < n; ++i)
        grid.scales[i] = kMorletOmega0 * fs_hz / (2.0 * kPi * grid.center_freqs_hz[i]);
    return grid;
}

CwtMatrix cwt(const SignalSegment& signal, const ScaleGrid& grid) {
    const std::size_t n = signal.samples.size();
    if (n < 8) throw std::invalid_argument("cwt: signal too short");
    if (signal.fs_hz != grid.fs_hz)
        throw std::invalid_argument("cwt: grid was built for a different sampling rate");

    const std::size_t p = fft::next_pow2(n);
    std::vector<std::complex<double>> x(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) x[i] = signal.samples[i];
    fft::transform(x);

    CwtMatrix out;
    out.grid = grid;
    out.coeffs.resize(grid.scales.size());

    std::vector<std::complex<double>> kernel(p);
    for (std::size_t s = 0; s < grid.scales.size(); ++s) {
        const double k = grid.scales[s];
        const double inv_sqrt_k = 1.0 / std::sqrt(k);
        // sampled wavelet, wrapped so index 0 holds lag 0
        const long half = static_cast<long>(p) / 2;
        for (long j = -half; j < half; ++j) {
            const std::size_t idx = static_cast<std::size_t>((j + static_cast<long>(p)) % static_cast<long>(p));
            kernel[idx] = inv_sqrt_k * morlet(static_cast<double>(j) / k);
        }
        std::vector<std::complex<double>> g = kernel;
        fft::transform(g);

        // correlation: C[f] = X[f] * G[-f]
        std::vector<std::complex<double>> c(p);
        c[0] = x[0] * g[0];
        for (std::size_t f = 1; f < p; ++f) c[f] = x[f] * g[p - f];
        fft::transform(c, true);

        out.coeffs[s].assign(c.begin(), c.begin() + static_cast<long>(n));
    }
    return out;
}

std::vector<double> resize_bilinear(const std::vector<double>& in, int in_rows,
                                    int in_cols, int out_rows, int out_cols) {
    if (in_rows < 1 || in_cols < 1 || out_rows < 1 || out_cols < 1)
        throw std::invalid_argument("resize_bilinear: bad dimensions");
    std::vector<double> out(static_cast<std::size_t>(out_rows) * out_cols);
    const auto src_pos = [](int dst, int dst_n, int src_n) {
        if (dst_n == 1 || src_n == 1) return 0.0;
        return static_cast<double>(dst) * (src_n - 1) / (dst_n - 1);
    };
    for (int r = 0; r < out_rows; ++r) {
        const double sr = src_pos(r, out_rows, in_rows);
        const int r0 = static_cast<int>(sr);
        const int r1 = std::min(r0 + 1, in_rows - 1);
        const double fr = sr - r0;
        for (int c = 0; c < out_cols; ++c) {
            const double sc = src_pos(c, out_cols, in_cols);
            const int c0 = static_cast<int>(sc);
            const int c1 = std::min(c0 + 1, in_cols - 1);
            const double fc = sc - c0;
            const double v00 = in[static_cast<std::size_t>(r0) * in_cols + c0];
            const double v01 = in[static_cast<std::size_t>(r0) * in_cols + c1];
            const double v10 = in[static_cast<std::size_t>(r1) * in_cols + c0];
            const double v11 = in[static_cast<std::size_t>(r1) * in_cols + c1];
            out[static_cast<std::size_t>(r) * out_cols + c] =
                (1 - fr) * ((1 - fc) * v00 + fc * v01) + fr * ((1 - fc) * v10 + fc * v11);
        }
    }
    return out;
}

TimeFrequencyMap scalogram(const SignalSegment& signal, const ScalogramConfig& cfg) {
    if (cfg.size < 2) throw std::invalid_argument("scalogram: size must be >= 2");
    const ScaleGrid grid = scales_for_band(signal.fs_hz, cfg.fmin_hz, cfg.fmax_hz, cfg.voices);
    const CwtMatrix m = cwt(signal, grid);

    const int rows = static_cast<int>(m.coeffs.size());
    const int cols = static_cast<int>(m.coeffs[0].size());
    std::vector<double> mag(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            mag[static_cast<std::size_t>(r) * cols + c] = std::log1p(std::abs(m.coeffs[r][c]));

    const auto [mn_it, mx_it] = std::minmax_element(mag.begin(), mag.end());
    const double mn = *mn_it, mx = *mx_it;
    if (mx > mn) {
        const double inv = 1.0 / (mx - mn);
        for (auto& v : mag) v = (v - mn) * inv;
    } else {
        std::fill(mag.begin(), mag.end(), 0.0);
    }

    TimeFrequencyMap map;
    map.size = cfg.size;
    map.source_event_id = signal.event_id;
    map.values = resize_bilinear(mag, rows, cols, cfg.size, cfg.size);

    // Row axis is log-spaced in frequency, so linear interpolation of row
    // position corresponds to geometric interpolation of frequency.
    map.freq_axis_hz.resize(cfg.size);
    const double log_hi = std::log(grid.center_freqs_hz.front());
    const double log_lo = std::log(grid.center_freqs_hz.back());
    for (int r = 0; r < cfg.size; ++r) {
        const double u = (cfg.size == 1) ? 0.0 : static_cast<double>(r) / (cfg.size - 1);
        map.freq_axis_hz[r] = std::exp(log_hi + u * (log_lo - log_hi));
    }

    map.time_axis_s.resize(cfg.size);
    for (int c = 0; c < cfg.size; ++c) {
        const double u = (cfg.size == 1) ? 0.0 : static_cast<double>(c) / (cfg.size - 1);
        map.time_axis_s[c] = u * static_cast<double>(cols - 1) / signal.fs_hz;
    }
    return map;
}

std::vector<double> mean_pool(const TimeFrequencyMap& map, int out_size) {
    if (out_size < 1) throw std::invalid_argument("mean_pool: bad size");
    if (map.size % out_size != 0)
        return resize_bilinear(map.values, map.size, map.size, out_size, out_size);
    const int block = map.size / out_size;
    std::vector<double> out(static_cast<std::size_t>(out_size) * out_size, 0.0);
    for (int r = 0; r < map.size; ++r)
        for (int c = 0; c < map.size; ++c)
            out[static_cast<std::size_t>(r / block) * out_size + (c / block)] += map.at(r, c);
    const double inv = 1.0 / (block * block);
    for (auto& v : out) v *= inv;
    return out;
}

double ridge_frequency(const TimeFrequencyMap& map) {
    int best_row = 0;
    double best = -1.0;
    for (int r = 0; r < map.size; ++r) {
        double sum = 0.0;
        for (int c = 0; c < map.size; ++c) sum += map.at(r, c);
        if (sum > best) {
            best = sum;
            best_row = r;
        }
    }
    return map.freq_axis_hz[best_row];
}

} // namespace hfo::tfr
