#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "hfo/signal.hpp"

namespace hfo::tfr {

// Analytic Morlet center frequency (rad/sample at unit scale).
inline constexpr double kMorletOmega0 = 6.0;

// psi(t) = pi^(-1/4) * exp(i*omega0*t) * exp(-t^2/2)
std::complex<double> morlet(double t);

struct ScaleGrid {
    std::vector<double> scales;          // in samples, strictly increasing
    std::vector<double> center_freqs_hz; // strictly decreasing
    int voices_per_octave = 12;
    double fs_hz = 0.0;
};

struct CwtMatrix {
    std::vector<std::vector<std::complex<double>>> coeffs; // [n_scales][n_samples]
    ScaleGrid grid;
};

struct TimeFrequencyMap {
    int size = 0;                      // S
    std::vector<double> values;        // S*S row-major, row 0 = highest frequency
    std::vector<double> freq_axis_hz;  // length S, descending
    std::vector<double> time_axis_s;   // length S, ascending
    std::int64_t source_event_id = 0;

    double at(int row, int col) const { return values[static_cast<std::size_t>(row) * size + col]; }
    double& at(int row, int col) { return values[static_cast<std::size_t>(row) * size + col]; }
};

struct ScalogramConfig {
    int size = 64;
    double fmin_hz = 80.0;
    double fmax_hz = 500.0;
    int voices = 12;
};

// Log-spaced center frequencies from fmax down to fmin, `voices` per octave,
// last frequency snapped onto fmin so the band is covered exactly.
ScaleGrid scales_for_band(double fs_hz, double fmin_hz, double fmax_hz, int voices);

// Continuous wavelet transform realized as frequency-domain correlation with
// the sampled wavelet, zero-padded to the next power of two. Scales and
// translations are in sample units; coefficients carry the 1/sqrt(scale)
// normalization. Boundary columns wrap (no cone-of-influence masking).
CwtMatrix cwt(const SignalSegment& signal, const ScaleGrid& grid);

// |coeffs| -> log1p -> per-map min-max to [0,1] -> bilinear resize to S x S.
// A degenerate all-equal map becomes all zeros.
TimeFrequencyMap scalogram(const SignalSegment& signal, const ScalogramConfig& cfg);

// Bilinear resize of a row-major matrix (endpoint-aligned).
std::vector<double> resize_bilinear(const std::vector<double>& in, int in_rows,
                                    int in_cols, int out_rows, int out_cols);

// Block mean-pooling to out_size x out_size (falls back to bilinear when the
// map size is not a multiple of out_size). Used for the flat SVM features.
std::vector<double> mean_pool(const TimeFrequencyMap& map, int out_size);

// Frequency (Hz) of the row with the largest mean value.
double ridge_frequency(const TimeFrequencyMap& map);

} // namespace hfo::tfr
