#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "hfo/signal.hpp"

namespace hfo::sim {

// Frequency band limits. Ripples live in [80,250] Hz, fast ripples in (250,500].
inline constexpr double kRippleLo = 80.0;
inline constexpr double kRippleHi = 250.0;
inline constexpr double kFastRippleLo = 250.0; // exclusive
inline constexpr double kFastRippleHi = 500.0;

// Biphasic spike transient: first derivative of a Gaussian, unit peak,
// 20 ms wide (+-3 sigma). A wider Gaussian would leave no energy above
// ~40 Hz and the spike would be invisible in the 80-500 Hz analysis band.
inline constexpr double kSpikeWidthS = 0.020;
inline constexpr double kSpikeSigmaS = kSpikeWidthS / 6.0;

// Secondary fast-ripple burst of RippleAndFastRipple events; drawn from the
// event substream because EventParams carries a single oscillation frequency.
inline constexpr double kSecondBurstFreqLo = 260.0;
inline constexpr double kSecondBurstFreqHi = 480.0;
inline constexpr double kSecondBurstDurLo = 0.020;
inline constexpr double kSecondBurstDurHi = 0.060;

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

struct ParamRanges {
    Range ripple_freq_hz{85.0, 240.0};
    Range fast_ripple_freq_hz{260.0, 480.0};
    Range ripple_dur_s{0.040, 0.120};
    Range fast_ripple_dur_s{0.020, 0.060};
    Range rel_amplitude{0.5, 1.5};
    Range overlap_frac{0.5, 1.0};
};

struct DatasetSpec {
    std::string profile = "sim1";
    int per_class_count = 1000;
    std::uint64_t master_seed = 0;
    double fs_hz = 2048.0;
    double window_s = 0.3;
    std::optional<double> snr_db; // nullopt = clean
    ParamRanges ranges;
};

// Throws std::invalid_argument when params violate the class band, Nyquist,
// or basic sanity constraints.
void validate_event_params(EventClass cls, const EventParams& params);

// Noiseless waveform: optional spike transient plus Hann-windowed sinusoidal
// burst(s). Deterministic in (cls, params, seed). The spike amplitude is 1
// for SpikeRipple and 0 otherwise; the overload makes it explicit so
// degenerate superpositions can be constructed.
SignalSegment gen_event(EventClass cls, const EventParams& params, std::uint64_t seed);
SignalSegment gen_event(EventClass cls, const EventParams& params, std::uint64_t seed,
                        double spike_amplitude);

// Sample interval [first, last] covered by the primary burst, derived from
// params alone. Noise calibration measures signal power over this support.
std::pair<std::size_t, std::size_t> burst_support(const EventParams& params);

// Additive zero-mean Gaussian noise, scaled so the realized signal/noise
// power ratio over the primary burst support equals snr_db exactly.
// nullopt snr returns the input unchanged.
SignalSegment add_noise(const SignalSegment& clean, std::optional<double> snr_db,
                        std::uint64_t seed);

// per_class_count events per class of the profile, event ids contiguous from
// 0 in class-major order. Per-event parameters come from a substream keyed by
// (master_seed, event_id); reruns are bit-identical.
LabeledDataset gen_dataset(const DatasetSpec& spec);

} // namespace hfo::sim
