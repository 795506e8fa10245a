#include "hfo/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hfo/rng.hpp"

namespace hfo::sim {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Substream ids within one event's seed.
constexpr std::uint64_t kStreamPrimaryBurst = 1;
constexpr std::uint64_t kStreamSecondBurst = 2;
constexpr std::uint64_t kStreamNoise = 3;

bool in_ripple_band(double f) { return f >= kRippleLo && f <= kRippleHi; }
bool in_fast_ripple_band(double f) { return f > kFastRippleLo && f <= kFastRippleHi; }

// Center of the primary burst. The spike (when present) sits at the window
// center; overlap_frac=1 co-centers the burst with it, smaller values shift
// the burst right until the supports separate. The same rule applies to all
// classes so that a zero-amplitude spike degenerates exactly to a plain HFO.
double primary_burst_center(const EventParams& p) {
    const double half = p.burst_dur_s / 2.0;
    double c = p.window_s / 2.0 +
               (1.0 - p.overlap_frac) * (half + 3.0 * kSpikeSigmaS);
    c = std::min(c, p.window_s - half);
    return std::max(c, half);
}

void add_hann_burst(std::vector<double>& out, double fs, double center_s,
                    double dur_s, double freq_hz, double amplitude, double phase) {
    const double t0 = center_s - dur_s / 2.0;
    const double t1 = center_s + dur_s / 2.0;
    const std::size_t n = out.size();
    const std::size_t i0 =
        static_cast<std::size_t>(std::max(0.0, std::ceil(t0 * fs)));
    for (std::size_t i = i0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        if (t > t1) break;
        const double w = 0.5 * (1.0 - std::cos(2.0 * kPi * (t - t0) / dur_s));
        out[i] += amplitude * w * std::sin(2.0 * kPi * freq_hz * (t - center_s) + phase);
    }
}

void add_spike(std::vector<double>& out, double fs, double center_s, double amplitude) {
    if (amplitude == 0.0) return;
    const double sigma = kSpikeSigmaS;
    const double peak = std::exp(-0.5); // |g| at t = +-sigma before scaling
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double t = static_cast<double>(i) / fs - center_s;
        out[i] += amplitude * (-(t / sigma) * std::exp(-t * t / (2.0 * sigma * sigma))) / peak;
    }
}

void check_range(const Range& r, const char* name) {
    if (!(r.lo <= r.hi))
        throw std::invalid_argument(std::string("empty parameter range: ") + name);
}

} // namespace

void validate_event_params(EventClass cls, const EventParams& p) {
    if (!(p.fs_hz > 0.0)) throw std::invalid_argument("fs_hz must be positive");
    if (!(p.window_s > 0.0)) throw std::invalid_argument("window_s must be positive");
    if (!(p.burst_dur_s > 0.0) || p.burst_dur_s >= p.window_s)
        throw std::invalid_argument("burst_dur_s must lie in (0, window_s)");
    if (!(p.rel_amplitude >= 0.0))
        throw std::invalid_argument("rel_amplitude must be >= 0");
    if (p.overlap_frac < 0.0 || p.overlap_frac > 1.0)
        throw std::invalid_argument("overlap_frac must lie in [0,1]");
    if (!(p.osc_freq_hz < p.fs_hz / 2.0))
        throw std::invalid_argument("osc_freq_hz must be below Nyquist");
    if (p.snr_db && !std::isfinite(*p.snr_db))
        throw std::invalid_argument("snr_db must be finite or the clean sentinel");

    const bool wants_fast = (cls == EventClass::FastRipple);
    if (wants_fast) {
        if (!in_fast_ripple_band(p.osc_freq_hz))
            throw std::invalid_argument("FastRipple frequency must lie in (250,500] Hz");
    } else {
        if (!in_ripple_band(p.osc_freq_hz))
            throw std::invalid_argument("ripple-band frequency must lie in [80,250] Hz");
    }
}

std::pair<std::size_t, std::size_t> burst_support(const EventParams& p) {
    const double c = primary_burst_center(p);
    const double half = p.burst_dur_s / 2.0;
    const std::size_t n =
        static_cast<std::size_t>(std::floor(p.fs_hz * p.window_s));
    const auto clampi = [&](double t) {
        const double i = std::floor(t * p.fs_hz);
        return static_cast<std::size_t>(std::clamp(i, 0.0, static_cast<double>(n - 1)));
    };
    return {clampi(c - half), clampi(c + half)};
}

SignalSegment gen_event(EventClass cls, const EventParams& params, std::uint64_t seed) {
    return gen_event(cls, params, seed,
                     cls == EventClass::SpikeRipple ? 1.0 : 0.0);
}

SignalSegment gen_event(EventClass cls, const EventParams& params, std::uint64_t seed,
                        double spike_amplitude) {
    validate_event_params(cls, params);

    const std::size_t n =
        static_cast<std::size_t>(std::floor(params.fs_hz * params.window_s));
    const double fs = params.fs_hz;
    const double spike_center = params.window_s / 2.0;

    std::vector<double> spike(n, 0.0), burst1(n, 0.0), burst2(n, 0.0);

    add_spike(spike, fs, spike_center, spike_amplitude);

    Rng b1 = Rng::substream(seed, kStreamPrimaryBurst);
    const double phase1 = b1.uniform(0.0, 2.0 * kPi);
    add_hann_burst(burst1, fs, primary_burst_center(params), params.burst_dur_s,
                   params.osc_freq_hz, params.rel_amplitude, phase1);

    if (cls == EventClass::RippleAndFastRipple) {
        Rng b2 = Rng::substream(seed, kStreamSecondBurst);
        const double f2 = b2.uniform(kSecondBurstFreqLo, kSecondBurstFreqHi);
        const double d2 = b2.uniform(kSecondBurstDurLo, kSecondBurstDurHi);
        const double phase2 = b2.uniform(0.0, 2.0 * kPi);
        add_hann_burst(burst2, fs, params.window_s / 2.0, d2, f2,
                       params.rel_amplitude, phase2);
    }

    SignalSegment seg;
    seg.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        seg.samples[i] = spike[i] + burst1[i] + burst2[i];
    seg.fs_hz = fs;
    seg.label = cls;
    seg.event_id = 0;
    seg.params = params;
    return seg;
}

SignalSegment add_noise(const SignalSegment& clean, std::optional<double> snr_db,
                        std::uint64_t seed) {
    if (!snr_db) return clean;
    if (!std::isfinite(*snr_db))
        throw std::invalid_argument("snr_db must be finite or the clean sentinel");

    const auto [i0, i1] = burst_support(clean.params);
    double p_signal = 0.0;
    for (std::size_t i = i0; i <= i1; ++i)
        p_signal += clean.samples[i] * clean.samples[i];
    const std::size_t support_n = i1 - i0 + 1;
    p_signal /= static_cast<double>(support_n);

    SignalSegment out = clean;
    out.params.snr_db = snr_db;
    if (p_signal == 0.0) return out; // nothing to calibrate against

    Rng noise_rng = Rng::substream(seed, kStreamNoise);
    std::vector<double> g(clean.samples.size());
    for (auto& v : g) v = noise_rng.normal();

    double p_draw = 0.0;
    for (std::size_t i = i0; i <= i1; ++i) p_draw += g[i] * g[i];
    p_draw /= static_cast<double>(support_n);

    const double p_target = p_signal / std::pow(10.0, *snr_db / 10.0);
    const double scale = std::sqrt(p_target / p_draw);
    for (std::size_t i = 0; i < g.size(); ++i)
        out.samples[i] = clean.samples[i] + scale * g[i];
    return out;
}

LabeledDataset gen_dataset(const DatasetSpec& spec) {
    if (spec.per_class_count < 1)
        throw std::invalid_argument("per_class_count must be >= 1");
    const ParamRanges& r = spec.ranges;
    check_range(r.ripple_freq_hz, "ripple_freq_hz");
    check_range(r.fast_ripple_freq_hz, "fast_ripple_freq_hz");
    check_range(r.ripple_dur_s, "ripple_dur_s");
    check_range(r.fast_ripple_dur_s, "fast_ripple_dur_s");
    check_range(r.rel_amplitude, "rel_amplitude");
    check_range(r.overlap_frac, "overlap_frac");
    if (!in_ripple_band(r.ripple_freq_hz.lo) || !in_ripple_band(r.ripple_freq_hz.hi))
        throw std::invalid_argument("ripple_freq_hz range must lie in [80,250] Hz");
    if (!in_fast_ripple_band(r.fast_ripple_freq_hz.lo) ||
        !in_fast_ripple_band(r.fast_ripple_freq_hz.hi))
        throw std::invalid_argument("fast_ripple_freq_hz range must lie in (250,500] Hz");

    const std::vector<EventClass> classes = profile_classes(spec.profile);

    LabeledDataset ds;
    ds.profile = spec.profile;
    ds.master_seed = spec.master_seed;
    ds.segments.reserve(classes.size() * static_cast<std::size_t>(spec.per_class_count));

    std::int64_t event_id = 0;
    for (EventClass cls : classes) {
        for (int j = 0; j < spec.per_class_count; ++j, ++event_id) {
            const std::uint64_t event_seed =
                rng::mix(spec.master_seed, static_cast<std::uint64_t>(event_id));
            Rng draw(event_seed);

            const bool fast = (cls == EventClass::FastRipple);
            EventParams p;
            p.osc_freq_hz = fast ? draw.uniform(r.fast_ripple_freq_hz.lo, r.fast_ripple_freq_hz.hi)
                                 : draw.uniform(r.ripple_freq_hz.lo, r.ripple_freq_hz.hi);
            p.burst_dur_s = fast ? draw.uniform(r.fast_ripple_dur_s.lo, r.fast_ripple_dur_s.hi)
                                 : draw.uniform(r.ripple_dur_s.lo, r.ripple_dur_s.hi);
            p.rel_amplitude = draw.uniform(r.rel_amplitude.lo, r.rel_amplitude.hi);
            p.overlap_frac = draw.uniform(r.overlap_frac.lo, r.overlap_frac.hi);
            p.snr_db = spec.snr_db;
            p.fs_hz = spec.fs_hz;
            p.window_s = spec.window_s;

            EventParams clean_params = p;
            clean_params.snr_db.reset();
            SignalSegment seg = gen_event(cls, clean_params, event_seed);
            seg = add_noise(seg, spec.snr_db, event_seed);
            seg.event_id = event_id;
            ds.segments.push_back(std::move(seg));
        }
    }
    return ds;
}

} // namespace hfo::sim
