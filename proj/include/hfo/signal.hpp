#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hfo {

enum class EventClass { Ripple, FastRipple, SpikeRipple, RippleAndFastRipple };

std::string to_string(EventClass c);
EventClass event_class_from_string(const std::string& s);

// Parameters of one synthesized event. snr_db empty means "clean" (no noise).
struct EventParams {
    double osc_freq_hz = 0.0;
    double burst_dur_s = 0.0;
    double rel_amplitude = 1.0;   // HFO amplitude relative to the spike peak
    std::optional<double> snr_db; // nullopt = clean
    double overlap_frac = 1.0;    // 1 = spike and burst centers coincide
    double fs_hz = 2048.0;
    double window_s = 0.3;
};

struct SignalSegment {
    std::vector<double> samples;
    double fs_hz = 0.0;
    EventClass label = EventClass::Ripple;
    std::int64_t event_id = 0;
    EventParams params;
};

struct LabeledDataset {
    std::vector<SignalSegment> segments;
    std::string profile;          // "sim1", "sim2" or "imported"
    std::uint64_t master_seed = 0;
};

// Class set of a dataset profile, in label-index order.
std::vector<EventClass> profile_classes(const std::string& profile);

// Index of a segment's label within the profile's class set.
int class_index(const std::vector<EventClass>& classes, EventClass c);

} // namespace hfo
