#include "hfo/signal.hpp"

#include <stdexcept>

namespace hfo {

std::string to_string(EventClass c) {
    switch (c) {
        case EventClass::Ripple: return "Ripple";
        case EventClass::FastRipple: return "FastRipple";
        case EventClass::SpikeRipple: return "SpikeRipple";
        case EventClass::RippleAndFastRipple: return "RippleAndFastRipple";
    }
    throw std::logic_error("unreachable event class");
}

EventClass event_class_from_string(const std::string& s) {
    if (s == "Ripple") return EventClass::Ripple;
    if (s == "FastRipple") return EventClass::FastRipple;
    if (s == "SpikeRipple") return EventClass::SpikeRipple;
    if (s == "RippleAndFastRipple") return EventClass::RippleAndFastRipple;
    throw std::invalid_argument("unknown event class: " + s);
}

std::vector<EventClass> profile_classes(const std::string& profile) {
    if (profile == "sim1")
        return {EventClass::Ripple, EventClass::FastRipple, EventClass::SpikeRipple};
    if (profile == "sim2")
        return {EventClass::Ripple, EventClass::FastRipple,
                EventClass::RippleAndFastRipple};
    throw std::invalid_argument("unknown dataset profile: " + profile);
}

int class_index(const std::vector<EventClass>& classes, EventClass c) {
    for (std::size_t i = 0; i < classes.size(); ++i)
        if (classes[i] == c) return static_cast<int>(i);
    throw std::invalid_argument("label " + to_string(c) + " not in profile class set");
}

} // namespace hfo
