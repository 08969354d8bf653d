#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sleepscore/time.hpp"

namespace sleepscore {

enum class EventClass { Onset, Wakeup };

inline const char* to_string(EventClass c) noexcept {
    return c == EventClass::Onset ? "onset" : "wakeup";
}

inline std::optional<EventClass> parse_event_class(std::string_view s) {
    if (s == "onset") return EventClass::Onset;
    if (s == "wakeup") return EventClass::Wakeup;
    return std::nullopt;
}

// One accelerometer observation. anglez is the arm angle against the body's
// vertical axis in degrees; enmo is the euclidean-norm-minus-one magnitude in
// g, never negative once ingested.
struct Sample {
    std::int64_t step = 0;
    ZonedTime timestamp;
    double anglez = 0.0;
    double enmo = 0.0;
};

// A continuous multi-day recording for one subject. Steps increase by one and
// timestamps advance by cadence_seconds.
struct Series {
    std::string series_id;
    std::vector<Sample> samples;
    int cadence_seconds = 5;

    std::size_t size() const noexcept { return samples.size(); }
    std::int64_t first_step() const noexcept {
        return samples.empty() ? 0 : samples.front().step;
    }

    // Position of a step in `samples`, relying on the strict-increment invariant.
    std::optional<std::size_t> index_of_step(std::int64_t step) const noexcept {
        if (samples.empty()) return std::nullopt;
        std::int64_t off = step - samples.front().step;
        if (off < 0 || off >= static_cast<std::int64_t>(samples.size())) return std::nullopt;
        return static_cast<std::size_t>(off);
    }
};

struct LabeledEvent {
    std::string series_id;
    std::int64_t night = 0;
    EventClass event = EventClass::Onset;
    std::int64_t step = 0;
    ZonedTime timestamp;
};

struct ScoredEvent {
    std::string series_id;
    EventClass event = EventClass::Onset;
    std::int64_t step = 0;
    double confidence = 0.0;
};

struct SleepWindow {
    std::string series_id;
    std::int64_t onset_step = 0;
    std::int64_t wakeup_step = 0;
    std::int64_t night = 0;
};

// Half-open [start_step, end_step) span inside which predictions are scoreable.
struct ScoringInterval {
    std::string series_id;
    std::int64_t start_step = 0;
    std::int64_t end_step = 0;
};

struct Violation {
    std::size_t index = 0;  // sample position the problem was seen at
    std::string message;
};

// Collects every invariant violation instead of stopping at the first;
// violations are data, not failures.
inline std::vector<Violation> validate_series(const Series& s) {
    std::vector<Violation> out;
    if (s.cadence_seconds <= 0) {
        out.push_back({0, "cadence_seconds must be positive"});
    }
    if (s.samples.empty()) {
        out.push_back({0, "series is empty"});
        return out;
    }
    for (std::size_t i = 0; i < s.samples.size(); ++i) {
        const Sample& smp = s.samples[i];
        if (i > 0) {
            std::int64_t dstep = smp.step - s.samples[i - 1].step;
            if (dstep != 1) {
                out.push_back({i, "step gap at index " + std::to_string(i) +
                                      " (delta " + std::to_string(dstep) + ")"});
            }
            if (s.cadence_seconds > 0) {
                std::int64_t dt = smp.timestamp.epoch_seconds -
                                  s.samples[i - 1].timestamp.epoch_seconds;
                if (std::llabs(dt - s.cadence_seconds) > 1) {
                    out.push_back({i, "timestamp delta " + std::to_string(dt) +
                                          "s at index " + std::to_string(i) +
                                          " inconsistent with cadence"});
                }
            }
        }
        if (!(smp.anglez >= -90.0 && smp.anglez <= 90.0)) {
            out.push_back({i, "anglez out of [-90, 90] at step " +
                                  std::to_string(smp.step)});
        }
        if (!(smp.enmo >= 0.0)) {
            out.push_back({i, "negative enmo at step " + std::to_string(smp.step)});
        }
        if (!std::isfinite(smp.anglez) || !std::isfinite(smp.enmo)) {
            out.push_back({i, "non-finite value at step " + std::to_string(smp.step)});
        }
    }
    return out;
}

// Calendar date of the boundary that starts a night. Timestamps between
// [D at boundary_hour, D+1 at boundary_hour) in local time map to night D.
struct NightKey {
    std::int64_t days = 0;  // days since epoch of the boundary's date

    friend auto operator<=>(const NightKey&, const NightKey&) = default;

    std::string to_string() const {
        CivilDate d = civil_from_days(days);
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", d.year, d.month, d.day);
        return std::string(buf);
    }
};

inline NightKey night_of(const ZonedTime& t, int boundary_hour) {
    if (boundary_hour < 0 || boundary_hour > 23) {
        throw std::invalid_argument("boundary_hour must be in [0, 23]");
    }
    std::int64_t local = t.epoch_seconds + t.offset_seconds;
    std::int64_t shifted = local - static_cast<std::int64_t>(boundary_hour) * 3600;
    std::int64_t days = shifted / 86400;
    if (shifted % 86400 < 0) --days;
    return NightKey{days};
}

inline std::int64_t window_duration_seconds(const SleepWindow& w, int cadence_seconds) {
    if (w.onset_step >= w.wakeup_step) {
        throw std::invalid_argument("sleep window requires onset_step < wakeup_step");
    }
    return (w.wakeup_step - w.onset_step) * cadence_seconds;
}

}  // namespace sleepscore
