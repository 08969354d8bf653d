#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "sleepscore/core.hpp"

namespace sleepscore {

using LabelVector = std::vector<unsigned char>;  // 1 = asleep

struct LabelResult {
    LabelVector labels;
    std::size_t dropped_nights = 0;  // unpaired or inverted onset/wakeup pairs
};

// Label 1 on [onset_step, wakeup_step) for every properly paired night.
inline LabelResult make_labels(const Series& series, const std::vector<LabeledEvent>& events) {
    LabelResult out;
    out.labels.assign(series.size(), 0);
    struct Pair {
        std::optional<std::int64_t> onset, wakeup;
    };
    std::map<std::int64_t, Pair> nights;
    for (const auto& e : events) {
        if (e.series_id != series.series_id) continue;
        auto& p = nights[e.night];
        if (e.event == EventClass::Onset) {
            p.onset = e.step;
        } else {
            p.wakeup = e.step;
        }
    }
    for (const auto& [night, p] : nights) {
        if (!p.onset || !p.wakeup || *p.wakeup <= *p.onset) {
            ++out.dropped_nights;
            continue;
        }
        auto lo = series.index_of_step(*p.onset);
        auto hi = series.index_of_step(*p.wakeup);
        if (!lo || !hi) {
            ++out.dropped_nights;
            continue;
        }
        std::fill(out.labels.begin() + static_cast<std::ptrdiff_t>(*lo),
                  out.labels.begin() + static_cast<std::ptrdiff_t>(*hi), 1);
    }
    return out;
}

}  // namespace sleepscore
