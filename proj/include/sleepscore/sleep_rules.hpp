#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sleepscore/core.hpp"
#include "sleepscore/features.hpp"
#include "sleepscore/rolling.hpp"

namespace sleepscore {

struct DetectorConfig {
    double angle_change_threshold_deg = 5.0;
    int smoothing_window_min = 5;
    int min_window_min = 30;
    int max_interruption_min = 30;
    double nonwear_std_threshold_deg = 0.05;
    int nonwear_min_duration_min = 60;
    int night_boundary_hour = 12;
};

inline void validate_config(const DetectorConfig& cfg) {
    if (cfg.angle_change_threshold_deg <= 0) {
        throw std::invalid_argument("angle_change_threshold_deg must be > 0");
    }
    if (cfg.smoothing_window_min <= 0 || cfg.min_window_min <= 0 ||
        cfg.max_interruption_min <= 0 || cfg.nonwear_min_duration_min <= 0) {
        throw std::invalid_argument("detector durations must be > 0");
    }
    if (cfg.nonwear_std_threshold_deg <= 0) {
        throw std::invalid_argument("nonwear_std_threshold_deg must be > 0");
    }
    if (cfg.night_boundary_hour < 0 || cfg.night_boundary_hour > 23) {
        throw std::invalid_argument("night_boundary_hour must be in [0, 23]");
    }
}

using Mask = std::vector<unsigned char>;

namespace detail {

// Order-statistics window: lower half (including the median) in `lo`,
// upper half in `hi`.
class SlidingMedian {
  public:
    void insert(double v) {
        if (lo_.empty() || v <= *lo_.rbegin()) {
            lo_.insert(v);
        } else {
            hi_.insert(v);
        }
        rebalance();
    }

    void erase(double v) {
        auto it = lo_.find(v);
        if (it != lo_.end()) {
            lo_.erase(it);
        } else {
            hi_.erase(hi_.find(v));
        }
        rebalance();
    }

    double median() const {
        if (lo_.size() > hi_.size()) return *lo_.rbegin();
        return 0.5 * (*lo_.rbegin() + *hi_.begin());
    }

  private:
    void rebalance() {
        while (lo_.size() > hi_.size() + 1) {
            hi_.insert(*std::prev(lo_.end()));
            lo_.erase(std::prev(lo_.end()));
        }
        while (hi_.size() > lo_.size()) {
            lo_.insert(*hi_.begin());
            hi_.erase(hi_.begin());
        }
    }

    std::multiset<double> lo_, hi_;
};

// Centered rolling median with an odd window, shrinking at the edges.
// O(n log w); private to the detector.
inline std::vector<double> centered_rolling_median(std::span<const double> x, std::size_t w) {
    std::vector<double> out(x.size());
    if (x.empty()) return out;
    std::size_t h = (w - 1) / 2;
    SlidingMedian sm;
    std::size_t added = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::size_t hi_target = std::min(x.size(), i + h + 1);
        while (added < hi_target) sm.insert(x[added++]);
        if (i >= h + 1) sm.erase(x[i - h - 1]);
        out[i] = sm.median();
    }
    return out;
}

// Marks [j-len+1, j] for every j with qual[j], in O(n).
inline Mask cover_union(const std::vector<unsigned char>& qual, std::size_t len) {
    Mask mask(qual.size(), 0);
    std::size_t covered_until = 0;  // exclusive
    for (std::size_t j = 0; j < qual.size(); ++j) {
        if (!qual[j]) continue;
        std::size_t lo = j + 1 >= len ? j + 1 - len : 0;
        for (std::size_t i = std::max(lo, covered_until); i <= j; ++i) mask[i] = 1;
        covered_until = j + 1;
    }
    return mask;
}

struct Run {
    std::size_t begin = 0, end = 0;  // half-open index range
};

inline std::vector<Run> true_runs(const Mask& mask) {
    std::vector<Run> runs;
    std::size_t i = 0;
    while (i < mask.size()) {
        if (!mask[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < mask.size() && mask[j]) ++j;
        runs.push_back({i, j});
        i = j;
    }
    return runs;
}

}  // namespace detail

// A step is inactive when the smoothed arm angle stays within the change
// threshold over a full smoothing window around it: the rolling median of
// anglez is taken over an odd smoothing window, and any window of that length
// whose median range (max - min) is below the threshold marks all of its
// steps as inactive.
inline Mask inactivity_mask(const Series& series, const DetectorConfig& cfg) {
    const std::size_t n = series.size();
    if (n == 0) return {};
    std::size_t w = window_steps_from_minutes(cfg.smoothing_window_min, series.cadence_seconds);
    w |= 1;  // odd, so a two-valued signal cannot hide behind midpoint averaging
    std::vector<double> anglez(n);
    for (std::size_t i = 0; i < n; ++i) anglez[i] = series.samples[i].anglez;
    std::vector<double> med = detail::centered_rolling_median(anglez, w);

    const std::size_t len = std::min(w, n);
    std::vector<unsigned char> qual(n, 0);
    std::deque<std::size_t> qmax, qmin;
    for (std::size_t j = 0; j < n; ++j) {
        while (!qmax.empty() && med[qmax.back()] <= med[j]) qmax.pop_back();
        qmax.push_back(j);
        while (!qmin.empty() && med[qmin.back()] >= med[j]) qmin.pop_back();
        qmin.push_back(j);
        if (qmax.front() + len <= j) qmax.pop_front();
        if (qmin.front() + len <= j) qmin.pop_front();
        if (j + 1 >= len) {
            qual[j] = (med[qmax.front()] - med[qmin.front()]) < cfg.angle_change_threshold_deg;
        }
    }
    return detail::cover_union(qual, len);
}

// Off-wrist detection: rolling std of anglez below the threshold for at least
// the non-wear minimum duration.
inline Mask nonwear_mask(const Series& series, const DetectorConfig& cfg) {
    const std::size_t n = series.size();
    if (n == 0) return {};
    std::size_t w = window_steps_from_minutes(cfg.smoothing_window_min, series.cadence_seconds);
    std::vector<double> anglez(n);
    for (std::size_t i = 0; i < n; ++i) anglez[i] = series.samples[i].anglez;
    std::vector<double> sd = rolling_std(anglez, w);
    Mask low(n, 0);
    for (std::size_t i = 0; i < n; ++i) low[i] = sd[i] < cfg.nonwear_std_threshold_deg;

    std::size_t min_len = window_steps_from_minutes(cfg.nonwear_min_duration_min,
                                                    series.cadence_seconds);
    Mask mask(n, 0);
    for (const auto& run : detail::true_runs(low)) {
        if (run.end - run.begin >= min_len) {
            std::fill(mask.begin() + static_cast<std::ptrdiff_t>(run.begin),
                      mask.begin() + static_cast<std::ptrdiff_t>(run.end), 1);
        }
    }
    return mask;
}

// Merges inactivity runs split by short activity bouts, drops windows below
// the minimum length, and drops windows touching any non-wear step.
inline std::vector<SleepWindow> assemble_windows(const Mask& inactive, const Mask& nonwear,
                                                 const Series& series,
                                                 const DetectorConfig& cfg) {
    if (inactive.size() != nonwear.size()) {
        throw std::invalid_argument("inactivity and non-wear masks differ in length");
    }
    const std::size_t n = inactive.size();
    if (n == 0) return {};
    const std::size_t max_gap = window_steps_from_minutes(cfg.max_interruption_min,
                                                          series.cadence_seconds);
    const std::size_t min_len = window_steps_from_minutes(cfg.min_window_min,
                                                          series.cadence_seconds);
    auto runs = detail::true_runs(inactive);
    std::vector<detail::Run> merged;
    for (const auto& r : runs) {
        if (!merged.empty() && r.begin - merged.back().end <= max_gap) {
            merged.back().end = r.end;
        } else {
            merged.push_back(r);
        }
    }

    std::vector<std::size_t> nonwear_prefix(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) nonwear_prefix[i + 1] = nonwear_prefix[i] + (nonwear[i] ? 1 : 0);

    std::vector<SleepWindow> windows;
    const std::int64_t first = series.first_step();
    for (const auto& r : merged) {
        if (r.end - r.begin < min_len) continue;
        if (nonwear_prefix[r.end] - nonwear_prefix[r.begin] > 0) continue;
        std::size_t wake_idx = std::min(r.end, n - 1);
        if (wake_idx <= r.begin) continue;
        windows.push_back(SleepWindow{series.series_id,
                                      first + static_cast<std::int64_t>(r.begin),
                                      first + static_cast<std::int64_t>(wake_idx), 0});
    }
    return windows;
}

inline std::int64_t night_ordinal(const Series& series, const ZonedTime& t, int boundary_hour) {
    NightKey base = night_of(series.samples.front().timestamp, boundary_hour);
    return night_of(t, boundary_hour).days - base.days + 1;
}

// Keeps the longest window per night (night of the onset step); ties go to the
// earlier onset.
inline std::vector<SleepWindow> select_per_night(std::vector<SleepWindow> windows,
                                                 const Series& series,
                                                 const DetectorConfig& cfg) {
    std::map<std::int64_t, SleepWindow> best;
    for (auto& w : windows) {
        auto idx = series.index_of_step(w.onset_step);
        if (!idx) continue;
        w.night = night_ordinal(series, series.samples[*idx].timestamp, cfg.night_boundary_hour);
        auto it = best.find(w.night);
        if (it == best.end()) {
            best.emplace(w.night, w);
            continue;
        }
        std::int64_t cur = it->second.wakeup_step - it->second.onset_step;
        std::int64_t cand = w.wakeup_step - w.onset_step;
        if (cand > cur || (cand == cur && w.onset_step < it->second.onset_step)) {
            it->second = w;
        }
    }
    std::vector<SleepWindow> out;
    out.reserve(best.size());
    for (auto& [night, w] : best) out.push_back(w);
    std::sort(out.begin(), out.end(), [](const SleepWindow& a, const SleepWindow& b) {
        return a.onset_step < b.onset_step;
    });
    return out;
}

namespace detail {

// Inactive-fraction contrast between a window and its 30-minute flanks,
// clamped to [0, 1]; gives every emitted event a scoreable confidence.
inline double window_confidence(const Mask& inactive, std::size_t begin, std::size_t end,
                                std::size_t flank_len) {
    const std::size_t n = inactive.size();
    std::size_t inside = 0;
    for (std::size_t i = begin; i < end; ++i) inside += inactive[i] ? 1 : 0;
    double inside_frac = end > begin ? static_cast<double>(inside) / (end - begin) : 0.0;

    std::size_t flank_total = 0, flank_on = 0;
    std::size_t left_lo = begin >= flank_len ? begin - flank_len : 0;
    for (std::size_t i = left_lo; i < begin; ++i) {
        ++flank_total;
        flank_on += inactive[i] ? 1 : 0;
    }
    std::size_t right_hi = std::min(n, end + flank_len);
    for (std::size_t i = end; i < right_hi; ++i) {
        ++flank_total;
        flank_on += inactive[i] ? 1 : 0;
    }
    double flank_frac = flank_total > 0 ? static_cast<double>(flank_on) / flank_total : 0.0;
    return std::clamp(inside_frac - flank_frac, 0.0, 1.0);
}

}  // namespace detail

struct DetectResult {
    std::vector<SleepWindow> windows;
    std::vector<ScoredEvent> events;
};

inline DetectResult detect(const Series& series, const DetectorConfig& cfg) {
    validate_config(cfg);
    Mask inactive = inactivity_mask(series, cfg);
    Mask nonwear = nonwear_mask(series, cfg);
    auto windows = assemble_windows(inactive, nonwear, series, cfg);
    windows = select_per_night(std::move(windows), series, cfg);

    DetectResult result;
    const std::size_t flank = window_steps_from_minutes(30, series.cadence_seconds);
    const std::int64_t first = series.first_step();
    for (const auto& w : windows) {
        std::size_t begin = static_cast<std::size_t>(w.onset_step - first);
        std::size_t end = static_cast<std::size_t>(w.wakeup_step - first);
        double conf = detail::window_confidence(inactive, begin, end, flank);
        result.events.push_back(ScoredEvent{series.series_id, EventClass::Onset, w.onset_step, conf});
        result.events.push_back(ScoredEvent{series.series_id, EventClass::Wakeup, w.wakeup_step, conf});
    }
    result.windows = std::move(windows);
    std::sort(result.events.begin(), result.events.end(),
              [](const ScoredEvent& a, const ScoredEvent& b) { return a.step < b.step; });
    return result;
}

}  // namespace sleepscore
