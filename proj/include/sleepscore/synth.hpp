#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sleepscore/core.hpp"
#include "sleepscore/rng.hpp"

namespace sleepscore {

struct NonwearSegment {
    double start_hour_offset = 0.0;  // hours from the start of the series
    double duration_min = 0.0;
};

// Regime-switching generator: awake anglez is drawn around a posture base that
// jumps often (large swings), asleep anglez is a mean-reverting wander around
// a posture base that jumps rarely, and non-wear spans hold constant values.
struct SynthConfig {
    int n_days = 1;
    int cadence_seconds = 5;
    double sleep_onset_hour_mean = 22.5;  // clock hours
    double sleep_onset_hour_std = 1.0;
    double sleep_duration_mean_hours = 9.0;
    double sleep_duration_std_hours = 1.0;
    double sigma_sleep_deg = 1.0;  // stationary std of the asleep wander
    double sigma_wake_deg = 25.0;  // marginal std of awake anglez
    double posture_change_rate_per_hour = 2.0;        // asleep
    double wake_posture_change_rate_per_hour = 60.0;  // awake
    double enmo_wake_mean = 0.05;
    double enmo_sleep_mean = 0.005;
    std::vector<NonwearSegment> nonwear_segments;
    std::uint64_t rng_seed = 0;
    std::string series_id = "synth-000";
};

inline void validate_config(const SynthConfig& cfg) {
    if (cfg.n_days < 1) throw std::invalid_argument("n_days must be >= 1");
    if (cfg.cadence_seconds <= 0) throw std::invalid_argument("cadence_seconds must be > 0");
    if (cfg.sleep_onset_hour_std < 0 || cfg.sleep_duration_std_hours < 0 ||
        cfg.sigma_sleep_deg < 0 || cfg.sigma_wake_deg < 0) {
        throw std::invalid_argument("stds must be >= 0");
    }
    if (cfg.sleep_duration_mean_hours <= 0) {
        throw std::invalid_argument("sleep_duration_mean_hours must be > 0");
    }
    if (cfg.posture_change_rate_per_hour < 0 || cfg.wake_posture_change_rate_per_hour < 0) {
        throw std::invalid_argument("posture change rates must be >= 0");
    }
    for (const auto& seg : cfg.nonwear_segments) {
        if (seg.duration_min <= 0) throw std::invalid_argument("non-wear duration must be > 0");
        if (seg.start_hour_offset < 0) {
            throw std::invalid_argument("non-wear start_hour_offset must be >= 0");
        }
    }
}

struct SynthResult {
    Series series;
    std::vector<LabeledEvent> events;
    std::vector<ScoringInterval> intervals;
};

namespace detail {

inline double truncated_normal(std::mt19937_64& g, double mean, double std_dev) {
    return mean + std_dev * std::clamp(rng::normal(g), -3.0, 3.0);
}

}  // namespace detail

inline SynthResult generate(const SynthConfig& cfg) {
    validate_config(cfg);
    const std::int64_t n = static_cast<std::int64_t>(cfg.n_days) * 86400 / cfg.cadence_seconds;
    const ZonedTime start = make_zoned(2023, 1, 2, 12, 0, 0, -5 * 3600);
    std::mt19937_64 g(cfg.rng_seed);

    // nightly schedule; the first sample sits on the night boundary (noon)
    struct Night {
        std::int64_t onset = 0, wakeup = 0;  // step indices
    };
    std::vector<Night> nights(static_cast<std::size_t>(cfg.n_days));
    for (int d = 0; d < cfg.n_days; ++d) {
        double onset_hour = detail::truncated_normal(g, cfg.sleep_onset_hour_mean,
                                                     cfg.sleep_onset_hour_std);
        double duration_h = std::clamp(
            detail::truncated_normal(g, cfg.sleep_duration_mean_hours,
                                     cfg.sleep_duration_std_hours),
            1.0, 14.0);
        double onset_s = d * 86400.0 + (onset_hour - 12.0) * 3600.0;
        std::int64_t onset = static_cast<std::int64_t>(std::llround(onset_s / cfg.cadence_seconds));
        std::int64_t wakeup = onset + static_cast<std::int64_t>(
                                          std::llround(duration_h * 3600.0 / cfg.cadence_seconds));
        onset = std::max<std::int64_t>(onset, 1);
        wakeup = std::min(wakeup, n - 60 / cfg.cadence_seconds - 1);
        if (wakeup <= onset) {
            throw std::runtime_error("generated night " + std::to_string(d + 1) +
                                     " does not fit in the series");
        }
        nights[static_cast<std::size_t>(d)] = {onset, wakeup};
    }

    // non-wear spans in steps, checked against the sleep schedule
    std::vector<std::pair<std::int64_t, std::int64_t>> nonwear;
    for (const auto& seg : cfg.nonwear_segments) {
        std::int64_t s = static_cast<std::int64_t>(
            std::llround(seg.start_hour_offset * 3600.0 / cfg.cadence_seconds));
        std::int64_t e = s + static_cast<std::int64_t>(
                                 std::llround(seg.duration_min * 60.0 / cfg.cadence_seconds));
        if (s < 0 || e > n || s >= e) {
            throw std::invalid_argument("non-wear segment at hour " +
                                        std::to_string(seg.start_hour_offset) +
                                        " falls outside the series");
        }
        for (std::size_t d = 0; d < nights.size(); ++d) {
            if (s < nights[d].wakeup && nights[d].onset < e) {
                throw std::runtime_error(
                    "non-wear segment at hour " + std::to_string(seg.start_hour_offset) +
                    " overlaps the night " + std::to_string(d + 1) + " sleep window");
            }
        }
        nonwear.emplace_back(s, e);
    }
    std::sort(nonwear.begin(), nonwear.end());

    // regimes: 0 wake, 1 sleep, 2 non-wear
    std::vector<unsigned char> regime(static_cast<std::size_t>(n), 0);
    for (const auto& nt : nights) {
        std::fill(regime.begin() + nt.onset, regime.begin() + nt.wakeup, 1);
    }
    for (const auto& [s, e] : nonwear) {
        std::fill(regime.begin() + s, regime.begin() + e, 2);
    }

    const double lambda_sleep = cfg.posture_change_rate_per_hour * cfg.cadence_seconds / 3600.0;
    const double lambda_wake = cfg.wake_posture_change_rate_per_hour * cfg.cadence_seconds / 3600.0;
    // awake variance split: two thirds posture base, one third draw noise
    const double wake_base_range = std::min(60.0, cfg.sigma_wake_deg * std::sqrt(2.0));
    const double wake_noise_std = cfg.sigma_wake_deg / std::sqrt(3.0);
    // asleep wander: AR(1) with ~1 minute decorrelation and stationary std sigma_sleep
    const double ar = std::exp(-static_cast<double>(cfg.cadence_seconds) / 60.0);
    const double wander_inc_std = cfg.sigma_sleep_deg * std::sqrt(std::max(0.0, 1.0 - ar * ar));

    Series series;
    series.series_id = cfg.series_id;
    series.cadence_seconds = cfg.cadence_seconds;
    series.samples.resize(static_cast<std::size_t>(n));

    double wake_base = rng::uniform(g, -wake_base_range, wake_base_range);
    double sleep_base = rng::uniform(g, -25.0, 25.0);
    double wander = 0.0;
    unsigned char prev_regime = 0;
    double held_anglez = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        unsigned char r = regime[static_cast<std::size_t>(i)];
        double anglez, enmo;
        if (r == 1) {
            if (prev_regime != 1) {
                sleep_base = rng::uniform(g, -25.0, 25.0);
                wander = 0.0;
            } else if (rng::uniform01(g) < lambda_sleep) {
                sleep_base = rng::uniform(g, -25.0, 25.0);
            }
            wander = ar * wander + wander_inc_std * rng::normal(g);
            anglez = sleep_base + wander;
            enmo = cfg.enmo_sleep_mean + cfg.enmo_sleep_mean * rng::normal(g);
        } else if (r == 0) {
            if (prev_regime != 0 || rng::uniform01(g) < lambda_wake) {
                wake_base = rng::uniform(g, -wake_base_range, wake_base_range);
            }
            anglez = wake_base + wake_noise_std * rng::normal(g);
            enmo = cfg.enmo_wake_mean + cfg.enmo_wake_mean * rng::normal(g);
        } else {
            if (prev_regime != 2) held_anglez = i > 0 ? series.samples[i - 1].anglez : 0.0;
            anglez = held_anglez;
            enmo = 0.0;
        }
        Sample& smp = series.samples[static_cast<std::size_t>(i)];
        smp.step = i;
        smp.timestamp = ZonedTime{start.epoch_seconds + i * cfg.cadence_seconds,
                                  start.offset_seconds};
        smp.anglez = std::clamp(anglez, -90.0, 90.0);
        smp.enmo = std::max(0.0, enmo);
        prev_regime = r;
    }

    SynthResult out;
    for (std::size_t d = 0; d < nights.size(); ++d) {
        const auto& nt = nights[d];
        out.events.push_back(LabeledEvent{
            cfg.series_id, static_cast<std::int64_t>(d + 1), EventClass::Onset, nt.onset,
            series.samples[static_cast<std::size_t>(nt.onset)].timestamp});
        out.events.push_back(LabeledEvent{
            cfg.series_id, static_cast<std::int64_t>(d + 1), EventClass::Wakeup, nt.wakeup,
            series.samples[static_cast<std::size_t>(nt.wakeup)].timestamp});
    }

    std::int64_t cursor = 0;
    for (const auto& [s, e] : nonwear) {
        if (s > cursor) out.intervals.push_back(ScoringInterval{cfg.series_id, cursor, s});
        cursor = e;
    }
    if (cursor < n) out.intervals.push_back(ScoringInterval{cfg.series_id, cursor, n});

    out.series = std::move(series);
    return out;
}

}  // namespace sleepscore
