#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "sleepscore/core.hpp"
#include "sleepscore/csv.hpp"

namespace sleepscore {

// Thrown on malformed headers or unreadable inputs. Bad data *rows* are not
// errors; they are skipped and counted in the IngestReport.
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct IngestReport {
    std::size_t rows_read = 0;
    std::size_t rows_skipped = 0;
    std::map<std::string, std::size_t> skip_reasons;
    // Rows that were repaired rather than skipped (e.g. clamped negative enmo).
    std::map<std::string, std::size_t> notes;
};

namespace detail {

inline void require_header(std::istream& in, const std::string& expected,
                           const char* what) {
    std::string line;
    if (!csv::getline(in, line)) {
        throw ParseError(std::string(what) + ": missing header row");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected) {
        throw ParseError(std::string(what) + ": malformed header, expected \"" +
                         expected + "\", got \"" + line + "\"");
    }
}

}  // namespace detail

// Reads series_id,step,timestamp,anglez,enmo rows. Rows are grouped by
// series_id in first-appearance order and sorted by step within a series.
// Negative enmo is clamped to zero and counted; unparseable rows are skipped.
inline std::pair<std::vector<Series>, IngestReport> read_series_csv(std::istream& in) {
    detail::require_header(in, "series_id,step,timestamp,anglez,enmo", "series csv");
    std::vector<Series> series;
    std::unordered_map<std::string, std::size_t> index;
    IngestReport report;
    std::string line;
    std::vector<std::string_view> f;
    while (csv::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        ++report.rows_read;
        csv::split_fields(line, f);
        auto skip = [&](const char* reason) {
            ++report.rows_skipped;
            ++report.skip_reasons[reason];
        };
        if (f.size() != 5) {
            skip("field_count");
            continue;
        }
        auto step = csv::parse_i64(f[1]);
        auto ts = parse_timestamp(f[2]);
        auto anglez = csv::parse_double(f[3]);
        auto enmo = csv::parse_double(f[4]);
        if (!step || !ts || !anglez || !enmo || f[0].empty()) {
            skip("parse");
            continue;
        }
        Sample smp{*step, *ts, *anglez, *enmo};
        if (smp.enmo < 0.0) {
            smp.enmo = 0.0;
            ++report.notes["clamped_enmo"];
        }
        std::string id(f[0]);
        auto it = index.find(id);
        if (it == index.end()) {
            it = index.emplace(id, series.size()).first;
            series.push_back(Series{id, {}, 5});
        }
        series[it->second].samples.push_back(smp);
    }
    for (auto& s : series) {
        std::stable_sort(s.samples.begin(), s.samples.end(),
                         [](const Sample& a, const Sample& b) { return a.step < b.step; });
        if (s.samples.size() >= 2) {
            std::int64_t dt = s.samples[1].timestamp.epoch_seconds -
                              s.samples[0].timestamp.epoch_seconds;
            if (dt > 0) s.cadence_seconds = static_cast<int>(dt);
        }
    }
    return {std::move(series), report};
}

// Reads series_id,night,event,step,timestamp rows. Nights with no recorded
// window carry empty step/timestamp fields and are skipped, not errored.
inline std::pair<std::vector<LabeledEvent>, IngestReport> read_events_csv(std::istream& in) {
    detail::require_header(in, "series_id,night,event,step,timestamp", "events csv");
    std::vector<LabeledEvent> events;
    IngestReport report;
    std::string line;
    std::vector<std::string_view> f;
    while (csv::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        ++report.rows_read;
        csv::split_fields(line, f);
        auto skip = [&](const char* reason) {
            ++report.rows_skipped;
            ++report.skip_reasons[reason];
        };
        if (f.size() != 5) {
            skip("field_count");
            continue;
        }
        auto is_blank = [](std::string_view v) {
            return v.empty() || v == "NaN" || v == "nan";
        };
        if (is_blank(f[3]) || is_blank(f[4])) {
            skip("unlabeled_night");
            continue;
        }
        auto night = csv::parse_i64(f[1]);
        auto cls = parse_event_class(f[2]);
        auto step = csv::parse_i64(f[3]);
        auto ts = parse_timestamp(f[4]);
        if (!cls) {
            skip("bad_event");
            continue;
        }
        if (!night || !step || !ts || f[0].empty()) {
            skip("parse");
            continue;
        }
        events.push_back(LabeledEvent{std::string(f[0]), *night, *cls, *step, *ts});
    }
    return {std::move(events), report};
}

// Prediction rows: row_id,series_id,step,event,score with a 0-based running
// row_id. Scores use the shortest round-trip decimal form so that
// read(write(x)) == x exactly.
inline void write_predictions(const std::vector<ScoredEvent>& events, std::ostream& out) {
    out << "row_id,series_id,step,event,score\n";
    std::set<std::tuple<std::string, std::int64_t, EventClass>> seen;
    std::size_t row_id = 0;
    for (const auto& e : events) {
        if (!seen.emplace(e.series_id, e.step, e.event).second) {
            throw std::invalid_argument("duplicate prediction row: " + e.series_id +
                                        "," + std::to_string(e.step) + "," +
                                        to_string(e.event));
        }
        out << row_id++ << ',' << e.series_id << ',' << e.step << ','
            << to_string(e.event) << ',' << csv::format_double(e.confidence) << '\n';
    }
}

inline std::vector<ScoredEvent> read_predictions(std::istream& in) {
    detail::require_header(in, "row_id,series_id,step,event,score", "predictions csv");
    std::vector<ScoredEvent> events;
    std::string line;
    std::vector<std::string_view> f;
    std::size_t lineno = 1;
    while (csv::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        csv::split_fields(line, f);
        if (f.size() != 5) {
            throw ParseError("predictions csv: bad field count at line " +
                             std::to_string(lineno));
        }
        auto step = csv::parse_i64(f[2]);
        auto cls = parse_event_class(f[3]);
        auto score = csv::parse_double(f[4]);
        if (!step || !cls || !score) {
            throw ParseError("predictions csv: unparseable row at line " +
                             std::to_string(lineno));
        }
        events.push_back(ScoredEvent{std::string(f[1]), *cls, *step, *score});
    }
    return events;
}

inline void write_series_csv(const std::vector<Series>& series, std::ostream& out) {
    out << "series_id,step,timestamp,anglez,enmo\n";
    for (const auto& s : series) {
        for (const auto& smp : s.samples) {
            out << s.series_id << ',' << smp.step << ','
                << format_timestamp(smp.timestamp) << ','
                << csv::format_double(smp.anglez) << ','
                << csv::format_double(smp.enmo) << '\n';
        }
    }
}

inline void write_events_csv(const std::vector<LabeledEvent>& events, std::ostream& out) {
    out << "series_id,night,event,step,timestamp\n";
    for (const auto& e : events) {
        out << e.series_id << ',' << e.night << ',' << to_string(e.event) << ','
            << e.step << ',' << format_timestamp(e.timestamp) << '\n';
    }
}

inline void write_intervals_csv(const std::vector<ScoringInterval>& intervals,
                                std::ostream& out) {
    out << "series_id,start_step,end_step\n";
    for (const auto& iv : intervals) {
        out << iv.series_id << ',' << iv.start_step << ',' << iv.end_step << '\n';
    }
}

inline std::vector<ScoringInterval> read_intervals_csv(std::istream& in) {
    detail::require_header(in, "series_id,start_step,end_step", "intervals csv");
    std::vector<ScoringInterval> out;
    std::string line;
    std::vector<std::string_view> f;
    std::size_t lineno = 1;
    while (csv::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        csv::split_fields(line, f);
        auto a = f.size() == 3 ? csv::parse_i64(f[1]) : std::nullopt;
        auto b = f.size() == 3 ? csv::parse_i64(f[2]) : std::nullopt;
        if (!a || !b) {
            throw ParseError("intervals csv: unparseable row at line " +
                             std::to_string(lineno));
        }
        out.push_back(ScoringInterval{std::string(f[0]), *a, *b});
    }
    return out;
}

// Per-step probabilities keyed by (series_id, step).
inline void write_proba_csv(const std::vector<std::tuple<std::string, std::int64_t, double>>& rows,
                            std::ostream& out) {
    out << "series_id,step,proba\n";
    for (const auto& [id, step, p] : rows) {
        out << id << ',' << step << ',' << csv::format_double(p) << '\n';
    }
}

inline std::vector<std::tuple<std::string, std::int64_t, double>> read_proba_csv(std::istream& in) {
    detail::require_header(in, "series_id,step,proba", "proba csv");
    std::vector<std::tuple<std::string, std::int64_t, double>> rows;
    std::string line;
    std::vector<std::string_view> f;
    std::size_t lineno = 1;
    while (csv::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        csv::split_fields(line, f);
        auto step = f.size() == 3 ? csv::parse_i64(f[1]) : std::nullopt;
        auto p = f.size() == 3 ? csv::parse_double(f[2]) : std::nullopt;
        if (!step || !p) {
            throw ParseError("proba csv: unparseable row at line " + std::to_string(lineno));
        }
        rows.emplace_back(std::string(f[0]), *step, *p);
    }
    return rows;
}

}  // namespace sleepscore
