#pragma once

#include <cmath>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sleepscore/core.hpp"
#include "sleepscore/csv.hpp"
#include "sleepscore/io.hpp"
#include "sleepscore/rolling.hpp"

namespace sleepscore {

enum class Channel { Anglez, Enmo };
enum class Stat { Mean, Max, Std, TotalVariation };

inline const char* to_string(Channel c) noexcept {
    return c == Channel::Anglez ? "anglez" : "enmo";
}

inline const char* to_string(Stat s) noexcept {
    switch (s) {
        case Stat::Mean: return "mean";
        case Stat::Max: return "max";
        case Stat::Std: return "std";
        default: return "tv";
    }
}

struct FeatureSpec {
    Channel channel = Channel::Anglez;
    Stat stat = Stat::Mean;
    std::size_t window_steps = 1;

    // "<channel>_<minutes>m_<stat>", e.g. anglez_30m_max. Windows that do not
    // land on a whole minute fall back to a seconds suffix.
    std::string column_name(int cadence_seconds) const {
        std::int64_t secs = static_cast<std::int64_t>(window_steps) * cadence_seconds;
        std::string span = secs % 60 == 0 ? std::to_string(secs / 60) + "m"
                                          : std::to_string(secs) + "s";
        return std::string(to_string(channel)) + "_" + span + "_" + to_string(stat);
    }
};

inline std::size_t window_steps_from_minutes(int minutes, int cadence_seconds) {
    if (minutes <= 0 || cadence_seconds <= 0) {
        throw std::invalid_argument("window minutes and cadence must be positive");
    }
    std::int64_t steps = static_cast<std::int64_t>(minutes) * 60 / cadence_seconds;
    return static_cast<std::size_t>(std::max<std::int64_t>(1, steps));
}

// The stock feature set: {anglez, enmo} x {mean, max, std} x {5m, 30m, 120m,
// 480m} = 24 columns; with the hour column appended that is the 25-column set.
inline std::vector<FeatureSpec> default_feature_specs(int cadence_seconds = 5) {
    std::vector<FeatureSpec> specs;
    for (Channel ch : {Channel::Anglez, Channel::Enmo}) {
        for (Stat st : {Stat::Mean, Stat::Max, Stat::Std}) {
            for (int minutes : {5, 30, 120, 480}) {
                specs.push_back({ch, st, window_steps_from_minutes(minutes, cadence_seconds)});
            }
        }
    }
    return specs;
}

// Column-major matrix of per-step features.
struct FeatureMatrix {
    std::string series_id;
    std::vector<std::string> column_names;
    std::vector<std::vector<double>> columns;

    std::size_t n_rows() const noexcept {
        return columns.empty() ? 0 : columns.front().size();
    }
    std::size_t n_cols() const noexcept { return columns.size(); }
};

// Local hour (0-23) of each sample.
inline std::vector<double> hour_of_day(const Series& s) {
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        out[i] = static_cast<double>(local_civil(s.samples[i].timestamp).hour);
    }
    return out;
}

inline FeatureMatrix build_features(const Series& series,
                                    const std::vector<FeatureSpec>& specs,
                                    bool include_hour) {
    FeatureMatrix m;
    m.series_id = series.series_id;
    std::vector<double> anglez(series.size()), enmo(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        anglez[i] = series.samples[i].anglez;
        enmo[i] = series.samples[i].enmo;
    }
    for (const auto& spec : specs) {
        std::span<const double> x = spec.channel == Channel::Anglez ? anglez : enmo;
        std::vector<double> col;
        switch (spec.stat) {
            case Stat::Mean: col = rolling_mean(x, spec.window_steps); break;
            case Stat::Max: col = rolling_max(x, spec.window_steps); break;
            case Stat::Std: col = rolling_std(x, spec.window_steps); break;
            case Stat::TotalVariation: col = total_variation(x, spec.window_steps); break;
        }
        for (double v : col) {
            if (!std::isfinite(v)) {
                throw std::runtime_error("non-finite feature value in column " +
                                         spec.column_name(series.cadence_seconds));
            }
        }
        m.column_names.push_back(spec.column_name(series.cadence_seconds));
        m.columns.push_back(std::move(col));
    }
    if (include_hour) {
        m.column_names.push_back("hour");
        m.columns.push_back(hour_of_day(series));
    }
    return m;
}

// series_id,step,<feature columns>. Multiple matrices may share one file.
inline void write_features_csv(const std::vector<std::pair<const Series*, const FeatureMatrix*>>& items,
                               std::ostream& out) {
    if (items.empty()) throw std::invalid_argument("no feature matrices to write");
    const auto& names = items.front().second->column_names;
    out << "series_id,step";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (const auto& [series, m] : items) {
        if (m->column_names != names) {
            throw std::invalid_argument("feature matrices disagree on columns");
        }
        for (std::size_t r = 0; r < m->n_rows(); ++r) {
            out << m->series_id << ',' << series->samples[r].step;
            for (const auto& col : m->columns) out << ',' << csv::format_double(col[r]);
            out << '\n';
        }
    }
}

struct FeatureFile {
    std::vector<std::string> column_names;       // feature columns only
    std::vector<FeatureMatrix> matrices;         // one per series, file order
    std::vector<std::vector<std::int64_t>> steps;  // per-series step numbers
};

inline FeatureFile read_features_csv(std::istream& in) {
    std::string line;
    if (!csv::getline(in, line)) throw ParseError("features csv: missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string_view> f;
    csv::split_fields(line, f);
    if (f.size() < 3 || f[0] != "series_id" || f[1] != "step") {
        throw ParseError("features csv: malformed header");
    }
    FeatureFile file;
    for (std::size_t i = 2; i < f.size(); ++i) file.column_names.emplace_back(f[i]);
    std::size_t lineno = 1;
    while (csv::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        csv::split_fields(line, f);
        if (f.size() != file.column_names.size() + 2) {
            throw ParseError("features csv: bad field count at line " + std::to_string(lineno));
        }
        auto step = csv::parse_i64(f[1]);
        if (!step) throw ParseError("features csv: bad step at line " + std::to_string(lineno));
        std::string id(f[0]);
        if (file.matrices.empty() || file.matrices.back().series_id != id) {
            FeatureMatrix m;
            m.series_id = id;
            m.column_names = file.column_names;
            m.columns.assign(file.column_names.size(), {});
            file.matrices.push_back(std::move(m));
            file.steps.emplace_back();
        }
        auto& m = file.matrices.back();
        file.steps.back().push_back(*step);
        for (std::size_t c = 0; c < file.column_names.size(); ++c) {
            auto v = csv::parse_double(f[c + 2]);
            if (!v) throw ParseError("features csv: bad value at line " + std::to_string(lineno));
            m.columns[c].push_back(*v);
        }
    }
    return file;
}

}  // namespace sleepscore
