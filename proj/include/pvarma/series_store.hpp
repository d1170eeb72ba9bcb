#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pvarma {

inline constexpr int kHoursPerDay = 24;

/// Raised for anything wrong with an input file: unparsable rows, schema
/// violations and corrupt values.
class input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Calendar day as an ordinal (days since 1970-01-01).
using DayOrdinal = long;

inline std::optional<DayOrdinal> parse_iso_date(std::string_view text) {
    // YYYY-MM-DD, nothing else
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0;
    unsigned m = 0, d = 0;
    auto field = [&](std::size_t pos, std::size_t len, auto& out) {
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
        return ec == std::errc{} && ptr == text.data() + pos + len;
    };
    if (!field(0, 4, y) || !field(5, 2, m) || !field(8, 2, d)) return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    return std::chrono::sys_days{ymd}.time_since_epoch().count();
}

inline std::string format_iso_date(DayOrdinal day) {
    const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{day}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

struct Timestamp {
    DayOrdinal day = 0;
    int hour = 0;

    long hour_index() const noexcept { return day * kHoursPerDay + hour; }
    friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

struct Record {
    Timestamp time;
    std::optional<double> power_mw;  // nullopt marks a declared gap

    friend bool operator==(const Record&, const Record&) = default;
};

/// Hourly power observations on a contiguous hourly grid. Missing hours are
/// present as records without a value.
class SolarSeries {
public:
    SolarSeries() = default;

    /// Validates ordering, spacing and non-negativity.
    explicit SolarSeries(std::vector<Record> records) : records_(std::move(records)) {
        for (std::size_t i = 0; i < records_.size(); ++i) {
            const auto& r = records_[i];
            if (r.time.hour < 0 || r.time.hour >= kHoursPerDay) {
                throw input_error("hour out of range at record " + std::to_string(i));
            }
            if (r.power_mw && (!std::isfinite(*r.power_mw) || *r.power_mw < 0.0)) {
                throw input_error("negative or non-finite power at " + format_iso_date(r.time.day) + " hour " +
                                  std::to_string(r.time.hour));
            }
            if (i > 0) {
                const long prev = records_[i - 1].time.hour_index();
                const long cur = r.time.hour_index();
                if (cur == prev) {
                    throw input_error("duplicate timestamp " + format_iso_date(r.time.day) + " hour " +
                                      std::to_string(r.time.hour));
                }
                if (cur < prev) {
                    throw input_error("rows out of chronological order at " + format_iso_date(r.time.day) +
                                      " hour " + std::to_string(r.time.hour));
                }
                if (cur != prev + 1) {
                    throw input_error("non-hourly spacing before " + format_iso_date(r.time.day) + " hour " +
                                      std::to_string(r.time.hour) + " (declare gaps with an empty power field)");
                }
            }
        }
    }

    const std::vector<Record>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

    /// Distinct calendar days covered, ascending.
    std::vector<DayOrdinal> days() const {
        std::vector<DayOrdinal> out;
        for (const auto& r : records_) {
            if (out.empty() || out.back() != r.time.day) out.push_back(r.time.day);
        }
        return out;
    }

    /// Records with day < `first_excluded_day`.
    SolarSeries before(DayOrdinal first_excluded_day) const {
        SolarSeries out;
        for (const auto& r : records_) {
            if (r.time.day < first_excluded_day) out.records_.push_back(r);
        }
        return out;
    }

    friend bool operator==(const SolarSeries&, const SolarSeries&) = default;

private:
    std::vector<Record> records_;
};

struct HourSlice {
    int hour = 0;
    std::vector<double> values;
    std::vector<DayOrdinal> day_index;
    std::size_t missing_days = 0;  // days in range with a declared gap at this hour

    std::size_t size() const noexcept { return values.size(); }
    bool empty() const noexcept { return values.empty(); }
    double missing_fraction() const noexcept {
        const auto total = values.size() + missing_days;
        return total == 0 ? 0.0 : static_cast<double>(missing_days) / static_cast<double>(total);
    }
};

/// Hours forced to zero output. Everything else is modeled.
class NightMask {
public:
    NightMask() = default;
    explicit NightMask(std::set<int> zero_hours) : zero_hours_(std::move(zero_hours)) {
        for (int h : zero_hours_) {
            if (h < 0 || h >= kHoursPerDay) throw std::invalid_argument("night hour out of range");
        }
    }

    const std::set<int>& zero_hours() const noexcept { return zero_hours_; }
    bool is_night(int hour) const { return zero_hours_.count(hour) != 0; }

    std::vector<int> modeled_hours() const {
        std::vector<int> out;
        for (int h = 0; h < kHoursPerDay; ++h) {
            if (!is_night(h)) out.push_back(h);
        }
        return out;
    }

    friend bool operator==(const NightMask&, const NightMask&) = default;

private:
    std::set<int> zero_hours_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

}  // namespace detail

/// Reads the `date,hour,power_mw` CSV format. An empty power field declares
/// a missing observation.
inline SolarSeries load_series(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& what) {
        throw input_error("line " + std::to_string(line_no) + ": " + what);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!detail::trim(line).empty()) break;
    }
    if (line_no == 0 || detail::trim(line).empty()) throw input_error("empty input: missing header");
    const auto header = detail::split_csv(line);
    if (header.size() != 3 || header[0] != "date" || header[1] != "hour" || header[2] != "power_mw") {
        fail("expected header 'date,hour,power_mw'");
    }

    std::vector<Record> records;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_csv(line);
        if (fields.size() != 3) fail("expected 3 fields");
        const auto day = parse_iso_date(fields[0]);
        if (!day) fail("bad date '" + std::string(fields[0]) + "'");
        int hour = -1;
        {
            auto [ptr, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), hour);
            if (ec != std::errc{} || ptr != fields[1].data() + fields[1].size() || hour < 0 || hour > 23) {
                fail("bad hour '" + std::string(fields[1]) + "'");
            }
        }
        std::optional<double> power;
        if (!fields[2].empty()) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), v);
            if (ec != std::errc{} || ptr != fields[2].data() + fields[2].size()) {
                fail("bad power '" + std::string(fields[2]) + "'");
            }
            power = v;
        }
        records.push_back(Record{Timestamp{*day, hour}, power});
    }
    return SolarSeries(std::move(records));
}

inline SolarSeries load_series_from_string(const std::string& text) {
    std::istringstream in(text);
    return load_series(in);
}

inline void write_series(std::ostream& out, const SolarSeries& series) {
    out << "date,hour,power_mw\n";
    for (const auto& r : series.records()) {
        out << format_iso_date(r.time.day) << ',' << r.time.hour << ',';
        if (r.power_mw) out << format_double(*r.power_mw);
        out << '\n';
    }
}

/// An hour is night iff every observation at it is <= threshold.
inline NightMask detect_night_hours(const SolarSeries& series, double threshold_mw = 0.0) {
    if (series.empty()) throw std::invalid_argument("detect_night_hours: empty series");
    if (!(threshold_mw >= 0.0)) throw std::invalid_argument("detect_night_hours: negative threshold");
    std::array<bool, kHoursPerDay> all_low{};
    all_low.fill(true);
    for (const auto& r : series.records()) {
        if (r.power_mw && *r.power_mw > threshold_mw) all_low[static_cast<std::size_t>(r.time.hour)] = false;
    }
    std::set<int> zero;
    for (int h = 0; h < kHoursPerDay; ++h) {
        if (all_low[static_cast<std::size_t>(h)]) zero.insert(h);
    }
    return NightMask(std::move(zero));
}

inline HourSlice slice_by_hour(const SolarSeries& series, int hour) {
    if (hour < 0 || hour >= kHoursPerDay) throw std::invalid_argument("slice_by_hour: hour out of range");
    HourSlice s;
    s.hour = hour;
    for (const auto& r : series.records()) {
        if (r.time.hour != hour) continue;
        if (r.power_mw) {
            s.values.push_back(*r.power_mw);
            s.day_index.push_back(r.time.day);
        } else {
            ++s.missing_days;
        }
    }
    return s;
}

/// Observed values in chronological order, gaps dropped.
inline std::vector<double> observed_values(const SolarSeries& series) {
    std::vector<double> out;
    out.reserve(series.size());
    for (const auto& r : series.records()) {
        if (r.power_mw) out.push_back(*r.power_mw);
    }
    return out;
}

/// First day of the held-out window when the last `test_fraction` of days is
/// reserved for evaluation.
inline DayOrdinal split_day_by_fraction(const SolarSeries& series, double test_fraction) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw std::invalid_argument("test fraction must lie in (0,1)");
    }
    const auto days = series.days();
    if (days.size() < 2) throw std::invalid_argument("need at least two days to split");
    auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(days.size()) * (1.0 - test_fraction)));
    n_train = std::clamp<std::size_t>(n_train, 1, days.size() - 1);
    return days[n_train];
}

}  // namespace pvarma
