#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pvarma/arma.hpp"
#include "pvarma/model_selector.hpp"
#include "pvarma/series_store.hpp"

namespace pvarma {

namespace detail {
inline void check_metric_inputs(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size()) throw std::invalid_argument("metric: length mismatch");
    if (actual.empty()) throw std::invalid_argument("metric: empty input");
}
}  // namespace detail

inline double mae(std::span<const double> actual, std::span<const double> predicted) {
    detail::check_metric_inputs(actual, predicted);
    double s = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) s += std::abs(actual[i] - predicted[i]);
    return s / static_cast<double>(actual.size());
}

inline double rmse(std::span<const double> actual, std::span<const double> predicted) {
    detail::check_metric_inputs(actual, predicted);
    double s = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) s += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
    return std::sqrt(s / static_cast<double>(actual.size()));
}

struct MetricReport {
    double mae = 0.0;
    double rmse = 0.0;
    double mae_pct_of_max = 0.0;   // relative to the largest actual value
    double rmse_pct_of_max = 0.0;
    std::size_t n_points = 0;
};

inline MetricReport metric_report(std::span<const double> actual, std::span<const double> predicted) {
    MetricReport r;
    r.mae = mae(actual, predicted);
    r.rmse = rmse(actual, predicted);
    r.n_points = actual.size();
    const double peak = *std::max_element(actual.begin(), actual.end());
    if (peak > 0.0) {
        r.mae_pct_of_max = 100.0 * r.mae / peak;
        r.rmse_pct_of_max = 100.0 * r.rmse / peak;
    }
    return r;
}

/// Mean of the `window` values preceding each index in [first, values.size()).
inline std::vector<double> smart_persistence(std::span<const double> values, std::size_t window, std::size_t first) {
    if (window < 1) throw std::invalid_argument("smart_persistence: window must be >= 1");
    if (first < window) throw std::invalid_argument("smart_persistence: insufficient history before first prediction");
    std::vector<double> out;
    out.reserve(values.size() - std::min(first, values.size()));
    for (std::size_t t = first; t < values.size(); ++t) {
        double s = 0.0;
        for (std::size_t k = 1; k <= window; ++k) s += values[t - k];
        out.push_back(s / static_cast<double>(window));
    }
    return out;
}

/// One evaluated hour of the held-out window.
struct EvalPoint {
    Timestamp time;
    double actual = 0.0;
    double predicted = 0.0;
    bool flagged = false;  // prediction used a fallback rule
};

inline MetricReport metric_report(const std::vector<EvalPoint>& points) {
    std::vector<double> a, p;
    a.reserve(points.size());
    p.reserve(points.size());
    for (const auto& e : points) {
        a.push_back(e.actual);
        p.push_back(e.predicted);
    }
    return metric_report(a, p);
}

namespace detail {

struct ObservedPoint {
    Timestamp time;
    double value;
};

inline std::vector<ObservedPoint> observed_points(const SolarSeries& series) {
    std::vector<ObservedPoint> out;
    for (const auto& r : series.records()) {
        if (r.power_mw) out.push_back({r.time, *r.power_mw});
    }
    return out;
}

/// Rolling one-step forecasts from a frozen model for every index >= first.
/// Residuals are continued through the observed values.
inline std::vector<double> rolling_one_step(const ArmaModel& m, std::span<const double> values, std::size_t first) {
    const auto e = conditional_residuals(m, values);
    std::vector<double> out;
    for (std::size_t t = first; t < values.size(); ++t) {
        if (t < static_cast<std::size_t>(std::max(m.p, m.q))) {
            throw std::invalid_argument("rolling forecast: insufficient history before first test point");
        }
        out.push_back(forecast_one_step(m, values.first(t), std::span<const double>(e).first(t)));
    }
    return out;
}

}  // namespace detail

/// Day-ahead hourly-model predictions over every observed point on or after
/// `test_start`: modeled hours use their own frozen model one step ahead of
/// the previous day, night hours are zero, negatives are truncated to zero.
inline std::vector<EvalPoint> hourly_predictions(const SolarSeries& series, const std::vector<FitReport>& reports,
                                                 const NightMask& mask, DayOrdinal test_start) {
    std::map<int, const FitReport*> by_hour;
    for (const auto& r : reports) {
        if (r.ok()) by_hour[r.hour] = &r;
    }
    std::map<std::pair<DayOrdinal, int>, double> predicted;
    for (int h : mask.modeled_hours()) {
        auto it = by_hour.find(h);
        if (it == by_hour.end()) throw std::invalid_argument("no fitted model for modeled hour " + std::to_string(h));
        const auto slice = slice_by_hour(series, h);
        const auto first = static_cast<std::size_t>(
            std::lower_bound(slice.day_index.begin(), slice.day_index.end(), test_start) - slice.day_index.begin());
        const auto preds = detail::rolling_one_step(it->second->model, slice.values, first);
        for (std::size_t i = 0; i < preds.size(); ++i) {
            predicted[{slice.day_index[first + i], h}] = std::max(preds[i], 0.0);
        }
    }
    std::vector<EvalPoint> out;
    for (const auto& r : series.records()) {
        if (r.time.day < test_start || !r.power_mw) continue;
        EvalPoint e{r.time, *r.power_mw, 0.0, false};
        if (!mask.is_night(r.time.hour)) e.predicted = predicted.at({r.time.day, r.time.hour});
        out.push_back(e);
    }
    return out;
}

struct SingleArmaResult {
    ArmaModel model;
    std::vector<GridEntry> grid;
    MetricReport metrics;
    std::vector<EvalPoint> points;
};

/// One ARMA model on the whole chronological series (night hours included),
/// order chosen by the same BIC grid, evaluated one step ahead on the held-out
/// window with frozen parameters.
inline SingleArmaResult fit_single_arma(const SolarSeries& series, DayOrdinal test_start, const OrderGrid& grid,
                                        const SelectOptions& opt = {}) {
    const auto obs = detail::observed_points(series);
    std::vector<double> values;
    values.reserve(obs.size());
    for (const auto& o : obs) values.push_back(o.value);
    const auto first = static_cast<std::size_t>(
        std::find_if(obs.begin(), obs.end(), [&](const auto& o) { return o.time.day >= test_start; }) - obs.begin());
    if (first == obs.size()) throw std::invalid_argument("fit_single_arma: empty test window");

    constexpr std::uint64_t kSingleStream = 1000;
    auto search = search_orders(std::span<const double>(values).first(first), grid, opt, kSingleStream);
    SingleArmaResult out;
    out.model = search.fit.model;
    out.grid = std::move(search.grid);
    const auto preds = detail::rolling_one_step(out.model, values, first);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        out.points.push_back({obs[first + i].time, obs[first + i].value, std::max(preds[i], 0.0), false});
    }
    out.metrics = metric_report(out.points);
    return out;
}

enum class PersistenceVariant {
    ClockHours,     // previous h observations in the chronological series
    SameHourDays,   // same hour on the previous h days
};

/// Smart-Persistence over the held-out window. In the clock-hour variant a
/// window made only of night hours falls back to the most recent nonzero
/// observation and the point is flagged.
inline std::vector<EvalPoint> persistence_predictions(const SolarSeries& series, const NightMask& mask,
                                                      DayOrdinal test_start, std::size_t window = 2,
                                                      PersistenceVariant variant = PersistenceVariant::ClockHours) {
    std::vector<EvalPoint> out;
    if (variant == PersistenceVariant::ClockHours) {
        const auto obs = detail::observed_points(series);
        std::vector<double> values;
        for (const auto& o : obs) values.push_back(o.value);
        const auto first = static_cast<std::size_t>(
            std::find_if(obs.begin(), obs.end(), [&](const auto& o) { return o.time.day >= test_start; }) - obs.begin());
        const auto preds = smart_persistence(values, window, first);
        for (std::size_t i = 0; i < preds.size(); ++i) {
            const std::size_t t = first + i;
            EvalPoint e{obs[t].time, obs[t].value, preds[i], false};
            bool all_night = !mask.is_night(obs[t].time.hour);
            for (std::size_t k = 1; k <= window && all_night; ++k) all_night = mask.is_night(obs[t - k].time.hour);
            if (all_night) {
                e.flagged = true;
                e.predicted = 0.0;
                for (std::size_t k = t; k-- > 0;) {
                    if (values[k] > 0.0) {
                        e.predicted = values[k];
                        break;
                    }
                }
            }
            out.push_back(e);
        }
        return out;
    }

    std::map<std::pair<DayOrdinal, int>, double> predicted;
    for (int h = 0; h < kHoursPerDay; ++h) {
        const auto slice = slice_by_hour(series, h);
        const auto first = static_cast<std::size_t>(
            std::lower_bound(slice.day_index.begin(), slice.day_index.end(), test_start) - slice.day_index.begin());
        if (first == slice.size()) continue;
        const auto preds = smart_persistence(slice.values, window, first);
        for (std::size_t i = 0; i < preds.size(); ++i) predicted[{slice.day_index[first + i], h}] = preds[i];
    }
    for (const auto& r : series.records()) {
        if (r.time.day < test_start || !r.power_mw) continue;
        out.push_back({r.time, *r.power_mw, predicted.at({r.time.day, r.time.hour}), false});
    }
    return out;
}

struct ComparisonOptions {
    SelectOptions select{};
    std::size_t persistence_window = 2;
    PersistenceVariant persistence_variant = PersistenceVariant::ClockHours;
};

struct Comparison {
    MetricReport hourly;
    MetricReport single;
    MetricReport persistence;
    std::vector<EvalPoint> hourly_points;
    std::vector<EvalPoint> single_points;
    std::vector<EvalPoint> persistence_points;
    std::size_t persistence_fallbacks = 0;
    int single_p = 0;
    int single_q = 0;
};

/// Hourly ARMA, single ARMA and Smart-Persistence on the same held-out points.
/// Models are fitted on days before `test_start` only.
inline Comparison compare_models(const SolarSeries& series, const NightMask& mask, const OrderGrid& grid,
                                 DayOrdinal test_start, const ComparisonOptions& opt = {}) {
    const auto train = series.before(test_start);
    if (train.empty()) throw std::invalid_argument("compare_models: empty training window");
    const bool any_test = std::any_of(series.records().begin(), series.records().end(),
                                      [&](const Record& r) { return r.time.day >= test_start && r.power_mw; });
    if (!any_test) throw std::invalid_argument("compare_models: empty test window");

    Comparison c;
    const auto reports = fit_all_hours(train, mask, grid, opt.select);
    for (const auto& r : reports) {
        if (!r.ok()) throw selection_error(*r.error);
    }
    c.hourly_points = hourly_predictions(series, reports, mask, test_start);
    auto single = fit_single_arma(series, test_start, grid, opt.select);
    c.single_points = std::move(single.points);
    c.single_p = single.model.p;
    c.single_q = single.model.q;
    c.persistence_points =
        persistence_predictions(series, mask, test_start, opt.persistence_window, opt.persistence_variant);
    for (const auto& e : c.persistence_points) c.persistence_fallbacks += e.flagged ? 1 : 0;

    const auto same_window = [&](const std::vector<EvalPoint>& other) {
        if (other.size() != c.hourly_points.size()) return false;
        for (std::size_t i = 0; i < other.size(); ++i) {
            if (!(other[i].time == c.hourly_points[i].time)) return false;
        }
        return true;
    };
    if (!same_window(c.single_points) || !same_window(c.persistence_points)) {
        throw std::logic_error("compare_models: methods evaluated on different points");
    }
    c.hourly = metric_report(c.hourly_points);
    c.single = metric_report(c.single_points);
    c.persistence = metric_report(c.persistence_points);
    return c;
}

inline void write_comparison_csv(std::ostream& out, const Comparison& c) {
    out << "metric,hourly_arma,single_arma,smart_persistence\n";
    out << "mae_mw," << format_double(c.hourly.mae) << ',' << format_double(c.single.mae) << ','
        << format_double(c.persistence.mae) << '\n';
    out << "rmse_mw," << format_double(c.hourly.rmse) << ',' << format_double(c.single.rmse) << ','
        << format_double(c.persistence.rmse) << '\n';
    out << "n_points," << c.hourly.n_points << ',' << c.single.n_points << ',' << c.persistence.n_points << '\n';
}

inline void write_comparison_table(std::ostream& out, const Comparison& c) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2);
    s << std::left << std::setw(12) << "" << std::right << std::setw(14) << "Hourly ARMA" << std::setw(14)
      << "Single ARMA" << std::setw(14) << "Smart-Pers" << '\n';
    s << std::left << std::setw(12) << "MAE (MW)" << std::right << std::setw(14) << c.hourly.mae << std::setw(14)
      << c.single.mae << std::setw(14) << c.persistence.mae << '\n';
    s << std::left << std::setw(12) << "RMSE (MW)" << std::right << std::setw(14) << c.hourly.rmse << std::setw(14)
      << c.single.rmse << std::setw(14) << c.persistence.rmse << '\n';
    s << std::left << std::setw(12) << "points" << std::right << std::setw(14) << c.hourly.n_points << std::setw(14)
      << c.single.n_points << std::setw(14) << c.persistence.n_points << '\n';
    out << s.str();
}

}  // namespace pvarma
