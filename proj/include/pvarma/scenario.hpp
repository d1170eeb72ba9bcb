#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pvarma/arma.hpp"
#include "pvarma/model_selector.hpp"
#include "pvarma/random.hpp"
#include "pvarma/series_store.hpp"

namespace pvarma {

using DayProfile = std::array<double, kHoursPerDay>;

/// Day-ahead scenarios (one row per scenario, one column per hour) after
/// truncation at zero, plus counters over the raw modeled-hour draws.
struct ScenarioSet {
    std::vector<DayProfile> scenarios;
    std::uint64_t seed = 0;
    std::size_t truncated_count = 0;   // raw draws < 0
    std::size_t below_neg5_count = 0;  // raw draws < -5 MW
    std::size_t raw_draw_count = 0;    // draws at modeled hours

    std::size_t size() const noexcept { return scenarios.size(); }
    friend bool operator==(const ScenarioSet&, const ScenarioSet&) = default;
};

/// Samples each modeled hour independently from its own model, one step ahead
/// of the conditioning state stored in its report. Row r, hour h draws from
/// substream (seed, r, h), so rows can be produced in any order.
inline ScenarioSet generate_scenarios(const std::vector<FitReport>& reports, const NightMask& mask, std::size_t n,
                                      std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("generate_scenarios: need at least one scenario");
    std::map<int, const FitReport*> by_hour;
    for (const auto& r : reports) {
        if (r.ok()) by_hour[r.hour] = &r;
    }
    const auto modeled = mask.modeled_hours();
    for (int h : modeled) {
        if (!by_hour.count(h)) throw std::invalid_argument("generate_scenarios: no model for modeled hour " + std::to_string(h));
    }

    ScenarioSet set;
    set.seed = seed;
    set.scenarios.assign(n, DayProfile{});
    for (std::size_t row = 0; row < n; ++row) {
        auto& day = set.scenarios[row];
        for (int h : modeled) {
            const auto& rep = *by_hour.at(h);
            const double raw = simulate(rep.model, 1, rep.history_tail, rep.residual_tail,
                                        substream_seed(seed, {row, static_cast<std::uint64_t>(h)}))[0];
            ++set.raw_draw_count;
            if (raw < 0.0) ++set.truncated_count;
            if (raw < -5.0) ++set.below_neg5_count;
            day[static_cast<std::size_t>(h)] = std::max(raw, 0.0);
        }
    }
    return set;
}

/// (fraction of raw draws below 0, fraction below -5 MW), over modeled hours only.
inline std::pair<double, double> negative_rate_report(const ScenarioSet& set) {
    if (set.raw_draw_count == 0) return {0.0, 0.0};
    const auto d = static_cast<double>(set.raw_draw_count);
    return {static_cast<double>(set.truncated_count) / d, static_cast<double>(set.below_neg5_count) / d};
}

/// Linear interpolation between order statistics: position (n - 1) p, zero-based.
inline double empirical_quantile(std::vector<double> values, double prob) {
    if (values.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
    if (!(prob >= 0.0 && prob <= 1.0)) throw std::invalid_argument("empirical_quantile: prob outside [0,1]");
    std::sort(values.begin(), values.end());
    const double h = static_cast<double>(values.size() - 1) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

struct QuantileBands {
    std::vector<double> probs;
    std::vector<DayProfile> levels;  // levels[k][hour] is the probs[k] quantile

    const DayProfile& at(double prob) const {
        for (std::size_t k = 0; k < probs.size(); ++k) {
            if (std::abs(probs[k] - prob) < 1e-12) return levels[k];
        }
        throw std::out_of_range("QuantileBands: probability " + format_double(prob) + " not computed");
    }
    const DayProfile& q10() const { return at(0.1); }
    const DayProfile& median() const { return at(0.5); }
    const DayProfile& q90() const { return at(0.9); }
};

inline QuantileBands quantile_bands(const ScenarioSet& set, const std::vector<double>& probs) {
    if (set.scenarios.empty()) throw std::invalid_argument("quantile_bands: empty scenario set");
    for (double p : probs) {
        if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile_bands: probabilities must lie in (0,1)");
    }
    QuantileBands b;
    b.probs = probs;
    b.levels.assign(probs.size(), DayProfile{});
    std::vector<double> column(set.size());
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
        for (std::size_t r = 0; r < set.size(); ++r) column[r] = set.scenarios[r][h];
        std::sort(column.begin(), column.end());
        for (std::size_t k = 0; k < probs.size(); ++k) b.levels[k][h] = empirical_quantile(column, probs[k]);
    }
    return b;
}

inline void write_scenarios_csv(std::ostream& out, const ScenarioSet& set) {
    out << "scenario_id";
    for (int h = 0; h < kHoursPerDay; ++h) out << ",h" << (h < 10 ? "0" : "") << h;
    out << '\n';
    for (std::size_t r = 0; r < set.size(); ++r) {
        out << r;
        for (double v : set.scenarios[r]) out << ',' << format_double(v);
        out << '\n';
    }
}

/// Column label for a probability: q10, median, q90, otherwise q<percent>.
inline std::string quantile_label(double prob) {
    if (std::abs(prob - 0.5) < 1e-12) return "median";
    std::string pct = format_double(std::round(prob * 1e8) / 1e6);
    std::replace(pct.begin(), pct.end(), '.', '_');
    return "q" + pct;
}

inline void write_quantiles_csv(std::ostream& out, const QuantileBands& bands) {
    out << "hour";
    for (double p : bands.probs) out << ',' << quantile_label(p);
    out << '\n';
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
        out << h;
        for (const auto& level : bands.levels) out << ',' << format_double(level[h]);
        out << '\n';
    }
}

}  // namespace pvarma
