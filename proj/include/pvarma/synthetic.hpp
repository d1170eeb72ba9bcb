#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "pvarma/random.hpp"
#include "pvarma/series_store.hpp"

namespace pvarma {

/// Generator for solar-like test data: a bell-shaped mean over the daylight
/// hours plus an independent day-to-day AR(1) deviation at each hour, clipped
/// at zero. Night hours are exactly zero.
struct SyntheticOptions {
    std::size_t days = 365;
    DayOrdinal first_day = 18262;  // 2020-01-01
    int first_light = 6;
    int last_light = 19;
    double peak_mw = 1200.0;
    double phi = 0.5;
    double noise_fraction = 0.15;  // innovation sd as a fraction of the hourly mean
    bool diurnal = true;           // false: every hour i.i.d. around peak_mw / 2
    std::uint64_t seed = 1;
};

inline double synthetic_mean_profile(const SyntheticOptions& o, int hour) {
    if (!o.diurnal) return 0.5 * o.peak_mw;
    if (hour < o.first_light || hour > o.last_light) return 0.0;
    const double span = static_cast<double>(o.last_light - o.first_light + 2);
    const double s = std::sin(std::numbers::pi * (hour - o.first_light + 1) / span);
    return o.peak_mw * s * s;
}

inline SolarSeries synthetic_series(const SyntheticOptions& o) {
    Rng rng(o.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> deviation(kHoursPerDay, 0.0);
    std::vector<Record> records;
    records.reserve(o.days * kHoursPerDay);
    for (std::size_t d = 0; d < o.days; ++d) {
        for (int h = 0; h < kHoursPerDay; ++h) {
            const double mean = synthetic_mean_profile(o, h);
            double value = 0.0;
            if (mean > 0.0) {
                const double sd = o.noise_fraction * mean;
                auto& dev = deviation[static_cast<std::size_t>(h)];
                const double eps = sd * normal(rng);
                if (!o.diurnal) {
                    dev = eps;
                } else if (d == 0) {
                    dev = eps / std::sqrt(1.0 - o.phi * o.phi);
                } else {
                    dev = o.phi * dev + eps;
                }
                value = std::max(mean + dev, 0.0);
            }
            records.push_back({Timestamp{o.first_day + static_cast<DayOrdinal>(d), h}, value});
        }
    }
    return SolarSeries(std::move(records));
}

}  // namespace pvarma
