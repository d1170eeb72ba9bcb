#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "pvarma/arma.hpp"
#include "pvarma/diagnostics.hpp"
#include "pvarma/random.hpp"
#include "pvarma/series_store.hpp"

namespace pvarma {

/// Raised when no candidate order could be fitted for an hour.
class selection_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OrderGrid {
    int p_min = 1;
    int p_max = 4;
    int q_min = 1;
    int q_max = 4;

    void validate() const {
        if (p_min < 0 || q_min < 0 || p_max < p_min || q_max < q_min) {
            throw std::invalid_argument("order grid ranges must be nonempty and nonnegative");
        }
    }
    std::size_t size() const {
        return static_cast<std::size_t>((p_max - p_min + 1) * (q_max - q_min + 1));
    }
    bool contains(int p, int q) const { return p >= p_min && p <= p_max && q >= q_min && q <= q_max; }

    friend bool operator==(const OrderGrid&, const OrderGrid&) = default;
};

struct GridEntry {
    int p = 0;
    int q = 0;
    bool success = false;
    double loglik = 0.0;
    double bic = std::numeric_limits<double>::infinity();
    std::string error;  // set when success is false
};

struct FitReport {
    int hour = 0;
    std::optional<AdfResult> adf;  // absent when the test could not run
    std::vector<GridEntry> grid;
    int chosen_p = 0;
    int chosen_q = 0;
    ArmaModel model;
    std::vector<LjungBoxResult> ljung_box;
    // conditioning state at the end of the fitted slice
    std::vector<double> history_tail;   // last p observations
    std::vector<double> residual_tail;  // last q residuals
    DayOrdinal last_day = 0;
    std::vector<std::string> warnings;
    std::optional<std::string> error;  // hour-level failure; other fields unset

    bool ok() const { return !error.has_value(); }
    bool possibly_nonstationary() const { return !adf || !adf->reject_unit_root; }
};

struct SelectOptions {
    std::uint64_t seed = 0;
    std::vector<int> ljung_box_lags{5, 10, 15};
    FitOptions fit{};
    AdfOptions adf{};
    double missing_warning_fraction = 0.05;
};

namespace detail {

/// Strict ordering used for the argmin: BIC, then p + q, then p.
inline bool better_candidate(const GridEntry& a, const GridEntry& b) {
    return std::make_tuple(a.bic, a.p + a.q, a.p) < std::make_tuple(b.bic, b.p + b.q, b.p);
}

}  // namespace detail

struct OrderSearch {
    std::vector<GridEntry> grid;
    GridEntry best;
    FitResult fit;
};

/// Fits every order in `grid` and returns the minimum-BIC candidate. Fit
/// seeds derive from (opt.seed, stream, p, q).
inline OrderSearch search_orders(std::span<const double> values, const OrderGrid& grid, const SelectOptions& opt,
                                 std::uint64_t stream) {
    grid.validate();
    OrderSearch out;
    std::optional<FitResult> best_fit;
    std::optional<GridEntry> best_entry;
    for (int p = grid.p_min; p <= grid.p_max; ++p) {
        for (int q = grid.q_min; q <= grid.q_max; ++q) {
            GridEntry e;
            e.p = p;
            e.q = q;
            try {
                FitOptions fo = opt.fit;
                fo.seed = substream_seed(opt.seed, {stream, static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(q)});
                auto fr = fit(values, p, q, fo);
                e.success = true;
                e.loglik = fr.model.loglik;
                e.bic = bic(fr.model.loglik, fr.model.n_obs, p, q);
                out.grid.push_back(e);
                if (!best_entry || detail::better_candidate(e, *best_entry)) {
                    best_entry = e;
                    best_fit = std::move(fr);
                }
            } catch (const std::exception& ex) {
                e.error = ex.what();
                out.grid.push_back(e);
            }
        }
    }
    if (!best_fit) throw selection_error("every candidate fit failed");
    out.best = *best_entry;
    out.fit = std::move(*best_fit);
    return out;
}

/// Per-hour methodology: ADF check, fit every order in the grid, keep the
/// minimum-BIC model, then test its residuals with Ljung-Box. Test outcomes
/// are recorded, never fatal.
inline FitReport select_model(const HourSlice& slice, const OrderGrid& grid, const SelectOptions& opt = {}) {
    grid.validate();
    if (slice.empty()) throw selection_error("empty slice");

    FitReport rep;
    rep.hour = slice.hour;
    rep.last_day = slice.day_index.empty() ? 0 : slice.day_index.back();
    if (slice.missing_fraction() > opt.missing_warning_fraction) {
        rep.warnings.push_back("hour " + std::to_string(slice.hour) + ": " +
                               std::to_string(slice.missing_days) + " missing days (" +
                               format_double(100.0 * slice.missing_fraction()) + "%)");
    }

    try {
        rep.adf = adf_test(slice.values, opt.adf);
        if (!rep.adf->reject_unit_root) {
            rep.warnings.push_back("ADF does not reject a unit root; series may be non-stationary");
        }
    } catch (const std::invalid_argument& e) {
        rep.warnings.push_back(std::string("ADF not computed: ") + e.what());
    }

    auto search = search_orders(slice.values, grid, opt, static_cast<std::uint64_t>(slice.hour));
    rep.grid = std::move(search.grid);
    rep.chosen_p = search.best.p;
    rep.chosen_q = search.best.q;
    rep.model = search.fit.model;
    const auto& res = search.fit.residuals.values;
    for (int lag : opt.ljung_box_lags) {
        try {
            rep.ljung_box.push_back(ljung_box(res, lag, rep.chosen_p + rep.chosen_q));
            if (rep.ljung_box.back().reject_white) {
                rep.warnings.push_back("Ljung-Box rejects white residuals at lag " + std::to_string(lag));
            }
        } catch (const std::invalid_argument& e) {
            rep.warnings.push_back("Ljung-Box lag " + std::to_string(lag) + " skipped: " + e.what());
        }
    }
    rep.history_tail.assign(slice.values.end() - rep.chosen_p, slice.values.end());
    rep.residual_tail.assign(res.end() - rep.chosen_q, res.end());
    return rep;
}

/// One report per modeled hour, in hour order. A failing hour carries its
/// error and does not affect the others.
inline std::vector<FitReport> fit_all_hours(const SolarSeries& series, const NightMask& mask, const OrderGrid& grid,
                                            const SelectOptions& opt = {}) {
    std::vector<FitReport> out;
    for (int hour : mask.modeled_hours()) {
        try {
            out.push_back(select_model(slice_by_hour(series, hour), grid, opt));
        } catch (const std::exception& e) {
            FitReport failed;
            failed.hour = hour;
            failed.error = std::string("hour ") + std::to_string(hour) + ": " + e.what();
            out.push_back(std::move(failed));
        }
    }
    return out;
}

}  // namespace pvarma
