#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pvarma/evaluation.hpp"
#include "pvarma/json_io.hpp"
#include "pvarma/model_selector.hpp"
#include "pvarma/scenario.hpp"
#include "pvarma/series_store.hpp"

namespace pvarma::cli {

enum ExitCode : int {
    kOk = 0,
    kInvalidInput = 1,
    kSelectionFailure = 2,
};

/// Run configuration. Defaults reproduce the reference settings: orders 1..4,
/// Ljung-Box lags 5/10/15, 2000 scenarios, 10/50/90% bands.
struct RunConfig {
    std::string data_path;
    std::string models_path;  // empty: <out_dir>/models.json
    std::string split = "0.2";  // held-out fraction of days, or ISO date of the first test day
    OrderGrid grid{};
    std::vector<int> ljung_box_lags{5, 10, 15};
    std::size_t n_scenarios = 2000;
    std::vector<double> quantiles{0.1, 0.5, 0.9};
    std::uint64_t seed = 1;
    double night_threshold = 0.0;
    std::string out_dir = ".";
    int random_restarts = 3;
    std::size_t persistence_window = 2;
    std::string persistence_variant = "clock-hours";  // or "same-hour-days"
    std::string condition_through;                     // simulate: ISO date, empty = end of training

    std::string resolved_models_path() const {
        return models_path.empty() ? (std::filesystem::path(out_dir) / "models.json").string() : models_path;
    }
};

/// Command-line values; unset fields fall back to the config file, then defaults.
struct FlagOverrides {
    std::optional<std::string> data, config, out, split, models, condition_through, persistence_variant;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> scenarios, persistence_window;
    std::optional<int> grid_max, restarts;
    std::optional<std::vector<int>> lags;
    std::optional<std::vector<double>> quantiles;
    std::optional<double> night_threshold;
};

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void apply_config_json(RunConfig& c, const json& j) {
    for (const auto& [key, value] : j.items()) {
        if (key == "data") c.data_path = value.get<std::string>();
        else if (key == "models") c.models_path = value.get<std::string>();
        else if (key == "out") c.out_dir = value.get<std::string>();
        else if (key == "split") c.split = value.is_string() ? value.get<std::string>() : format_double(value.get<double>());
        else if (key == "seed") c.seed = value.get<std::uint64_t>();
        else if (key == "scenarios") c.n_scenarios = value.get<std::size_t>();
        else if (key == "grid_max") c.grid.p_max = c.grid.q_max = value.get<int>();
        else if (key == "grid") {
            c.grid.p_min = value.value("p_min", c.grid.p_min);
            c.grid.p_max = value.value("p_max", c.grid.p_max);
            c.grid.q_min = value.value("q_min", c.grid.q_min);
            c.grid.q_max = value.value("q_max", c.grid.q_max);
        } else if (key == "lags") c.ljung_box_lags = value.get<std::vector<int>>();
        else if (key == "quantiles") c.quantiles = value.get<std::vector<double>>();
        else if (key == "night_threshold") c.night_threshold = value.get<double>();
        else if (key == "restarts") c.random_restarts = value.get<int>();
        else if (key == "persistence_window") c.persistence_window = value.get<std::size_t>();
        else if (key == "persistence_variant") c.persistence_variant = value.get<std::string>();
        else if (key == "condition_through") c.condition_through = value.get<std::string>();
        else throw config_error("unknown config key '" + key + "'");
    }
}

inline void validate(const RunConfig& c) {
    try {
        c.grid.validate();
    } catch (const std::exception& e) {
        throw config_error(e.what());
    }
    if (c.ljung_box_lags.empty()) throw config_error("at least one Ljung-Box lag is required");
    for (int l : c.ljung_box_lags) {
        if (l < 1) throw config_error("Ljung-Box lags must be positive");
    }
    if (c.n_scenarios < 1) throw config_error("scenario count must be >= 1");
    for (double p : c.quantiles) {
        if (!(p > 0.0 && p < 1.0)) throw config_error("quantile probabilities must lie in (0,1)");
    }
    if (!(c.night_threshold >= 0.0)) throw config_error("night threshold must be >= 0");
    if (c.random_restarts < 0) throw config_error("restarts must be >= 0");
    if (c.persistence_window < 1) throw config_error("persistence window must be >= 1");
    if (c.persistence_variant != "clock-hours" && c.persistence_variant != "same-hour-days") {
        throw config_error("persistence variant must be 'clock-hours' or 'same-hour-days'");
    }
    if (!parse_iso_date(c.split)) {
        double f = 0.0;
        std::istringstream in(c.split);
        if (!(in >> f) || !in.eof() || !(f > 0.0 && f < 1.0)) {
            throw config_error("split must be a fraction in (0,1) or an ISO date, got '" + c.split + "'");
        }
    }
    if (!c.condition_through.empty() && !parse_iso_date(c.condition_through)) {
        throw config_error("condition_through must be an ISO date");
    }
}

/// flags > config file > defaults
inline RunConfig resolve_config(const FlagOverrides& f) {
    RunConfig c;
    if (f.config) {
        std::ifstream in(*f.config);
        if (!in) throw config_error("cannot open config file '" + *f.config + "'");
        json j;
        try {
            j = json::parse(in);
        } catch (const std::exception& e) {
            throw config_error("config file '" + *f.config + "': " + e.what());
        }
        try {
            apply_config_json(c, j);
        } catch (const json::exception& e) {
            throw config_error("config file '" + *f.config + "': " + e.what());
        }
    }
    if (f.data) c.data_path = *f.data;
    if (f.out) c.out_dir = *f.out;
    if (f.split) c.split = *f.split;
    if (f.models) c.models_path = *f.models;
    if (f.condition_through) c.condition_through = *f.condition_through;
    if (f.persistence_variant) c.persistence_variant = *f.persistence_variant;
    if (f.seed) c.seed = *f.seed;
    if (f.scenarios) c.n_scenarios = *f.scenarios;
    if (f.persistence_window) c.persistence_window = *f.persistence_window;
    if (f.grid_max) c.grid.p_max = c.grid.q_max = *f.grid_max;
    if (f.restarts) c.random_restarts = *f.restarts;
    if (f.lags) c.ljung_box_lags = *f.lags;
    if (f.quantiles) c.quantiles = *f.quantiles;
    if (f.night_threshold) c.night_threshold = *f.night_threshold;
    validate(c);
    return c;
}

inline json config_to_json(const RunConfig& c) {
    return json{{"data", c.data_path},
                {"split", c.split},
                {"grid", {{"p_min", c.grid.p_min}, {"p_max", c.grid.p_max}, {"q_min", c.grid.q_min}, {"q_max", c.grid.q_max}}},
                {"lags", c.ljung_box_lags},
                {"scenarios", c.n_scenarios},
                {"quantiles", c.quantiles},
                {"seed", c.seed},
                {"night_threshold", c.night_threshold},
                {"restarts", c.random_restarts},
                {"persistence_window", c.persistence_window},
                {"persistence_variant", c.persistence_variant},
                {"condition_through", c.condition_through}};
}

/// FNV-1a over the canonical JSON text of the configuration.
inline std::string config_hash(const RunConfig& c) {
    const std::string text = config_to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << h;
    return s.str();
}

inline SelectOptions select_options(const RunConfig& c) {
    SelectOptions o;
    o.seed = c.seed;
    o.ljung_box_lags = c.ljung_box_lags;
    o.fit.random_restarts = c.random_restarts;
    return o;
}

namespace detail {

inline SolarSeries read_series_file(const std::string& path) {
    if (path.empty()) throw input_error("no data file given (use --data)");
    std::ifstream in(path);
    if (!in) throw input_error("cannot open data file '" + path + "'");
    try {
        return load_series(in);
    } catch (const input_error& e) {
        throw input_error(path + ": " + e.what());
    }
}

inline DayOrdinal resolve_split(const SolarSeries& s, const std::string& split) {
    if (auto d = parse_iso_date(split)) {
        const auto days = s.days();
        if (days.empty() || *d <= days.front()) throw input_error("split date leaves no training days");
        return *d;
    }
    return split_day_by_fraction(s, std::stod(split));
}

inline ModelsDocument read_models_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open models file '" + path + "'");
    try {
        return models_from_json(json::parse(in));
    } catch (const std::exception& e) {
        throw input_error(path + ": " + e.what());
    }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

inline std::string format_timestamp(const Timestamp& t) {
    std::ostringstream s;
    s << format_iso_date(t.day) << 'T' << std::setw(2) << std::setfill('0') << t.hour << ":00";
    return s.str();
}

inline json metrics_json(const MetricReport& m) {
    return json{{"mae", m.mae},
                {"rmse", m.rmse},
                {"mae_pct_of_max", m.mae_pct_of_max},
                {"rmse_pct_of_max", m.rmse_pct_of_max},
                {"n_points", m.n_points}};
}

/// Order summary in the layout of a two-row (p, q) table per block of hours.
inline void print_order_table(std::ostream& out, const std::vector<FitReport>& reports) {
    constexpr std::size_t kBlock = 7;
    for (std::size_t start = 0; start < reports.size(); start += kBlock) {
        const std::size_t end = std::min(reports.size(), start + kBlock);
        out << std::left << std::setw(6) << "Hour";
        for (std::size_t i = start; i < end; ++i) {
            std::ostringstream h;
            h << reports[i].hour << ":00";
            out << std::right << std::setw(7) << h.str();
        }
        out << "\n" << std::left << std::setw(6) << "p";
        for (std::size_t i = start; i < end; ++i) {
            out << std::right << std::setw(7) << (reports[i].ok() ? std::to_string(reports[i].chosen_p) : "-");
        }
        out << "\n" << std::left << std::setw(6) << "q";
        for (std::size_t i = start; i < end; ++i) {
            out << std::right << std::setw(7) << (reports[i].ok() ? std::to_string(reports[i].chosen_q) : "-");
        }
        out << "\n\n";
    }
}

inline void print_diagnostics(std::ostream& out, const std::vector<FitReport>& reports) {
    out << std::left << std::setw(6) << "hour" << std::right << std::setw(10) << "ADF" << std::setw(8) << "stat."
        << "  Ljung-Box (lag:reject)\n";
    for (const auto& r : reports) {
        out << std::left << std::setw(6) << r.hour;
        if (!r.ok()) {
            out << "  FAILED: " << *r.error << '\n';
            continue;
        }
        std::ostringstream adf;
        if (r.adf) adf << std::fixed << std::setprecision(2) << r.adf->statistic;
        else adf << "n/a";
        out << std::right << std::setw(10) << adf.str() << std::setw(8) << (r.possibly_nonstationary() ? "no" : "yes")
            << " ";
        for (const auto& lb : r.ljung_box) out << ' ' << lb.lag << ':' << (lb.reject_white ? "yes" : "no");
        out << '\n';
    }
}

}  // namespace detail

/// Fits every modeled hour on the training window and writes models.json.
inline int cmd_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    SolarSeries series;
    DayOrdinal test_start = 0;
    try {
        series = detail::read_series_file(cfg.data_path);
        if (series.empty()) throw input_error(cfg.data_path + ": no records");
        test_start = detail::resolve_split(series, cfg.split);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }
    const auto train = series.before(test_start);
    const auto mask = detect_night_hours(train, cfg.night_threshold);
    const auto reports = fit_all_hours(train, mask, cfg.grid, select_options(cfg));

    ModelsDocument doc;
    doc.seed = cfg.seed;
    doc.grid = cfg.grid;
    doc.ljung_box_lags = cfg.ljung_box_lags;
    doc.night_threshold = cfg.night_threshold;
    doc.night_hours = mask.zero_hours();
    doc.train_first_day = train.days().front();
    doc.test_start_day = test_start;
    doc.reports = reports;
    const auto path = cfg.resolved_models_path();
    detail::write_text_file(path, models_to_json(doc).dump(2) + "\n");

    out << "night hours (forced to zero):";
    for (int h : mask.zero_hours()) out << ' ' << h;
    out << "\nmodeled hours: " << mask.modeled_hours().size() << "\n\n";
    detail::print_order_table(out, reports);
    detail::print_diagnostics(out, reports);
    out << "\nwrote " << path << '\n';

    bool failed = false;
    for (const auto& r : reports) {
        for (const auto& w : r.warnings) err << "warning: hour " << r.hour << ": " << w << '\n';
        if (!r.ok()) {
            err << "error: " << *r.error << '\n';
            failed = true;
        }
    }
    return failed ? kSelectionFailure : kOk;
}

namespace detail {

inline NightMask checked_mask(const ModelsDocument& doc) {
    NightMask mask(doc.night_hours);
    std::set<int> have;
    for (const auto& r : doc.reports) {
        if (!r.ok()) throw input_error("models file has a failed fit for hour " + std::to_string(r.hour));
        if (mask.is_night(r.hour)) throw input_error("models file has a model for night hour " + std::to_string(r.hour));
        have.insert(r.hour);
    }
    for (int h : mask.modeled_hours()) {
        if (!have.count(h)) throw input_error("models file has no model for modeled hour " + std::to_string(h));
    }
    return mask;
}

}  // namespace detail

/// One-step day-ahead predictions over the held-out window.
inline int cmd_predict(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        const auto doc = detail::read_models_file(cfg.resolved_models_path());
        const auto mask = detail::checked_mask(doc);
        const auto series = detail::read_series_file(cfg.data_path);
        const auto points = hourly_predictions(series, doc.reports, mask, doc.test_start_day);
        if (points.empty()) throw input_error("empty test window: no observations on or after " + format_iso_date(doc.test_start_day));
        const auto metrics = metric_report(points);

        std::ostringstream csv;
        csv << "timestamp,actual,predicted\n";
        for (const auto& p : points) {
            csv << detail::format_timestamp(p.time) << ',' << format_double(p.actual) << ',' << format_double(p.predicted)
                << '\n';
        }
        const auto dir = std::filesystem::path(cfg.out_dir);
        detail::write_text_file(dir / "predictions.csv", csv.str());
        const auto mj = detail::metrics_json(metrics);
        detail::write_text_file(dir / "metrics.json", mj.dump(2) + "\n");
        out << mj.dump(2) << '\n';
        return kOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }
}

/// Monte Carlo day-ahead scenarios, quantile bands and a manifest.
inline int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        auto doc = detail::read_models_file(cfg.resolved_models_path());
        const auto mask = detail::checked_mask(doc);
        std::string conditioning = "end-of-training";
        if (!cfg.condition_through.empty()) {
            // re-condition each hour on observations through the given day
            const auto series = detail::read_series_file(cfg.data_path);
            const auto through = *parse_iso_date(cfg.condition_through);
            const auto upto = series.before(through + 1);
            for (auto& r : doc.reports) {
                const auto slice = slice_by_hour(upto, r.hour);
                if (slice.size() < static_cast<std::size_t>(std::max(r.model.p, r.model.q))) {
                    throw input_error("not enough history at hour " + std::to_string(r.hour) + " through " + cfg.condition_through);
                }
                const auto e = conditional_residuals(r.model, slice.values);
                r.history_tail.assign(slice.values.end() - r.model.p, slice.values.end());
                r.residual_tail.assign(e.end() - r.model.q, e.end());
            }
            conditioning = "through " + cfg.condition_through;
        }
        const auto set = generate_scenarios(doc.reports, mask, cfg.n_scenarios, cfg.seed);
        const auto [below0, below5] = negative_rate_report(set);

        const auto dir = std::filesystem::path(cfg.out_dir);
        std::ostringstream sc;
        write_scenarios_csv(sc, set);
        detail::write_text_file(dir / "scenarios.csv", sc.str());
        std::ostringstream qc;
        if (set.size() >= 2) {
            write_quantiles_csv(qc, quantile_bands(set, cfg.quantiles));
            detail::write_text_file(dir / "quantiles.csv", qc.str());
        } else {
            err << "warning: quantile bands need at least 2 scenarios; quantiles.csv not written\n";
        }
        json manifest{{"seed", cfg.seed},
                      {"config_hash", config_hash(cfg)},
                      {"models", cfg.resolved_models_path()},
                      {"conditioning", conditioning},
                      {"n_scenarios", set.size()},
                      {"raw_draw_count", set.raw_draw_count},
                      {"truncated_count", set.truncated_count},
                      {"below_neg5_count", set.below_neg5_count},
                      {"fraction_below_zero", below0},
                      {"fraction_below_neg5", below5}};
        detail::write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
        out << "scenarios: " << set.size() << "  truncated draws: " << set.truncated_count << " ("
            << format_double(100.0 * below0) << "%), below -5 MW: " << set.below_neg5_count << " ("
            << format_double(100.0 * below5) << "%)\n";
        return kOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }
}

/// Hourly ARMA vs single ARMA vs Smart-Persistence on the same held-out points.
inline int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    SolarSeries series;
    DayOrdinal test_start = 0;
    try {
        series = detail::read_series_file(cfg.data_path);
        if (series.empty()) throw input_error(cfg.data_path + ": no records");
        test_start = detail::resolve_split(series, cfg.split);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }
    try {
        const auto mask = detect_night_hours(series.before(test_start), cfg.night_threshold);
        ComparisonOptions opt;
        opt.select = select_options(cfg);
        opt.persistence_window = cfg.persistence_window;
        opt.persistence_variant = cfg.persistence_variant == "same-hour-days" ? PersistenceVariant::SameHourDays
                                                                              : PersistenceVariant::ClockHours;
        const auto c = compare_models(series, mask, cfg.grid, test_start, opt);
        std::ostringstream csv;
        write_comparison_csv(csv, c);
        detail::write_text_file(std::filesystem::path(cfg.out_dir) / "comparison.csv", csv.str());
        write_comparison_table(out, c);
        out << "single ARMA order: (" << c.single_p << "," << c.single_q << ")";
        if (c.persistence_fallbacks > 0) {
            out << "; smart-persistence fallbacks at night boundaries: " << c.persistence_fallbacks;
        }
        out << '\n';
        return kOk;
    } catch (const selection_error& e) {
        err << "error: " << e.what() << '\n';
        return kSelectionFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }
}

}  // namespace pvarma::cli
