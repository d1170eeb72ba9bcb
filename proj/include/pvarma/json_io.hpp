#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "pvarma/arma_model.hpp"
#include "pvarma/diagnostics.hpp"
#include "pvarma/model_selector.hpp"
#include "pvarma/series_store.hpp"

// Doubles are written in shortest round-trip form, so every value reloads
// bit-for-bit.

namespace pvarma {

using json = nlohmann::ordered_json;

inline void to_json(json& j, const ArmaModel& m) {
    j = json{{"p", m.p},           {"q", m.q},         {"phi", m.phi},      {"theta", m.theta},
             {"intercept", m.intercept}, {"sigma2", m.sigma2}, {"loglik", m.loglik}, {"n_obs", m.n_obs}};
}

inline void from_json(const json& j, ArmaModel& m) {
    j.at("p").get_to(m.p);
    j.at("q").get_to(m.q);
    j.at("phi").get_to(m.phi);
    j.at("theta").get_to(m.theta);
    j.at("intercept").get_to(m.intercept);
    j.at("sigma2").get_to(m.sigma2);
    j.at("loglik").get_to(m.loglik);
    j.at("n_obs").get_to(m.n_obs);
    if (m.phi.size() != static_cast<std::size_t>(m.p) || m.theta.size() != static_cast<std::size_t>(m.q)) {
        throw std::invalid_argument("model JSON: coefficient count does not match order");
    }
}

inline void to_json(json& j, const AdfResult& a) {
    j = json{{"statistic", a.statistic},
             {"lags_used", a.lags_used},
             {"n_obs", a.n_obs},
             {"critical_value_1pct", a.critical_value_1pct},
             {"critical_value_5pct", a.critical_value_5pct},
             {"critical_value_10pct", a.critical_value_10pct},
             {"reject_unit_root", a.reject_unit_root}};
}

inline void from_json(const json& j, AdfResult& a) {
    j.at("statistic").get_to(a.statistic);
    j.at("lags_used").get_to(a.lags_used);
    j.at("n_obs").get_to(a.n_obs);
    j.at("critical_value_1pct").get_to(a.critical_value_1pct);
    j.at("critical_value_5pct").get_to(a.critical_value_5pct);
    j.at("critical_value_10pct").get_to(a.critical_value_10pct);
    j.at("reject_unit_root").get_to(a.reject_unit_root);
}

inline void to_json(json& j, const LjungBoxResult& r) {
    j = json{{"lag", r.lag},
             {"statistic", r.statistic},
             {"dof", r.dof},
             {"critical_value_5pct", r.critical_value_5pct},
             {"p_value", r.p_value},
             {"reject_white", r.reject_white}};
}

inline void from_json(const json& j, LjungBoxResult& r) {
    j.at("lag").get_to(r.lag);
    j.at("statistic").get_to(r.statistic);
    j.at("dof").get_to(r.dof);
    j.at("critical_value_5pct").get_to(r.critical_value_5pct);
    j.at("p_value").get_to(r.p_value);
    j.at("reject_white").get_to(r.reject_white);
}

inline void to_json(json& j, const GridEntry& e) {
    j = json{{"p", e.p}, {"q", e.q}, {"success", e.success}};
    if (e.success) {
        j["loglik"] = e.loglik;
        j["bic"] = e.bic;
    } else {
        j["error"] = e.error;
    }
}

inline void from_json(const json& j, GridEntry& e) {
    j.at("p").get_to(e.p);
    j.at("q").get_to(e.q);
    j.at("success").get_to(e.success);
    if (e.success) {
        j.at("loglik").get_to(e.loglik);
        j.at("bic").get_to(e.bic);
        e.error.clear();
    } else {
        e.loglik = 0.0;
        e.bic = std::numeric_limits<double>::infinity();
        e.error = j.value("error", std::string{});
    }
}

inline void to_json(json& j, const FitReport& r) {
    j = json{{"hour", r.hour}};
    if (r.error) {
        j["error"] = *r.error;
        return;
    }
    j["adf"] = r.adf ? json(*r.adf) : json(nullptr);
    j["possibly_nonstationary"] = r.possibly_nonstationary();
    j["grid"] = r.grid;
    j["chosen"] = json{{"p", r.chosen_p}, {"q", r.chosen_q}};
    j["model"] = r.model;
    j["ljung_box"] = r.ljung_box;
    j["history_tail"] = r.history_tail;
    j["residual_tail"] = r.residual_tail;
    j["last_day"] = format_iso_date(r.last_day);
    j["warnings"] = r.warnings;
}

inline void from_json(const json& j, FitReport& r) {
    r = FitReport{};
    j.at("hour").get_to(r.hour);
    if (j.contains("error")) {
        r.error = j.at("error").get<std::string>();
        return;
    }
    if (!j.at("adf").is_null()) r.adf = j.at("adf").get<AdfResult>();
    j.at("grid").get_to(r.grid);
    j.at("chosen").at("p").get_to(r.chosen_p);
    j.at("chosen").at("q").get_to(r.chosen_q);
    j.at("model").get_to(r.model);
    j.at("ljung_box").get_to(r.ljung_box);
    j.at("history_tail").get_to(r.history_tail);
    j.at("residual_tail").get_to(r.residual_tail);
    const auto day = parse_iso_date(j.at("last_day").get<std::string>());
    if (!day) throw std::invalid_argument("models JSON: bad last_day");
    r.last_day = *day;
    j.at("warnings").get_to(r.warnings);
    if (r.chosen_p != r.model.p || r.chosen_q != r.model.q) {
        throw std::invalid_argument("models JSON: chosen order does not match model for hour " + std::to_string(r.hour));
    }
    if (r.history_tail.size() != static_cast<std::size_t>(r.model.p) ||
        r.residual_tail.size() != static_cast<std::size_t>(r.model.q)) {
        throw std::invalid_argument("models JSON: conditioning tails do not match model order for hour " +
                                    std::to_string(r.hour));
    }
}

/// Everything `fit` hands to `predict` and `simulate`.
struct ModelsDocument {
    std::uint64_t seed = 0;
    OrderGrid grid;
    std::vector<int> ljung_box_lags;
    double night_threshold = 0.0;
    std::set<int> night_hours;
    DayOrdinal train_first_day = 0;
    DayOrdinal test_start_day = 0;
    std::vector<FitReport> reports;
};

inline json models_to_json(const ModelsDocument& d) {
    json j;
    j["format"] = "pvarma-models/1";
    j["seed"] = d.seed;
    j["grid"] = json{{"p_min", d.grid.p_min}, {"p_max", d.grid.p_max}, {"q_min", d.grid.q_min}, {"q_max", d.grid.q_max}};
    j["ljung_box_lags"] = d.ljung_box_lags;
    j["night_threshold"] = d.night_threshold;
    j["night_hours"] = d.night_hours;
    j["train_first_day"] = format_iso_date(d.train_first_day);
    j["test_start_day"] = format_iso_date(d.test_start_day);
    j["hours"] = d.reports;
    return j;
}

inline ModelsDocument models_from_json(const json& j) {
    if (j.value("format", std::string{}) != "pvarma-models/1") {
        throw std::invalid_argument("models JSON: unknown or missing format tag");
    }
    ModelsDocument d;
    j.at("seed").get_to(d.seed);
    const auto& g = j.at("grid");
    g.at("p_min").get_to(d.grid.p_min);
    g.at("p_max").get_to(d.grid.p_max);
    g.at("q_min").get_to(d.grid.q_min);
    g.at("q_max").get_to(d.grid.q_max);
    j.at("ljung_box_lags").get_to(d.ljung_box_lags);
    j.at("night_threshold").get_to(d.night_threshold);
    j.at("night_hours").get_to(d.night_hours);
    auto day = [&](const char* key) {
        const auto v = parse_iso_date(j.at(key).get<std::string>());
        if (!v) throw std::invalid_argument(std::string("models JSON: bad ") + key);
        return *v;
    };
    d.train_first_day = day("train_first_day");
    d.test_start_day = day("test_start_day");
    j.at("hours").get_to(d.reports);
    for (const auto& r : d.reports) {
        if (r.ok() && !is_valid(r.model)) {
            throw std::invalid_argument("models JSON: hour " + std::to_string(r.hour) + " model violates stationarity/invertibility");
        }
    }
    return d;
}

}  // namespace pvarma
