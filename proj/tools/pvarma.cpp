#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pvarma/cli.hpp"

namespace {

template <class T>
void bind_flag(CLI::App& app, const std::string& name, std::optional<T>& target, const std::string& help) {
    app.add_option_function<T>(name, [&target](const T& v) { target = v; }, help);
}

void add_common(CLI::App& cmd, pvarma::cli::FlagOverrides& f) {
    bind_flag(cmd, "--data", f.data, "hourly power CSV (date,hour,power_mw)");
    bind_flag(cmd, "--config", f.config, "JSON run configuration; flags take precedence");
    bind_flag(cmd, "--seed", f.seed, "master random seed");
    bind_flag(cmd, "--out", f.out, "output directory");
    bind_flag(cmd, "--split", f.split, "held-out fraction of days, or ISO date of the first test day");
    bind_flag(cmd, "--grid-max", f.grid_max, "largest p and q in the order grid");
    bind_flag(cmd, "--night-threshold", f.night_threshold, "MW at or below which an hour counts as night");
    bind_flag(cmd, "--restarts", f.restarts, "random optimizer restarts per fit");
    cmd.add_option_function<std::vector<int>>("--lags", [&f](const std::vector<int>& v) { f.lags = v; },
                                              "Ljung-Box lags")
        ->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hour-by-hour ARMA forecasting and scenario generation for PV power"};
    app.require_subcommand(1);
    pvarma::cli::FlagOverrides flags;

    auto* fit = app.add_subcommand("fit", "select and fit one ARMA model per daylight hour");
    auto* predict = app.add_subcommand("predict", "one-step day-ahead predictions over the held-out window");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo day-ahead scenarios and quantile bands");
    auto* compare = app.add_subcommand("compare", "hourly ARMA vs single ARMA vs Smart-Persistence");
    for (auto* cmd : {fit, predict, simulate, compare}) add_common(*cmd, flags);
    for (auto* cmd : {predict, simulate}) bind_flag(*cmd, "--models", flags.models, "models.json from 'fit'");
    bind_flag(*simulate, "--scenarios", flags.scenarios, "number of scenarios");
    bind_flag(*simulate, "--condition-through", flags.condition_through,
         "condition on observations through this ISO date (needs --data)");
    simulate
        ->add_option_function<std::vector<double>>("--quantiles",
                                                   [&flags](const std::vector<double>& v) { flags.quantiles = v; },
                                                   "quantile probabilities")
        ->delimiter(',');
    bind_flag(*compare, "--persistence-window", flags.persistence_window, "Smart-Persistence window h");
    bind_flag(*compare, "--persistence-variant", flags.persistence_variant, "clock-hours or same-hour-days");

    CLI11_PARSE(app, argc, argv);

    pvarma::cli::RunConfig cfg;
    try {
        cfg = pvarma::cli::resolve_config(flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return pvarma::cli::kInvalidInput;
    }
    if (fit->parsed()) return pvarma::cli::cmd_fit(cfg, std::cout, std::cerr);
    if (predict->parsed()) return pvarma::cli::cmd_predict(cfg, std::cout, std::cerr);
    if (simulate->parsed()) return pvarma::cli::cmd_simulate(cfg, std::cout, std::cerr);
    return pvarma::cli::cmd_compare(cfg, std::cout, std::cerr);
}
