// Writes a synthetic hourly PV series in the CLI's input format.

#include <iostream>

#include "CLI11.hpp"
#include "pvarma/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate a synthetic solar-like hourly power CSV"};
    pvarma::SyntheticOptions o;
    std::string start = "2020-01-01";
    app.add_option("--days", o.days, "number of days")->check(CLI::PositiveNumber);
    app.add_option("--start", start, "first ISO date");
    app.add_option("--peak", o.peak_mw, "peak mean output (MW)");
    app.add_option("--phi", o.phi, "day-to-day AR(1) coefficient per hour")->check(CLI::Range(-0.99, 0.99));
    app.add_option("--noise", o.noise_fraction, "innovation sd as a fraction of the hourly mean");
    app.add_option("--seed", o.seed, "random seed");
    app.add_flag("!--flat", o.diurnal, "no diurnal profile: every hour i.i.d. around peak/2");
    CLI11_PARSE(app, argc, argv);

    const auto day = pvarma::parse_iso_date(start);
    if (!day) {
        std::cerr << "error: bad --start date '" << start << "'\n";
        return 1;
    }
    o.first_day = *day;
    pvarma::write_series(std::cout, pvarma::synthetic_series(o));
    return 0;
}
