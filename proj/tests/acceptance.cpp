// Acceptance suite: one PASS/FAIL/SKIP line per criterion. Exit status is
// nonzero iff any criterion fails.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "oracles.hpp"
#include "pvarma/cli.hpp"
#include "pvarma/pvarma.hpp"

using namespace pvarma;
namespace fs = std::filesystem;

namespace {

enum class Outcome { Pass, Fail, Skip };

struct Line {
    Outcome outcome;
    std::string detail;
};

int g_failures = 0;

void report(int id, const std::string& name, const Line& line, double seconds) {
    const char* tag = line.outcome == Outcome::Pass ? "PASS" : line.outcome == Outcome::Fail ? "FAIL" : "SKIP";
    if (line.outcome == Outcome::Fail) ++g_failures;
    std::cout << tag << "  [" << std::setw(2) << id << "] " << name << ": " << line.detail << " ("
              << std::fixed << std::setprecision(1) << seconds << " s)" << std::endl;
}

void run(int id, const std::string& name, const std::function<Line()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Line line;
    try {
        line = body();
    } catch (const std::exception& e) {
        line = {Outcome::Fail, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(id, name, line, s);
}

Line verdict(bool ok, const std::string& detail) { return {ok ? Outcome::Pass : Outcome::Fail, detail}; }

std::string fmt(double v, int prec = 4) {
    std::ostringstream s;
    s << std::setprecision(prec) << v;
    return s.str();
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Runs f(0..n-1) on a pool of hardware threads; results keep index order.
template <class F>
auto parallel_map(std::size_t n, F f) -> std::vector<decltype(f(std::size_t{}))> {
    using R = decltype(f(std::size_t{}));
    std::vector<R> out(n);
    std::atomic<std::size_t> next{0};
    const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), static_cast<unsigned>(n)));
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;) {
                try {
                    out[i] = f(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

/// ARMA path with Gaussian innovations, zero mean, after a burn-in.
std::vector<double> simulate_arma(const std::vector<double>& phi, const std::vector<double>& theta, std::size_t n,
                                  std::uint64_t seed, std::size_t burn = 500) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::vector<double> x(n + burn, 0.0), e(n + burn, 0.0);
    for (std::size_t t = 0; t < x.size(); ++t) {
        e[t] = z(rng);
        double v = e[t];
        for (std::size_t i = 1; i <= phi.size() && i <= t; ++i) v += phi[i - 1] * x[t - i];
        for (std::size_t j = 1; j <= theta.size() && j <= t; ++j) v += theta[j - 1] * e[t - j];
        x[t] = v;
    }
    return {x.begin() + static_cast<long>(burn), x.end()};
}

Line likelihood_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> pac(-0.9, 0.9), var(0.2, 4.0);
    std::uniform_int_distribution<std::size_t> len(5, 20);
    double worst = 0.0;
    int cases = 0;
    for (int p = 0; p <= 2; ++p) {
        for (int q = 0; q <= 2; ++q) {
            for (int rep = 0; rep < 5; ++rep) {
                std::vector<double> rp(static_cast<std::size_t>(p)), rq(static_cast<std::size_t>(q));
                for (auto& v : rp) v = pac(rng);
                for (auto& v : rq) v = pac(rng);
                const auto phi = pacf_to_coefficients(rp);
                auto theta = pacf_to_coefficients(rq);
                for (auto& t : theta) t = -t;
                const double mu = 3.0 * z(rng), s2 = var(rng);
                std::vector<double> y(len(rng));
                for (auto& v : y) v = mu + 1.5 * z(rng);
                const auto gamma = oracle::arma_autocovariance(phi, theta, s2, y.size());
                const double got = log_likelihood(ArmaModel::make(phi, theta, mu, s2), y);
                worst = std::max(worst, std::abs(got - oracle::dense_gaussian_loglik(y, mu, gamma)));
                ++cases;
            }
        }
    }
    const double secs = elapsed(t0);
    return verdict(worst <= 1e-8 && secs < 10.0,
                   std::to_string(cases) + " cases, max |diff| = " + fmt(worst, 3) + " (tol 1e-8), runtime < 10 s");
}

Line parameter_recovery() {
    const auto t0 = std::chrono::steady_clock::now();
    struct Case {
        std::vector<double> phi, theta;
    };
    const std::vector<Case> cases{{{0.6}, {}}, {{}, {0.5}}, {{0.6}, {0.3}}, {{0.6, -0.3}, {0.5}}};
    constexpr std::size_t kReps = 50;
    std::ostringstream detail;
    bool ok = true;
    for (const auto& c : cases) {
        const int p = static_cast<int>(c.phi.size()), q = static_cast<int>(c.theta.size());
        const auto hits = parallel_map(kReps, [&](std::size_t rep) {
            const auto x = simulate_arma(c.phi, c.theta, 5000, 1000 + rep);
            const auto m = fit(x, p, q, {.seed = rep}).model;
            bool hit = true;
            for (int i = 0; i < p; ++i) hit = hit && std::abs(m.phi[static_cast<std::size_t>(i)] - c.phi[static_cast<std::size_t>(i)]) <= 0.07;
            for (int j = 0; j < q; ++j) hit = hit && std::abs(m.theta[static_cast<std::size_t>(j)] - c.theta[static_cast<std::size_t>(j)]) <= 0.07;
            return hit ? 1 : 0;
        });
        const int n = std::accumulate(hits.begin(), hits.end(), 0);
        ok = ok && n >= 45;
        detail << "(" << p << "," << q << ") " << n << "/50; ";
    }
    const double secs = elapsed(t0);
    detail << "need >= 45/50 each, runtime < 120 s";
    return verdict(ok && secs < 120.0, detail.str());
}

Line ar1_least_squares() {
    const auto x = simulate_arma({0.6}, {}, 5000, 4242);
    const auto m = fit(x, 1, 0, {.seed = 1}).model;
    const auto ols = oracle::ar1_ols(x);
    const double d_phi = std::abs(m.phi[0] - ols[1]);
    const double d_mu = std::abs(m.intercept - ols[0] / (1.0 - ols[1]));
    const double d_s2 = std::abs(m.sigma2 - ols[2]);
    const double worst = std::max({d_phi, d_mu, d_s2});
    return verdict(worst <= 1e-2, "|dphi| = " + fmt(d_phi, 3) + ", |dmu| = " + fmt(d_mu, 3) + ", |dsigma2| = " +
                                      fmt(d_s2, 3) + " (tol 1e-2)");
}

Line adf_calibration() {
    const auto rw = parallel_map(200, [](std::size_t rep) {
        std::mt19937_64 rng(substream_seed(4, {0, rep}));
        std::normal_distribution<double> z;
        std::vector<double> x(500);
        double s = 0.0;
        for (auto& v : x) v = (s += z(rng));
        return adf_test(x).reject_unit_root ? 1 : 0;
    });
    const auto ar = parallel_map(200, [](std::size_t rep) {
        return adf_test(simulate_arma({0.5}, {}, 500, substream_seed(4, {1, rep}), 100)).reject_unit_root ? 1 : 0;
    });
    const int size = std::accumulate(rw.begin(), rw.end(), 0);
    const int power = std::accumulate(ar.begin(), ar.end(), 0);
    const std::vector<double> fixed{0.52, 1.31, 0.77, 1.94, 2.60, 2.11, 3.05, 2.48, 1.92, 2.73,
                                    3.40, 2.95, 3.88, 4.12, 3.51, 3.09, 3.77, 4.45, 5.02, 4.38,
                                    4.91, 4.20, 3.66, 4.04, 4.87, 5.53, 5.10, 5.96, 6.22, 5.71};
    double worst = 0.0;
    for (int lags = 0; lags <= 3; ++lags) {
        worst = std::max(worst, std::abs(adf_test(fixed, {.lags = lags}).statistic -
                                         oracle::adf_statistic(fixed, static_cast<std::size_t>(lags))));
    }
    return verdict(size <= 20 && power >= 180 && worst <= 1e-10,
                   "random-walk rejections " + std::to_string(size) + "/200 (<= 20), AR(1) rejections " +
                       std::to_string(power) + "/200 (>= 180), oracle |diff| = " + fmt(worst, 3) + " (tol 1e-10)");
}

Line ljung_box_calibration() {
    const auto rejects = parallel_map(1000, [](std::size_t rep) {
        std::mt19937_64 rng(substream_seed(5, {rep}));
        std::normal_distribution<double> z;
        std::vector<double> e(250);
        for (auto& v : e) v = z(rng);
        return ljung_box(e, 10, 0).reject_white ? 1 : 0;
    });
    const double rate = std::accumulate(rejects.begin(), rejects.end(), 0) / 1000.0;
    const std::vector<double> fixed{0.3, -1.1, 0.4, 0.9, -0.2, -0.7, 1.3, 0.1, -0.5, 0.6,
                                    -1.4, 0.8, 0.2, -0.3, 1.0, -0.9, 0.5, -0.1, 0.7, -0.6};
    const auto r = ljung_box(fixed, 5, 2);
    const double diff = std::abs(r.statistic - oracle::ljung_box_q(fixed, 5));
    bool enforced = false;
    try {
        ljung_box(fixed, 5, 5);
    } catch (const std::invalid_argument&) {
        enforced = true;
    }
    return verdict(rate >= 0.03 && rate <= 0.08 && diff <= 1e-10 && r.dof == 3 && enforced,
                   "size " + fmt(100.0 * rate, 3) + "% (in [3, 8]), oracle |diff| = " + fmt(diff, 3) +
                       ", dof(h=5, params=2) = " + std::to_string(r.dof) +
                       (enforced ? ", h <= params rejected" : ", h <= params NOT rejected"));
}

Line bic_consistency() {
    const OrderGrid grid;
    constexpr std::size_t kReps = 20;
    const auto chosen = parallel_map(kReps, [&](std::size_t rep) {
        HourSlice s;
        s.hour = 0;
        s.values = simulate_arma({0.6, -0.3}, {0.5}, 2000, 600 + rep);
        for (auto& v : s.values) v += 500.0;
        s.day_index.resize(s.values.size());
        const auto r = select_model(s, grid, {.seed = rep});
        return std::make_pair(r.chosen_p, r.chosen_q);
    });
    int hits = 0;
    bool inside = true;
    std::map<std::pair<int, int>, int> tally;
    for (const auto& c : chosen) {
        hits += c == std::make_pair(2, 1);
        inside = inside && grid.contains(c.first, c.second);
        ++tally[c];
    }
    std::ostringstream detail;
    detail << "phi=[0.6,-0.3] theta=[0.5], n=2000: (2,1) chosen " << hits << "/20 (need > 10), all inside grid: " << (inside ? "yes" : "no") << "; picks";
    for (const auto& [pq, n] : tally) detail << " (" << pq.first << "," << pq.second << ")x" << n;
    return verdict(hits > 10 && inside, detail.str());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Line scenario_contract() {
    const auto dir = fs::temp_directory_path() / "pvarma_acceptance_scenarios";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream data(dir / "data.csv");
        write_series(data, synthetic_series({.days = 365, .seed = 7}));
    }
    cli::FlagOverrides flags;
    flags.data = (dir / "data.csv").string();
    flags.out = dir.string();
    const auto cfg = cli::resolve_config(flags);  // every other setting at its default
    std::ostringstream sink;
    const auto tf = std::chrono::steady_clock::now();
    if (cli::cmd_fit(cfg, sink, sink) != cli::kOk) return {Outcome::Fail, "fit failed: " + sink.str()};
    const double fit_secs = elapsed(tf);

    const auto t0 = std::chrono::steady_clock::now();
    if (cli::cmd_simulate(cfg, sink, sink) != cli::kOk) return {Outcome::Fail, "simulate failed: " + sink.str()};
    const double secs = elapsed(t0);
    const auto scen = slurp(dir / "scenarios.csv"), quant = slurp(dir / "quantiles.csv");
    const auto manifest = slurp(dir / "manifest.json");
    if (cli::cmd_simulate(cfg, sink, sink) != cli::kOk) return {Outcome::Fail, "second simulate failed"};
    const bool identical =
        scen == slurp(dir / "scenarios.csv") && quant == slurp(dir / "quantiles.csv") && manifest == slurp(dir / "manifest.json");

    const auto doc = models_from_json(json::parse(slurp(dir / "models.json")));
    const NightMask mask(doc.night_hours);
    std::istringstream rows(scen);
    std::string line;
    std::getline(rows, line);
    std::size_t count = 0, negatives = 0, night_nonzero = 0;
    while (std::getline(rows, line)) {
        ++count;
        std::istringstream cells(line);
        std::string cell;
        std::getline(cells, cell, ',');
        for (int h = 0; h < 24 && std::getline(cells, cell, ','); ++h) {
            const double v = std::stod(cell);
            negatives += v < 0.0;
            night_nonzero += mask.is_night(h) && v != 0.0;
        }
    }
    std::istringstream qrows(quant);
    std::getline(qrows, line);
    std::size_t disordered = 0;
    while (std::getline(qrows, line)) {
        double hour = 0, q10 = 0, med = 0, q90 = 0;
        char c = 0;
        std::istringstream cells(line);
        cells >> hour >> c >> q10 >> c >> med >> c >> q90;
        disordered += !(q10 <= med && med <= q90);
    }
    fs::remove_all(dir);
    std::ostringstream detail;
    detail << count << " scenarios (2000), " << negatives << " negative values, " << night_nonzero
           << " nonzero night cells, " << disordered << " hours with q10 > median or median > q90, reruns "
           << (identical ? "byte-identical" : "DIFFER") << ", " << mask.zero_hours().size()
           << " night hours; simulate runtime < 30 s (model fit took " << fmt(fit_secs, 3) << " s)";
    return verdict(count == 2000 && negatives == 0 && night_nonzero == 0 && disordered == 0 && identical && secs < 30.0,
                   detail.str());
}

Line persistence_ordering() {
    constexpr std::size_t kSeeds = 50;
    struct Run {
        double hourly_mae, hourly_rmse, sp_mae, sp_rmse;
    };
    const auto runs = parallel_map(kSeeds, [](std::size_t rep) {
        const auto s = synthetic_series({.days = 365, .seed = 9000 + rep});
        const auto test_start = split_day_by_fraction(s, 0.2);
        const auto train = s.before(test_start);
        const auto mask = detect_night_hours(train, 0.0);
        const auto reports = fit_all_hours(train, mask, OrderGrid{1, 2, 1, 2}, {.seed = rep});
        const auto hp = hourly_predictions(s, reports, mask, test_start);
        const auto sp = persistence_predictions(s, mask, test_start, 2);
        const auto h = metric_report(hp), p = metric_report(sp);
        return Run{h.mae, h.rmse, p.mae, p.rmse};
    });
    int wins = 0;
    bool rmse_ge_mae = true;
    double mean_h = 0.0, mean_p = 0.0;
    for (const auto& r : runs) {
        wins += r.hourly_mae < r.sp_mae;
        rmse_ge_mae = rmse_ge_mae && r.hourly_rmse >= r.hourly_mae && r.sp_rmse >= r.sp_mae;
        mean_h += r.hourly_mae / kSeeds;
        mean_p += r.sp_mae / kSeeds;
    }
    return verdict(wins >= 40 && rmse_ge_mae,
                   "365-day series, orders 1..2: hourly ARMA beats Smart-Persistence on MAE in " + std::to_string(wins) +
                       "/50 runs (need >= 40), mean MAE " + fmt(mean_h) + " vs " + fmt(mean_p) +
                       " MW, rmse >= mae on every run: " + (rmse_ge_mae ? "yes" : "no"));
}

Line metric_identities() {
    const std::vector<double> a{1, 2, 3}, p{2, 2, 2};
    const bool exact = mae(a, a) == 0.0 && rmse(a, a) == 0.0 && mae(a, p) == 2.0 / 3.0 &&
                       rmse(a, p) == std::sqrt(2.0 / 3.0) && mae(a, std::vector<double>{4, 5, 6}) == 3.0 &&
                       rmse(a, std::vector<double>{4, 5, 6}) == 3.0;
    std::mt19937_64 rng(909);
    std::normal_distribution<double> z(0.0, 200.0);
    std::uniform_int_distribution<int> len(1, 100);
    int violations = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        std::vector<double> x(static_cast<std::size_t>(len(rng))), y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = z(rng), y[i] = z(rng);
        violations += rmse(x, y) < mae(x, y);
    }
    return verdict(exact && violations == 0, std::string("hand values ") + (exact ? "exact" : "MISMATCH") +
                                                 ", rmse < mae on " + std::to_string(violations) + "/1000 random pairs");
}

Line zone1_replication() {
    const char* path = std::getenv("PVARMA_ZONE1_CSV");
    if (!path || !*path) return {Outcome::Skip, "set PVARMA_ZONE1_CSV to the zone-1 hourly CSV to run"};
    const auto dir = fs::temp_directory_path() / "pvarma_acceptance_zone1";
    fs::create_directories(dir);
    cli::FlagOverrides flags;
    flags.data = path;
    flags.out = dir.string();
    const auto cfg = cli::resolve_config(flags);
    std::ostringstream out, err;
    const auto series = cli::detail::read_series_file(cfg.data_path);
    const auto test_start = cli::detail::resolve_split(series, cfg.split);
    const auto mask = detect_night_hours(series.before(test_start), cfg.night_threshold);
    ComparisonOptions opt;
    opt.select = cli::select_options(cfg);
    const auto c = compare_models(series, mask, cfg.grid, test_start, opt);
    const bool ok = std::abs(c.hourly.mae - 39.6) <= 0.15 * 39.6 && std::abs(c.hourly.rmse - 61.0) <= 0.15 * 61.0;
    return verdict(ok, "hourly MAE " + fmt(c.hourly.mae) + " MW (39.6 +/- 15%), RMSE " + fmt(c.hourly.rmse) +
                           " MW (61.0 +/- 15%)");
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    const std::vector<std::tuple<int, std::string, std::function<Line()>>> criteria{
        {1, "likelihood oracle equivalence", likelihood_oracle},
        {2, "parameter recovery", parameter_recovery},
        {3, "AR(1) least-squares cross-check", ar1_least_squares},
        {4, "ADF calibration", adf_calibration},
        {5, "Ljung-Box calibration", ljung_box_calibration},
        {6, "BIC selection consistency", bic_consistency},
        {7, "scenario contract", scenario_contract},
        {8, "hourly ARMA vs Smart-Persistence ordering", persistence_ordering},
        {9, "metric identities", metric_identities},
        {10, "conditional replication on zone-1 data", zone1_replication},
    };
    for (const auto& [id, name, body] : criteria) {
        if (only.empty() || only.count(id)) run(id, name, body);
    }
    std::cout << (g_failures == 0 ? "acceptance: all criteria passed or skipped" : "acceptance: FAILURES") << std::endl;
    return g_failures == 0 ? 0 : 1;
}
