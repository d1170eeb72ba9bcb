#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "pvarma/evaluation.hpp"
#include "pvarma/synthetic.hpp"

using namespace pvarma;
using Catch::Matchers::WithinAbs;

TEST_CASE("mae and rmse hand values", "[evaluation]") {
    const std::vector<double> a{1, 2, 3}, p{2, 2, 2};
    CHECK(mae(a, a) == 0.0);
    CHECK(rmse(a, a) == 0.0);
    CHECK(mae(a, p) == 2.0 / 3.0);
    CHECK(rmse(a, p) == std::sqrt(2.0 / 3.0));
    const std::vector<double> shifted{3.5, 4.5, 5.5};
    CHECK(mae(a, shifted) == 2.5);
    CHECK(rmse(a, shifted) == 2.5);
    CHECK_THROWS(mae(a, std::vector<double>{1, 2}));
    CHECK_THROWS(rmse(std::vector<double>{}, std::vector<double>{}));
}

TEST_CASE("metric properties on random pairs", "[evaluation][property]") {
    std::mt19937_64 rng(1234);
    std::normal_distribution<double> z(0.0, 100.0);
    std::uniform_int_distribution<int> len(1, 50);
    for (int rep = 0; rep < 1000; ++rep) {
        const auto n = static_cast<std::size_t>(len(rng));
        std::vector<double> a(n), p(n), a2(n), p2(n);
        const double shift = z(rng);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = z(rng), p[i] = z(rng);
            a2[i] = a[i] + shift, p2[i] = p[i] + shift;
        }
        const double m = mae(a, p), r = rmse(a, p);
        CHECK(r >= m);
        CHECK(m >= 0.0);
        CHECK(mae(p, a) == m);
        CHECK(rmse(p, a) == r);
        CHECK_THAT(mae(a2, p2), WithinAbs(m, 1e-9));
        CHECK_THAT(rmse(a2, p2), WithinAbs(r, 1e-9));
    }
}

TEST_CASE("metric_report percentages use the maximum actual", "[evaluation]") {
    const std::vector<double> a{0, 100, 200}, p{10, 90, 230};
    const auto r = metric_report(a, p);
    CHECK(r.n_points == 3);
    CHECK_THAT(r.mae_pct_of_max, WithinAbs(100.0 * r.mae / 200.0, 1e-12));
    CHECK_THAT(r.rmse_pct_of_max, WithinAbs(100.0 * r.rmse / 200.0, 1e-12));
}

TEST_CASE("smart_persistence", "[evaluation]") {
    const std::vector<double> v{10, 20, 40, 80};
    CHECK(smart_persistence(v, 2, 2) == std::vector<double>{15, 30});
    CHECK(smart_persistence(v, 1, 1) == std::vector<double>{10, 20, 40});
    const std::vector<double> flat(10, 7.0);
    const auto pred = smart_persistence(flat, 2, 2);
    CHECK(mae(std::span<const double>(flat).subspan(2), pred) == 0.0);
    CHECK_THROWS(smart_persistence(v, 2, 1));
    CHECK_THROWS(smart_persistence(v, 0, 1));
}

TEST_CASE("clock-hour persistence falls back at dawn", "[evaluation]") {
    const auto s = synthetic_series({.days = 5, .seed = 3});
    const auto mask = detect_night_hours(s, 0.0);
    const DayOrdinal test_start = s.days()[3];
    const auto pts = persistence_predictions(s, mask, test_start, 2);
    REQUIRE(pts.size() == 48);
    for (const auto& e : pts) {
        const bool first_light = e.time.hour == mask.modeled_hours().front();
        CHECK(e.flagged == first_light);
        if (first_light) CHECK(e.predicted > 0.0);
    }
    const auto same = persistence_predictions(s, mask, test_start, 2, PersistenceVariant::SameHourDays);
    REQUIRE(same.size() == 48);
    const auto noon_prev1 = slice_by_hour(s, 12).values;
    for (const auto& e : same) {
        if (e.time.day == test_start && e.time.hour == 12) CHECK(e.predicted == (noon_prev1[1] + noon_prev1[2]) / 2.0);
    }
}

TEST_CASE("compare_models evaluates every method on the same points", "[evaluation]") {
    const auto s = synthetic_series({.days = 80, .seed = 21});
    const auto mask = detect_night_hours(s, 0.0);
    const OrderGrid grid{1, 2, 1, 2};
    const DayOrdinal test_start = split_day_by_fraction(s, 0.2);
    const auto c = compare_models(s, mask, grid, test_start, {.select = {.seed = 1}});
    CHECK(c.hourly.n_points == 16 * 24);
    CHECK(c.single.n_points == c.hourly.n_points);
    CHECK(c.persistence.n_points == c.hourly.n_points);
    for (std::size_t i = 0; i < c.hourly_points.size(); ++i) {
        CHECK(c.hourly_points[i].time == c.single_points[i].time);
        CHECK(c.hourly_points[i].time == c.persistence_points[i].time);
        CHECK(c.hourly_points[i].actual == c.persistence_points[i].actual);
        if (mask.is_night(c.hourly_points[i].time.hour)) CHECK(c.hourly_points[i].predicted == 0.0);
        CHECK(c.hourly_points[i].predicted >= 0.0);
    }
    CHECK(c.hourly.rmse >= c.hourly.mae);
    CHECK(c.single.mae > c.hourly.mae);

    std::ostringstream csv, table;
    write_comparison_csv(csv, c);
    write_comparison_table(table, c);
    CHECK(csv.str().rfind("metric,hourly_arma,single_arma,smart_persistence\nmae_mw,", 0) == 0);
    CHECK(table.str().find("Smart-Pers") != std::string::npos);

    const auto again = compare_models(s, mask, grid, test_start, {.select = {.seed = 1}});
    CHECK(again.hourly.mae == c.hourly.mae);
    CHECK(again.single.rmse == c.single.rmse);
}

TEST_CASE("compare_models window errors", "[evaluation]") {
    const auto s = synthetic_series({.days = 30, .seed = 4});
    const auto mask = detect_night_hours(s, 0.0);
    CHECK_THROWS(compare_models(s, mask, OrderGrid{1, 1, 1, 1}, s.days().back() + 1));
    CHECK_THROWS(compare_models(s, mask, OrderGrid{1, 1, 1, 1}, s.days().front()));
}

TEST_CASE("hourly and single models agree on flat data", "[evaluation]") {
    const auto s = synthetic_series({.days = 60, .diurnal = false, .seed = 5});
    const auto mask = detect_night_hours(s, 0.0);
    const auto c = compare_models(s, mask, OrderGrid{1, 1, 1, 1}, split_day_by_fraction(s, 0.2));
    CHECK(std::abs(c.single.mae - c.hourly.mae) <= 0.1 * c.hourly.mae);
}
