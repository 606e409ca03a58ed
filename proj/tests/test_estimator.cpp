// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "pedflow/estimator.hpp"
#include "pedflow/stats.hpp"
#include "support/chi2_oracle.hpp"

using namespace pedflow;

namespace {

SensingSnapshot make_snapshot(double t, LinkId link, double x1, double x2,
                              std::vector<SnapshotPed> peds = {}) {
    SensingSnapshot s;
    s.time_s = t;
    s.link = link;
    s.x1_m = x1;
    s.x2_m = x2;
    s.pedestrians = std::move(peds);
    return s;
}

ObservationWindow make_window(LinkId link, int count, double t1, double t2,
                              double snapshot_time) {
    ObservationWindow w;
    w.link = link;
    w.count = count;
    w.t1_s = t1;
    w.t2_s = t2;
    w.period_s = t2 - t1;
    w.speed_mps = 1.5;
    w.snapshot_time_s = snapshot_time;
    return w;
}

}  // namespace

TEST_CASE("space mean speed is the harmonic mean") {
    const std::vector<double> same{1.5, 1.5, 1.5};
    CHECK(space_mean_speed(same) == doctest::Approx(1.5));

    const std::vector<double> two{1.0, 2.0};
    CHECK(space_mean_speed(two) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));

    const std::vector<double> three{1.0, 2.0, 4.0};
    CHECK(space_mean_speed(three) == doctest::Approx(12.0 / 7.0).epsilon(1e-12));
    CHECK(space_mean_speed(three) < 7.0 / 3.0);  // below the arithmetic mean

    CHECK_THROWS_AS(space_mean_speed({}), std::invalid_argument);
    CHECK_THROWS_AS(space_mean_speed(std::vector<double>{1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(space_mean_speed(std::vector<double>{-1.0}), std::invalid_argument);
}

TEST_CASE("harmonic mean never exceeds the arithmetic mean") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> speed(0.2, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v;
        const int n = 1 + static_cast<int>(rng() % 8);
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            v.push_back(speed(rng));
            sum += v.back();
        }
        CHECK(space_mean_speed(v) <= sum / n + 1e-12);
    }
}

TEST_CASE("window projection from a snapshot") {
    const EstimatorConfig config;
    SUBCASE("single pedestrian at 2 m/s") {
        const auto w = window_from_snapshot(
            make_snapshot(100.0, 5, 20.0, 0.0, {{1, 3.0, 2.0}}), config);
        CHECK(w.count == 1);
        CHECK(w.speed_mps == doctest::Approx(2.0));
        CHECK(w.t1_s == doctest::Approx(90.0));
        CHECK(w.t2_s == doctest::Approx(100.0));
        CHECK(w.period_s == doctest::Approx(10.0));
        CHECK(w.t2_s - w.t1_s == w.period_s);
    }
    SUBCASE("empty window falls back to the expected speed") {
        const auto w = window_from_snapshot(make_snapshot(50.0, 2, 20.0, 0.0), config);
        CHECK(w.count == 0);
        CHECK(w.speed_mps == doctest::Approx(1.5));
        CHECK(w.period_s == doctest::Approx(20.0 / 1.5));
    }
    SUBCASE("two pedestrians use the space mean speed") {
        const auto w = window_from_snapshot(
            make_snapshot(30.0, 0, 12.0, 0.0, {{1, 2.0, 1.0}, {2, 5.0, 2.0}}), config);
        CHECK(w.speed_mps == doctest::Approx(4.0 / 3.0));
        CHECK(w.period_s == doctest::Approx(9.0));
    }
    SUBCASE("degenerate bounds are rejected") {
        CHECK_THROWS_AS(window_from_snapshot(make_snapshot(0.0, 0, 5.0, 5.0), config),
                        std::invalid_argument);
        CHECK_THROWS_AS(window_from_snapshot(make_snapshot(0.0, 0, 5.0, -1.0), config),
                        std::invalid_argument);
    }
}

TEST_CASE("independence ledger") {
    IndependenceLedger ledger;
    SUBCASE("first observation is accepted") {
        CHECK(ledger.accept(make_window(0, 1, 0.0, 10.0, 0.0)));
    }
    SUBCASE("identical projected interval is rejected") {
        CHECK(ledger.accept(make_window(0, 1, 5.0, 15.0, 5.0)));
        CHECK(!ledger.accept(make_window(0, 2, 5.0, 15.0, 6.0)));
    }
    SUBCASE("touching endpoints are accepted") {
        CHECK(ledger.accept(make_window(0, 1, 0.0, 10.0, 0.0)));
        CHECK(ledger.accept(make_window(0, 1, 10.0, 20.0, 1.0)));
        CHECK(ledger.accept(make_window(0, 1, -5.0, 0.0, 2.0)));
    }
    SUBCASE("interior overlap is rejected") {
        CHECK(ledger.accept(make_window(0, 1, 0.0, 10.0, 0.0)));
        CHECK(!ledger.accept(make_window(0, 1, 9.999, 12.0, 1.0)));
        CHECK(!ledger.accept(make_window(0, 1, -1.0, 0.001, 1.0)));
        CHECK(!ledger.accept(make_window(0, 1, 2.0, 3.0, 1.0)));   // nested
        CHECK(!ledger.accept(make_window(0, 1, -1.0, 11.0, 1.0))); // covering
    }
    SUBCASE("links are independent of each other") {
        CHECK(ledger.accept(make_window(0, 1, 0.0, 10.0, 0.0)));
        CHECK(ledger.accept(make_window(1, 1, 0.0, 10.0, 0.0)));
    }
    SUBCASE("random windows keep interiors pairwise disjoint") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> start(0.0, 500.0);
        std::uniform_real_distribution<double> len(0.1, 30.0);
        IndependenceLedger random_ledger;
        for (int i = 0; i < 500; ++i) {
            const double t1 = start(rng);
            random_ledger.accept(make_window(static_cast<LinkId>(rng() % 3), 1, t1,
                                             t1 + len(rng), t1));
        }
        CHECK(random_ledger.interiors_disjoint());
    }
}

TEST_CASE("rate estimation formulas") {
    const EstimatorConfig config;  // alpha = 0.1
    SUBCASE("no windows means no data, not zero") {
        CHECK(!estimate_rate({}, config).has_value());
    }
    SUBCASE("zero counts over 600 seconds") {
        const auto w = make_window(0, 0, 0.0, 600.0, 600.0);
        const auto est = estimate_rate(std::span(&w, 1), config);
        REQUIRE(est.has_value());
        CHECK(est->lambda_per_min == 0.0);
        CHECK(est->lower_per_min == 0.0);
        // chi2_{0.95}(2) = -2 ln(0.05); per-minute bound over 1200 s.
        const double expected_upper = 60.0 * (-2.0 * std::log(0.05)) / 1200.0;
        CHECK(std::abs(est->upper_per_min - expected_upper) < 1e-9);
        CHECK(est->upper_per_min == doctest::Approx(0.2995732273553991).epsilon(1e-9));
    }
    SUBCASE("ten counts over 600 seconds") {
        std::vector<ObservationWindow> windows;
        for (int i = 0; i < 10; ++i) {
            windows.push_back(make_window(3, 1, i * 60.0, i * 60.0 + 60.0, i * 60.0));
        }
        const auto est = estimate_rate(windows, config);
        REQUIRE(est.has_value());
        CHECK(est->total_count == 10);
        CHECK(est->total_period_s == doctest::Approx(600.0));
        CHECK(est->lambda_per_min == doctest::Approx(1.0));
        const double lower_oracle = 60.0 * test::oracle_chi2_quantile(0.05, 20.0) / 1200.0;
        const double upper_oracle = 60.0 * test::oracle_chi2_quantile(0.95, 22.0) / 1200.0;
        CHECK(est->lower_per_min == doctest::Approx(lower_oracle).epsilon(1e-6));
        CHECK(est->upper_per_min == doctest::Approx(upper_oracle).epsilon(1e-6));
        CHECK(est->lower_per_min <= est->lambda_per_min);
        CHECK(est->lambda_per_min <= est->upper_per_min);
    }
    SUBCASE("seconds-internal and minutes-internal computations agree") {
        std::vector<ObservationWindow> windows;
        for (int i = 0; i < 7; ++i) {
            windows.push_back(make_window(0, i % 3, 10.0 * i, 10.0 * i + 8.5, 10.0 * i));
        }
        const auto est = estimate_rate(windows, config);
        REQUIRE(est.has_value());
        long long n = 0;
        double period_min = 0.0;
        for (const auto& w : windows) {
            n += w.count;
            period_min += w.period_s / 60.0;
        }
        const double lambda_min = static_cast<double>(n) / period_min;
        const double lower_min = chi_squared_quantile(0.05, 2.0 * n) / (2.0 * period_min);
        const double upper_min = chi_squared_quantile(0.95, 2.0 * n + 2.0) / (2.0 * period_min);
        CHECK(std::abs(est->lambda_per_min - lambda_min) / lambda_min < 1e-9);
        CHECK(std::abs(est->lower_per_min - lower_min) / lower_min < 1e-9);
        CHECK(std::abs(est->upper_per_min - upper_min) / upper_min < 1e-9);
    }
    SUBCASE("interval width shrinks as data accumulates at fixed rate") {
        double previous_width = 1e12;
        for (int scale : {1, 2, 4, 8}) {
            std::vector<ObservationWindow> windows;
            for (int i = 0; i < scale; ++i) {
                windows.push_back(make_window(0, 10, 600.0 * i, 600.0 * (i + 1), 600.0 * i));
            }
            const auto est = estimate_rate(windows, config);
            REQUIRE(est.has_value());
            const double width = est->upper_per_min - est->lower_per_min;
            CHECK(width < previous_width);
            previous_width = width;
        }
    }
}

TEST_CASE("rate profile") {
    EstimatorConfig config;
    config.window_s = 600.0;
    SUBCASE("constant rate stays flat and within the intervals") {
        // One window every 30 s carrying 1 count over tau = 20 s: true rate 3/min.
        std::vector<ObservationWindow> windows;
        for (int i = 0; i < 120; ++i) {
            const double t = 30.0 * i;
            windows.push_back(make_window(0, 1, t, t + 20.0, t));
        }
        const auto profile = rate_profile(windows, config, 0, 0.0, 3570.0, 60.0);
        REQUIRE(!profile.empty());
        for (const auto& point : profile) {
            REQUIRE(point.estimate.has_value());
            CHECK(point.estimate->lambda_per_min == doctest::Approx(3.0));
            CHECK(point.estimate->lower_per_min <= 3.0);
            CHECK(point.estimate->upper_per_min >= 3.0);
        }
        CHECK(profile.front().window_clipped);
        CHECK(!profile[10].window_clipped);
    }
    SUBCASE("step change transitions over one window width") {
        // 1 count per 30 s window before t = 1800, 4 counts after.
        std::vector<ObservationWindow> windows;
        for (int i = 0; i < 120; ++i) {
            const double t = 30.0 * i;
            windows.push_back(make_window(0, t < 1800.0 ? 1 : 4, t, t + 20.0, t));
        }
        const auto profile = rate_profile(windows, config, 0, 0.0, 3570.0, 30.0);
        for (const auto& point : profile) {
            REQUIRE(point.estimate.has_value());
            if (point.eval_time_s <= 1800.0 - 301.0) {
                CHECK(point.estimate->lambda_per_min == doctest::Approx(3.0));
            } else if (point.eval_time_s >= 1800.0 + 301.0) {
                CHECK(point.estimate->lambda_per_min == doctest::Approx(12.0));
            } else {
                CHECK(point.estimate->lambda_per_min >= 3.0 - 1e-9);
                CHECK(point.estimate->lambda_per_min <= 12.0 + 1e-9);
            }
        }
    }
    SUBCASE("evaluation time with no windows in range is a gap") {
        std::vector<ObservationWindow> windows{make_window(0, 1, 0.0, 20.0, 10.0)};
        const auto profile = rate_profile(windows, config, 0, 0.0, 2000.0, 500.0);
        CHECK(profile[0].estimate.has_value());
        CHECK(!profile[2].estimate.has_value());  // t = 1000, window [700, 1300]
        CHECK(!profile[4].estimate.has_value());
    }
}

TEST_CASE("stationary counter") {
    const EstimatorConfig config;
    SUBCASE("97 arrivals in one hour") {
        std::vector<double> times;
        for (int i = 0; i < 97; ++i) times.push_back(3600.0 * (i + 0.5) / 97.0);
        const auto est = stationary_counter(4, times, 3600.0, config);
        CHECK(est.lambda_per_min == doctest::Approx(97.0 / 60.0).epsilon(1e-12));
        CHECK(est.total_count == 97);
        CHECK(est.lower_per_min < est.lambda_per_min);
        CHECK(est.upper_per_min > est.lambda_per_min);
    }
    SUBCASE("zero arrivals") {
        const auto est = stationary_counter(0, {}, 600.0, config);
        CHECK(est.lambda_per_min == 0.0);
        CHECK(est.lower_per_min == 0.0);
        CHECK(est.upper_per_min > 0.0);
    }
    SUBCASE("arrivals beyond the duration are not counted") {
        const std::vector<double> times{10.0, 20.0, 700.0};
        const auto est = stationary_counter(0, times, 600.0, config);
        CHECK(est.total_count == 2);
    }
}

TEST_CASE("window extraction applies the independence criterion per link") {
    EstimatorConfig config;
    std::vector<SensingSnapshot> snapshots;
    // Two consecutive snapshots of a parked observer: identical windows.
    snapshots.push_back(make_snapshot(0.0, 0, 20.0, 0.0));
    snapshots.push_back(make_snapshot(1.0, 0, 20.0, 0.0));
    // A snapshot of another link at the same instant.
    snapshots.push_back(make_snapshot(1.0, 1, 20.0, 0.0));
    const auto extraction = extract_windows(snapshots, config);
    CHECK(extraction.accepted.at(0).size() == 1);
    CHECK(extraction.accepted.at(1).size() == 1);
    CHECK(extraction.rejected.size() == 1);
    CHECK(extraction.ledger.interiors_disjoint());
}

TEST_CASE("estimator statistical properties over many runs") {
    // Stationary counter at 1.62/min for 60 min: unbiased MLE, conservative
    // exact intervals. A light versioned of the full acceptance experiment.
    const EstimatorConfig config;
    const double rate_per_min = 1.62;
    const double duration_s = 3600.0;
    std::mt19937_64 rng(2024);
    std::exponential_distribution<double> gap(rate_per_min / 60.0);
    const int runs = 300;
    double lambda_sum = 0.0;
    int covered = 0;
    for (int run = 0; run < runs; ++run) {
        std::vector<double> times;
        double t = gap(rng);
        while (t <= duration_s) {
            times.push_back(t);
            t += gap(rng);
        }
        const auto est = stationary_counter(0, times, duration_s, config);
        lambda_sum += est.lambda_per_min;
        if (est.lower_per_min <= rate_per_min && rate_per_min <= est.upper_per_min) {
            ++covered;
        }
    }
    const double mean_lambda = lambda_sum / runs;
    // Standard error of the mean is ~0.0095; 3 sigma band.
    CHECK(std::abs(mean_lambda - rate_per_min) < 0.03);
    const double coverage = static_cast<double>(covered) / runs;
    CHECK(coverage >= 0.85);
    CHECK(coverage <= 0.99);
}
