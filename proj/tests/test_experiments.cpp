#include <doctest.h>

#include <cmath>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "swarmsearch/experiments.hpp"

using namespace swarm;

namespace {
SimConfig small_config(double rho = 0.0) {
    SimConfig c;
    c.side_length = 1500.0;
    c.n = 8;
    c.rho = rho;
    c.sigma = 3.0;
    c.seed = 1;
    return c;
}
}  // namespace

TEST_CASE("incomplete beta and t tail against Boost") {
    for (double a : {0.5, 1.0, 2.5, 10.0, 150.0}) {
        for (double b : {0.5, 1.0, 3.0, 40.0}) {
            for (double x : {0.0, 1e-6, 0.1, 0.5, 0.77, 0.999, 1.0}) {
                const double want = boost::math::ibeta(a, b, x);
                CHECK(incomplete_beta(a, b, x) == doctest::Approx(want).epsilon(1e-11));
            }
        }
    }
    for (double df : {1.0, 2.0, 3.7, 10.0, 57.3, 598.0}) {
        const boost::math::students_t dist(df);
        for (double t : {0.0, 0.3, 1.0, 2.5, 6.0, -4.0, 25.0}) {
            const double want = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
            const double got = student_t_two_sided(t, df);
            CHECK(got == doctest::Approx(want).epsilon(1e-10));
            if (want > 0.0 && want < 1e-12) CHECK(std::fabs(got / want - 1.0) < 1e-8);
        }
    }
}

TEST_CASE("welch_t by hand") {
    const std::vector<double> a{1, 2, 3};
    const std::vector<double> b{2, 3, 4};
    const auto r = welch_t(a, b);
    // means 2 and 3, variances 1 and 1: t = -1 / sqrt(2/3), df = 4
    CHECK(r.statistic == doctest::Approx(-1.0 / std::sqrt(2.0 / 3.0)).epsilon(1e-14));
    CHECK(r.df == doctest::Approx(4.0).epsilon(1e-14));
    const boost::math::students_t dist(4.0);
    CHECK(r.p_value == doctest::Approx(2.0 * boost::math::cdf(boost::math::complement(dist, -r.statistic))).epsilon(1e-12));

    const auto same = welch_t(a, a);
    CHECK(same.statistic == 0.0);
    CHECK(same.p_value == doctest::Approx(1.0));
    CHECK_THROWS((void)welch_t(std::vector<double>{1}, b));
    CHECK_THROWS((void)welch_t(std::vector<double>{2, 2}, std::vector<double>{3, 3}));

    // unequal sizes and variances
    const std::vector<double> c{10.1, 9.7, 11.2, 10.4, 9.9, 10.8};
    const std::vector<double> d{12.0, 8.1, 14.3};
    const auto [mc, vc] = mean_and_variance(c);
    const auto [md, vd] = mean_and_variance(d);
    const double se2 = vc / 6 + vd / 3;
    const double df = se2 * se2 / ((vc / 6) * (vc / 6) / 5 + (vd / 3) * (vd / 3) / 2);
    const auto w = welch_t(c, d);
    CHECK(w.statistic == doctest::Approx((mc - md) / std::sqrt(se2)).epsilon(1e-13));
    CHECK(w.df == doctest::Approx(df).epsilon(1e-13));
}

TEST_CASE("pearson_r") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> down;
    std::vector<double> up;
    for (double v : x) {
        down.push_back(7.0 - 2.5 * v);
        up.push_back(0.3 * v + 11.0);
    }
    CHECK(pearson_r(x, down).statistic == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(pearson_r(x, up).statistic == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS((void)pearson_r(x, std::vector<double>{1, 1, 1, 1, 1}));
    CHECK_THROWS((void)pearson_r(std::vector<double>{1, 2}, std::vector<double>{1, 2}));

    RngStream rng(10, 0);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> a;
        std::vector<double> b;
        const int n = 3 + static_cast<int>(rng.uniform() * 30);
        for (int i = 0; i < n; ++i) {
            a.push_back(rng.normal());
            b.push_back(0.5 * a.back() + rng.normal());
        }
        double ma = 0, mb = 0;
        for (int i = 0; i < n; ++i) {
            ma += a[i];
            mb += b[i];
        }
        ma /= n;
        mb /= n;
        double sab = 0, saa = 0, sbb = 0;
        for (int i = 0; i < n; ++i) {
            sab += (a[i] - ma) * (b[i] - mb);
            saa += (a[i] - ma) * (a[i] - ma);
            sbb += (b[i] - mb) * (b[i] - mb);
        }
        const double r = sab / std::sqrt(saa * sbb);
        const auto got = pearson_r(a, b);
        CHECK(got.statistic == doctest::Approx(r).epsilon(1e-12));
        std::vector<double> neg;
        for (double v : b) neg.push_back(-v);
        CHECK(pearson_r(a, neg).statistic == doctest::Approx(-r).epsilon(1e-12));
        const double tt = r * std::sqrt((n - 2) / (1 - r * r));
        const boost::math::students_t dist(n - 2);
        CHECK(got.p_value ==
              doctest::Approx(2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(tt)))).epsilon(1e-10));
    }
}

TEST_CASE("best_sigma selection") {
    using P = std::pair<double, std::optional<double>>;
    const std::vector<P> one{{4.0, 10.0}};
    CHECK(best_sigma(one)->sigma == 4.0);
    const std::vector<P> planted{{1, 50.0}, {2, 40.0}, {3, 12.5}, {5, 30.0}, {10, 90.0}};
    CHECK(best_sigma(planted)->sigma == 3.0);
    CHECK(best_sigma(planted)->mean_s_avg == 12.5);
    const std::vector<P> tie{{5, 10.0}, {2, 10.0}, {7, 10.0}};
    CHECK(best_sigma(tie)->sigma == 2.0);
    const std::vector<P> failed{{1, std::nullopt}, {2, 20.0}};
    CHECK(best_sigma(failed)->sigma == 2.0);
    const std::vector<P> none{{1, std::nullopt}};
    CHECK_FALSE(best_sigma(none));
}

TEST_CASE("normalized_curve") {
    const std::vector<double> v{200.0, 100.0, 150.0};
    const auto n = normalized_curve(v, 200.0);
    CHECK(n[0] == 1.0);
    CHECK(n[1] == 0.5);
    CHECK(n[2] == 0.75);
    CHECK_THROWS((void)normalized_curve(v, 0.0));
}

TEST_CASE("run_batch: single replicate equals the single run") {
    const SimConfig c = small_config();
    const auto stats = run_batch(c, 1, 77);
    SimConfig one = c;
    one.seed = replicate_seed(77, 0);
    const auto report = compute_metrics(run_simulation(one));
    REQUIRE(stats.mean_s_avg);
    CHECK(*stats.mean_s_avg == *report.s_avg);
    CHECK(*stats.mean_first_find == *report.first_find);
    CHECK(stats.executed == 1);
    CHECK_FALSE(stats.std_s_avg);
}

TEST_CASE("run_batch: parallel equals serial, reruns are identical") {
    for (double rho : {0.0, 0.3}) {
        const SimConfig c = small_config(rho);
        BatchOptions opts;
        opts.threads = 4;
        const auto par = run_batch(c, 12, 5, opts);
        const auto ser = run_batch_serial(c, 12, 5, opts);
        CHECK(par == ser);
        CHECK(run_batch(c, 12, 5, opts) == par);
        opts.threads = 1;
        CHECK(run_batch(c, 12, 5, opts) == par);
        CHECK(par.s_avg_samples.size() == 12);
    }
    SimConfig m = small_config(0.3);
    m.targets_enabled = false;
    m.max_ticks = 400;
    BatchOptions opts;
    opts.cover_fractions = {0.01, 0.02};
    opts.threads = 3;
    const auto par = run_batch(m, 6, 9, opts);
    CHECK(par == run_batch_serial(m, 6, 9, opts));
    REQUIRE(par.mean_g_size);
    CHECK(*par.mean_g_size >= 1.0);
    CHECK(*par.mean_g_size <= 8.0);
}

TEST_CASE("censoring fails a batch") {
    SimConfig c = small_config();
    c.side_length = 20000.0;
    c.max_ticks = 50;
    const auto stats = run_batch(c, 4, 3);
    CHECK(stats.failed);
    CHECK(stats.censored == 4);
    CHECK_FALSE(stats.mean_s_avg);
    BatchOptions stop;
    stop.stop_on_failure = true;
    stop.threads = 2;
    const auto early = run_batch(c, 4, 3, stop);
    CHECK(early.failed);
    CHECK(early.executed == 1);
    CHECK(early == run_batch_serial(c, 4, 3, stop));
}

TEST_CASE("sweep expansion and normalization") {
    SweepSpec spec;
    spec.base = small_config();
    spec.axes = {{"rho", {0.0, 0.3}}, {"sigma", {1.0, 5.0}}};
    spec.replicates = 3;
    spec.base_seed = 21;
    const auto grid = expand_sweep(spec);
    REQUIRE(grid.size() == 4);
    CHECK(grid[1].second.rho == 0.0);
    CHECK(grid[1].second.sigma == 5.0);
    CHECK(grid[2].second.rho == 0.3);

    SweepSpec r12 = spec;
    r12.axes = {{"r1_frac", {0.2, 0.5}}, {"r2_frac", {0.4, 0.6}}};
    CHECK(expand_sweep(r12).size() == 3);  // (0.5, 0.4) skipped

    SweepSpec bad = spec;
    bad.axes = {{"velocityy", {1.0}}};
    CHECK_THROWS_AS((void)expand_sweep(bad), ConfigError);

    const auto result = run_sweep(spec);
    REQUIRE(result.instances.size() == 4);
    const auto best = best_over_sigma(result);
    REQUIRE(best.size() == 2);
    // the best rho = 0 instance is its own baseline
    REQUIRE(best[0]->normalized);
    CHECK(*best[0]->normalized == 1.0);
    const double base = *best[0]->stats.mean_s_avg;
    for (const auto& inst : result.instances) {
        REQUIRE(inst.normalized);
        CHECK(*inst.normalized == *inst.stats.mean_s_avg / base);
    }
    CHECK(result.instances[1].stats.base_seed == mix_seed(21, 1));
}
