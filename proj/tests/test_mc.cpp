#include "helpers.hpp"

#include <doctest.h>

#include <levylmm/caplet.hpp>
#include <levylmm/mc.hpp>

#include <cmath>

using namespace levylmm;
using namespace testutil;

TEST_CASE("jump sampler: tail intensity and moments against quadrature") {
    const auto measure = case_measure(2);
    const double eps = 0.01;
    JumpGenerator gen(measure, eps, 1.0);

    SUBCASE("band intensities add up to the tail mass") {
        CHECK(close_rel(gen.intensity(), measure.tail_mass(eps), 1e-9));
        CHECK(close_rel(gen.intensity(), cgmy_tail_quadrature(case_params(2), eps, 0), 1e-8));
    }
    SUBCASE("huge truncation level kills the intensity") {
        CHECK(measure.tail_mass(60.0) < 1e-12);
    }
    SUBCASE("empirical mean and second moment within 3 standard errors") {
        const std::int64_t draws = 400000;
        Xoshiro256 rng(99, 1, 2);
        double sum = 0.0, sum2 = 0.0;
        for (std::int64_t i = 0; i < draws; ++i) {
            const double z = gen.sample(rng);
            CHECK(std::abs(z) >= eps);
            sum += z;
            sum2 += z * z;
        }
        const double mean = sum / draws;
        const double mean2 = sum2 / draws;
        const double target_mean = measure.tail_mean(eps) / gen.intensity();
        const double target_m2 = measure.tail_second(eps) / gen.intensity();
        const double se_mean = std::sqrt((mean2 - mean * mean) / draws);
        CHECK(std::abs(mean - target_mean) < 3.0 * se_mean);
        // rough SE of the second moment via the fourth tail moment
        const double m4 = cgmy_tail_quadrature(case_params(2), eps, 4) / gen.intensity();
        const double se_m2 = std::sqrt(std::max(m4 - target_m2 * target_m2, 0.0) / draws);
        CHECK(std::abs(mean2 - target_m2) < 3.0 * se_m2);
    }
}

TEST_CASE("small-jump variance") {
    const auto measure = case_measure(1);
    SUBCASE("vanishes with the truncation level") {
        // activity 1.8 decays like eps^0.2, so the level must be pushed far down
        CHECK(measure.small_jump_variance(1e-30) < 1e-5 * measure.raw_moment(2));
        CHECK(measure.small_jump_variance(1e-9) < measure.small_jump_variance(1e-3));
        const auto fast = case_measure(3);  // activity 0.5 decays like eps^1.5
        CHECK(fast.small_jump_variance(1e-6) < 1e-7 * fast.raw_moment(2));
    }
    SUBCASE("partition identity") {
        for (double eps : {0.001, 0.01, 0.1, 1.0})
            CHECK(close_rel(measure.small_jump_variance(eps) + measure.tail_second(eps),
                            measure.raw_moment(2), 1e-12));
    }
    SUBCASE("case 1 at eps = 0.01 against an independent quadrature mesh") {
        const double tail = cgmy_tail_quadrature(case_params(1), 0.01, 2);
        const double oracle = cgmy_moment_quadrature(case_params(1), 2) - tail;
        CHECK(close_rel(measure.small_jump_variance(0.01), oracle, 1e-8));
    }
    SUBCASE("monotone increasing in eps") {
        double prev = 0.0;
        for (double eps : {0.001, 0.01, 0.1, 1.0}) {
            const double v = measure.small_jump_variance(eps);
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("default truncation level balances substitution error and intensity") {
    for (int c = 1; c <= 4; ++c) {
        const auto measure = case_measure(c);
        const double eps = default_epsilon(measure);
        CAPTURE(c);
        CHECK(measure.tail_mass(eps) <= 100.0 + 1e-9);
        const bool sigma_rule = measure.small_jump_variance(eps) <= 1e-3 * measure.raw_moment(2);
        const bool intensity_bound = measure.tail_mass(eps / 2.0) > 100.0;
        CHECK((sigma_rule || intensity_bound));
    }
}

TEST_CASE("zero loadings freeze the paths") {
    TenorStructure tenor({1.0, 2.0, 3.0});
    InitialCurve curve{{0.04, 0.05}, 0.95};
    auto vols = VolatilitySpec::constant(tenor, {{0.0}, {0.0}});
    MarketModel mkt(tenor, curve, vols, case_measure(2));
    SimConfig cfg;
    cfg.paths = 50;
    cfg.seed = 5;
    const double obs[2] = {0.5, 1.0};
    const auto paths = sample_paths(mkt, cfg, 1.0, obs);
    for (const auto& path : paths)
        for (const auto& state : path) {
            CHECK(state[0] == 0.04);
            CHECK(state[1] == 0.05);
        }
}

TEST_CASE("seed determinism and thread invariance") {
    const auto mkt = paper_market(3);
    SimConfig a;
    a.paths = 4000;
    a.seed = 123;
    a.threads = 1;
    SimConfig b = a;
    b.threads = 2;
    const auto ra = mc_caplet_price(mkt, 1, 0.06, a);
    const auto rb = mc_caplet_price(mkt, 1, 0.06, b);
    const auto rc = mc_caplet_price(mkt, 1, 0.06, a);
    CHECK(ra.estimate == rb.estimate);   // bit-identical across thread counts
    CHECK(ra.estimate == rc.estimate);   // and across reruns
    CHECK(ra.std_error == rb.std_error);
    SimConfig d = a;
    d.seed = 124;
    const auto rd = mc_caplet_price(mkt, 1, 0.06, d);
    CHECK(ra.estimate != rd.estimate);
}

TEST_CASE("deep out-of-the-money caplet prices to zero") {
    const auto mkt = paper_market(2);
    SimConfig cfg;
    cfg.paths = 2000;
    cfg.seed = 9;
    const auto r = mc_caplet_price(mkt, 1, 5.0, cfg);
    CHECK(r.estimate == 0.0);
}

TEST_CASE("terminal rate is a martingale (quick run)") {
    const auto mkt = paper_market(2);
    SimConfig cfg;
    cfg.paths = 30000;
    cfg.seed = 77;
    const double obs[1] = {5.0};
    const auto r = simulate_terminal_measure(
        mkt, cfg, 5.0, obs, [&](std::span<const double> st) { return st[4]; });
    CHECK(r.paths_used == cfg.paths);
    CHECK(std::abs(r.estimate - 0.06) < 3.0 * r.std_error);
}

TEST_CASE("single path: degenerate standard error is flagged as NaN") {
    const auto mkt = paper_market(3);
    SimConfig cfg;
    cfg.paths = 1;
    cfg.seed = 3;
    const auto r = mc_caplet_price(mkt, 1, 0.06, cfg);
    CHECK(r.paths_used == 1);
    CHECK(std::isnan(r.std_error));
}

TEST_CASE("multi-strike pricing shares the simulation") {
    const auto mkt = paper_market(3);
    SimConfig cfg;
    cfg.paths = 5000;
    cfg.seed = 13;
    const double strikes[3] = {0.05, 0.06, 0.07};
    const auto rs = mc_caplet_prices(mkt, 1, strikes, cfg);
    REQUIRE(rs.size() == 3);
    CHECK(rs[0].estimate > rs[1].estimate);
    CHECK(rs[1].estimate > rs[2].estimate);
    // single-strike call on the same seed reproduces the grid entry
    const auto single = mc_caplet_price(mkt, 1, 0.06, cfg);
    CHECK(single.estimate == rs[1].estimate);
}

TEST_CASE("swaption payoff reduces to the caplet for a single period") {
    TenorStructure tenor({4.0, 5.0});
    InitialCurve curve{{0.05}, 0.82};
    auto vols = VolatilitySpec::constant(tenor, {{1.0}});
    MarketModel mkt(tenor, curve, vols, case_measure(2));
    SimConfig cfg;
    cfg.paths = 8000;
    cfg.seed = 21;
    const auto swn = mc_swaption_price(mkt, 0.05, cfg);
    const auto cpl = mc_caplet_price(mkt, 1, 0.05, cfg);
    CHECK(close_rel(swn.estimate, cpl.estimate, 1e-12));  // identical path by path
}

TEST_CASE("zero-strike swaption approximates the floating-leg PV") {
    const auto mkt = paper_market(2);
    SimConfig cfg;
    cfg.paths = 20000;
    cfg.seed = 31;
    const auto r = mc_swaption_price(mkt, 1e-12, cfg);
    CHECK(r.estimate > 0.0);
    // E[A (R - 0)^+] under the terminal measure: floating leg = sum delta B(T_j) L0 by
    // the martingale property of each discounted leg; check within 4 SE
    double legs = 0.0;
    for (int j = 1; j <= 5; ++j) legs += mkt.bonds()[static_cast<std::size_t>(j)] * 0.06;
    CHECK(std::abs(r.estimate - legs) < 4.0 * r.std_error);
}

TEST_CASE("tabulated measures are rejected by the simulator") {
    TenorStructure tenor({1.0, 2.0});
    InitialCurve curve{{0.05}, 0.95};
    auto vols = VolatilitySpec::constant(tenor, {{1.0}});
    std::vector<double> z, f;
    for (int i = 0; i <= 50; ++i) {
        z.push_back(0.1 + i * 0.01);
        f.push_back(1.0);
    }
    MarketModel mkt(tenor, curve, vols, LevyMeasure::tabulated(z, f));
    SimConfig cfg;
    cfg.paths = 10;
    CHECK_THROWS_AS((void)mc_caplet_price(mkt, 1, 0.05, cfg), DomainError);
}

TEST_CASE("frozen-drift log-normal proxy: x_k du0/dx_k has flat mean (martingale spot check)") {
    // two-rate diffusion model, exact log-normal sampling with the drift
    // frozen at t = 0; E[X^1_s d1u0(s, X_s)] should not move across dates
    TenorStructure tenor({1.0, 2.0, 3.0});
    InitialCurve curve{{0.05, 0.06}, 0.94};
    const double c0 = 0.03;
    auto vols = VolatilitySpec::constant(tenor, {{1.0}, {1.0}});
    MarketModel mkt(tenor, curve, vols, LevyMeasure::diffusion_only(c0));

    const double strike = 0.05;
    const auto x0 = mkt.initial_state();
    std::vector<double> b(2);
    mkt.drift_all(0.0, x0, 1.0, b);  // frozen drift coefficients
    const double sigma = std::sqrt(c0);

    const double dates[3] = {0.0, 0.4, 0.8};
    const std::int64_t paths = 40000;
    double mean[3] = {0, 0, 0}, var[3] = {0, 0, 0};
    std::vector<double> samples(static_cast<std::size_t>(paths));
    for (int di = 0; di < 3; ++di) {
        const double s = dates[di];
        Xoshiro256 rng(4242, 0, 0);
        double acc = 0.0;
        for (std::int64_t p = 0; p < paths; ++p) {
            const double w = rng.normal() * std::sqrt(std::max(s, 1e-300));
            std::vector<double> xs(2);
            for (int i = 0; i < 2; ++i)
                xs[static_cast<std::size_t>(i)] =
                    x0[static_cast<std::size_t>(i)] *
                    std::exp((b[static_cast<std::size_t>(i)] - 0.5 * c0) * s + sigma * w);
            const auto jet = caplet_value_jet(mkt, 1, strike, s, xs, 1);
            const double z = xs[0] * jet.partial(MultiIndex::of({1}));
            samples[static_cast<std::size_t>(p)] = z;
            acc += z;
        }
        mean[di] = acc / static_cast<double>(paths);
        double v = 0.0;
        for (double z : samples) v += (z - mean[di]) * (z - mean[di]);
        var[di] = v / static_cast<double>(paths - 1) / static_cast<double>(paths);
    }
    for (int di = 1; di < 3; ++di) {
        const double se = std::sqrt(var[0] + var[di]);
        CHECK(std::abs(mean[di] - mean[0]) < 3.0 * se);
    }
}
