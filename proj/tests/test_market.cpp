#include "helpers.hpp"

#include <doctest.h>

#include <random>

using namespace levylmm;
using namespace testutil;

namespace {

double drift_quadrature(const MarketModel& mkt, int k, double t, std::span<const double> x) {
    return drift_quadrature_oracle(mkt, k, t, x);
}

} // namespace

TEST_CASE("bond recursion") {
    SUBCASE("paper curve telescopes to 1.06^-10") {
        const auto mkt = paper_market(1);
        CHECK(mkt.bonds()[0] == doctest::Approx(std::pow(1.06, -5.0)).epsilon(1e-14));
        CHECK(mkt.bonds()[5] == doctest::Approx(std::pow(1.06, -10.0)).epsilon(1e-13));
    }
    SUBCASE("zero rate keeps the discount flat") {
        TenorStructure tenor({1.0, 2.0});
        const auto bonds = bonds_from_libors({{0.0}, 0.9}, tenor);
        CHECK(bonds[1] == 0.9);
    }
    SUBCASE("half-year accruals at 4% divide by 1.02") {
        TenorStructure tenor({0.5, 1.0, 1.5});
        const auto bonds = bonds_from_libors({{0.04, 0.04}, 1.0}, tenor);
        CHECK(bonds[1] == doctest::Approx(1.0 / 1.02).epsilon(1e-15));
        CHECK(bonds[2] == doctest::Approx(1.0 / (1.02 * 1.02)).epsilon(1e-15));
    }
}

TEST_CASE("volatility cutoff is structural") {
    const auto mkt = paper_market(2);
    const auto& vols = mkt.vols();
    // intervals: [0,5),[5,6),...,[9,10); rate k dies at T_{k-1}
    for (int k = 1; k <= 5; ++k)
        for (int iv = 0; iv < vols.intervals(); ++iv) {
            const bool live = vols.edge(iv) < mkt.tenor().date(k - 1);
            CHECK(vols.loading(k, iv)[0] == (live ? 1.0 : 0.0));
        }
    CHECK(vols.at(1, 4.999)[0] == 1.0);
    CHECK(vols.at(1, 5.0)[0] == 0.0);
}

TEST_CASE("drift layers: trivial index ranges") {
    const auto mkt = paper_market(1);
    const auto x = mkt.initial_state();
    for (int p = 0; p <= 4; ++p) CHECK(mkt.drift_layer(p, 5, 0.0, x) == 0.0);
    CHECK(mkt.drift_layer(4, 1, 0.0, x) == 0.0);  // p > n-k-1
    CHECK(mkt.drift(5, 0.0, x, 1.0) == 0.0);      // terminal rate is a martingale
}

TEST_CASE("drift layer p=1, k=1 at the initial state (hand count of index pairs)") {
    const auto mkt = paper_market(1);
    const auto x = mkt.initial_state();
    // six strictly increasing pairs (j0,j1) from {2..5}; w = 0.06/1.06
    const double w = 0.06 / 1.06;
    const double expected = -3.27159323365e-4 * 6.0 * w * w;
    CHECK(close_rel(mkt.drift_layer(1, 1, 0.0, x), expected, 1e-10));
    CHECK(close_rel(mkt.drift_layer(1, 1, 0.0, x), -6.28928567522e-6, 1e-9));
}

TEST_CASE("drift layer against an unordered-sum multiplicity check (n = 3)") {
    TenorStructure tenor({1.0, 2.0, 3.0, 4.0});
    InitialCurve curve{{0.03, 0.05, 0.07}, 0.97};
    auto vols = VolatilitySpec::constant(tenor, {{1.0}, {0.8}, {1.2}});
    MarketModel mkt(tenor, curve, vols, case_measure(2));
    const auto x = mkt.initial_state();
    const double m3 = mkt.measure().raw_moment(3);
    auto w = [&](int j) { return x[static_cast<std::size_t>(j) - 1] / (1.0 + x[static_cast<std::size_t>(j) - 1]); };
    // k=1, p=1: unordered sum over ordered pairs (j0 != j1 in {2,3}) / 2!
    const double unordered = 2.0 * (0.8 * w(2)) * (1.2 * w(3));
    const double expected = -m3 * 1.0 * unordered / 2.0;
    CHECK(close_rel(mkt.drift_layer(1, 1, 0.0, x), expected, 1e-12));
}

TEST_CASE("full drift equals the alpha-polynomial in its layers") {
    const auto mkt = paper_market(3);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.001, 0.2);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> x(5);
        for (auto& v : x) v = u(rng);
        const double alpha = 0.3 + 0.1 * rep / 20.0;
        for (int k = 1; k <= 5; ++k) {
            double acc = 0.0, ap = 1.0;
            for (int p = 0; p <= 5 - k - 1; ++p) {
                acc += ap * mkt.drift_layer(p, k, 0.0, x);
                ap *= alpha;
            }
            CHECK(close_rel(mkt.drift(k, 0.0, x, alpha), acc, 1e-13));
        }
        // the fast all-rates path agrees with per-rate evaluation
        std::vector<double> all(5);
        mkt.drift_all(0.0, x, alpha, all);
        for (int k = 1; k <= 5; ++k)
            CHECK(close_rel(all[static_cast<std::size_t>(k) - 1], mkt.drift(k, 0.0, x, alpha), 1e-13));
    }
}

TEST_CASE("alpha -> 0 keeps only the covariance layer") {
    const auto mkt = paper_market(4);
    const auto x = mkt.initial_state();
    for (int k = 1; k <= 5; ++k)
        CHECK(mkt.drift(k, 0.0, x, 0.0) == mkt.drift_layer(0, k, 0.0, x));
}

TEST_CASE("full drift at alpha = 1 matches direct quadrature (expansion consistency)") {
    SUBCASE("initial state, all four cases, every rate") {
        for (int c = 1; c <= 4; ++c) {
            const auto mkt = paper_market(c);
            const auto x = mkt.initial_state();
            for (int k = 1; k <= 5; ++k) {
                const double exact = mkt.drift(k, 0.0, x, 1.0);
                const double oracle = drift_quadrature(mkt, k, 0.0, x);
                CAPTURE(c);
                CAPTURE(k);
                CHECK(std::abs(exact - oracle) <= 1e-6 * std::max(1.0, std::abs(exact)));
            }
        }
    }
    SUBCASE("200 random states, case 2") {
        const auto mkt = paper_market(2);
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(0.001, 0.2);
        for (int rep = 0; rep < 200; ++rep) {
            std::vector<double> x(5);
            for (auto& v : x) v = u(rng);
            for (int k = 1; k <= 5; ++k) {
                const double exact = mkt.drift(k, 0.0, x, 1.0);
                const double oracle = drift_quadrature(mkt, k, 0.0, x);
                CHECK(std::abs(exact - oracle) <= 1e-6 * std::max(1.0, std::abs(exact)));
            }
        }
    }
}

TEST_CASE("singular states are rejected") {
    const auto mkt = paper_market(1);
    std::vector<double> x(5, 0.06);
    x[2] = -1.0;  // 1 + delta x = 0
    CHECK_THROWS_AS((void)mkt.drift(1, 0.0, x, 1.0), SingularStateError);
}

TEST_CASE("integrated contracted moments") {
    const auto mkt = paper_market(1);
    const double m3 = mkt.measure().raw_moment(3);

    SUBCASE("dead loading gives zero") {
        const int idx[3] = {1, 1, 1};
        CHECK(mkt.integrated_moment(idx, 5.0, 9.0) == 0.0);  // rate 1 cut off at T_0 = 5
    }
    SUBCASE("all live on [0, 5)") {
        const int idx1[3] = {1, 1, 1};
        CHECK(close_rel(mkt.integrated_moment(idx1, 0.0, 5.0), 5.0 * m3, 1e-13));
        const int idx2[3] = {1, 2, 3};
        CHECK(close_rel(mkt.integrated_moment(idx2, 0.0, 5.0), 5.0 * m3, 1e-13));
    }
    SUBCASE("cutoffs bind past the first reset") {
        const int idx[3] = {2, 3, 4};  // all live until T_1 = 6
        CHECK(close_rel(mkt.integrated_moment(idx, 0.0, 7.0), 6.0 * m3, 1e-13));
    }
    SUBCASE("additivity over adjacent windows") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0.0, 9.0);
        const int idx[3] = {2, 3, 5};
        for (int rep = 0; rep < 30; ++rep) {
            double a = u(rng), b = u(rng), c2 = u(rng);
            if (a > b) std::swap(a, b);
            if (b > c2) std::swap(b, c2);
            if (a > b) std::swap(a, b);
            const double whole = mkt.integrated_moment(idx, a, c2);
            const double split = mkt.integrated_moment(idx, a, b) + mkt.integrated_moment(idx, b, c2);
            CHECK(close_rel(whole, split, 1e-12));
        }
    }
}

TEST_CASE("nested double time integral on the piecewise mesh") {
    const auto mkt = paper_market(2);
    const double m3 = mkt.measure().raw_moment(3);
    const int a[3] = {1, 2, 3};
    const int b[3] = {1, 4, 5};
    SUBCASE("both constant on [0,T0): closed form T^2/2") {
        const double got = mkt.double_integrated_moment(a, b, 0.0, 5.0);
        CHECK(close_rel(got, m3 * m3 * 5.0 * 5.0 / 2.0, 1e-12));
    }
    SUBCASE("numerical cross-check with a fine Riemann refinement") {
        // window crossing breakpoints so the piecewise structure matters
        const int a2[3] = {2, 3, 4};
        const int b2[3] = {3, 4, 5};
        const double t0 = 4.0, t1 = 8.0;
        const int steps = 4000;
        double riemann = 0.0;
        const double h = (t1 - t0) / steps;
        for (int i = 0; i < steps; ++i) {
            const double s = t0 + (i + 0.5) * h;
            const double inner = mkt.integrated_moment(b2, s, t1);
            const double ca = mkt.contracted_on_interval(a2, mkt.vols().interval_of(s));
            riemann += ca * inner * h;
        }
        const double exact = mkt.double_integrated_moment(a2, b2, t0, t1);
        CHECK(close_rel(exact, riemann, 1e-5));
    }
}

TEST_CASE("construction guards") {
    CHECK_THROWS_AS(TenorStructure({2.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(TenorStructure({1.0}), std::invalid_argument);
    TenorStructure tenor({1.0, 2.0});
    CHECK_THROWS_AS(bonds_from_libors({{-2.0}, 1.0}, tenor), std::invalid_argument);
    CHECK_THROWS_AS(VolatilitySpec::constant(tenor, {{1.0}, {1.0}}), std::invalid_argument);
}
