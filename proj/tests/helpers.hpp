#pragma once

#include <levylmm/market.hpp>
#include <levylmm/quadrature.hpp>

#include <cmath>
#include <functional>
#include <vector>

namespace testutil {

using namespace levylmm;

// The four tempered power-law parameter sets of the reproduction study.
inline CgmyJumps case_params(int c) {
    switch (c) {
        case 1: return {0.01, 10.0, 20.0, 1.8};
        case 2: return {0.1, 10.0, 20.0, 1.2};
        case 3: return {0.2, 10.0, 20.0, 0.5};
        default: return {0.2, 3.0, 5.0, 0.2};
    }
}

inline LevyMeasure case_measure(int c) {
    const auto g = case_params(c);
    return LevyMeasure::cgmy(g.C, g.lambda_plus, g.lambda_minus, g.Y);
}

// Flat 6% five-rate market, unit loadings, B_0(T_0) = 1.06^-5.
inline MarketModel paper_market(LevyMeasure measure) {
    TenorStructure tenor({5.0, 6.0, 7.0, 8.0, 9.0, 10.0});
    InitialCurve curve{{0.06, 0.06, 0.06, 0.06, 0.06}, std::pow(1.06, -5.0)};
    auto vols = VolatilitySpec::constant(tenor, {{1.0}, {1.0}, {1.0}, {1.0}, {1.0}});
    return MarketModel(std::move(tenor), std::move(curve), std::move(vols), std::move(measure));
}

inline MarketModel paper_market(int c) { return paper_market(case_measure(c)); }

// ---- independent quadrature oracle for the tempered power-law moments ----
// tanh-sinh near the origin (integrable singularity) plus Gauss-Kronrod tails;
// shares nothing with the gamma-function closed form under test.
inline double cgmy_moment_quadrature(const CgmyJumps& g, int k) {
    auto side = [&](double temper) {
        auto f = [&](double z) { return std::pow(z, k - 1.0 - g.Y) * std::exp(-temper * z); };
        return quad::half_line(f, 0.0);
    };
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return g.C * (side(g.lambda_plus) + sign * side(g.lambda_minus));
}

// tail integrals ∫_{|z|>eps} z^k F with an independent split/mesh
inline double cgmy_tail_quadrature(const CgmyJumps& g, double eps, int k) {
    auto side = [&](double temper) {
        auto f = [&](double z) { return std::pow(z, k - 1.0 - g.Y) * std::exp(-temper * z); };
        return quad::gauss_kronrod(f, eps, 2.0 * eps + 1.0, 1e-13) +
               quad::gauss_kronrod(f, 2.0 * eps + 1.0,
                                   std::numeric_limits<double>::infinity(), 1e-13);
    };
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return g.C * (side(g.lambda_plus) + sign * side(g.lambda_minus));
}

// ---- finite differences (oracle only) ----
// 4th-order central stencil with one Richardson level (6th-order accurate),
// applied recursively per variable.  Steps are calibrated against closed
// forms: nested stencils amplify roundoff by (1/h)^order, so high orders
// need steps far above the naive 1e-3 scale.
inline double fd_step(double scale, int total_order) {
    const double base = std::max(std::abs(scale), 0.05);
    return total_order <= 4 ? 2e-2 * base : 3e-2 * base;
}

inline double fd_first(const std::function<double(double)>& f, double x, double h) {
    return (f(x - 2 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2 * h)) / (12.0 * h);
}

inline double fd_first_rich(const std::function<double(double)>& f, double x, double h) {
    return (16.0 * fd_first(f, x, 0.5 * h) - fd_first(f, x, h)) / 15.0;
}

// d^beta f at x by nested Richardson stencils; beta indexed by rate (1-based).
inline double fd_mixed_partial(const std::function<double(std::vector<double>)>& f,
                               std::vector<double> x, std::vector<int> beta,
                               int total_order) {
    int var = -1;
    for (std::size_t v = 0; v < beta.size(); ++v)
        if (beta[v] > 0) { var = static_cast<int>(v); break; }
    if (var < 0) return f(x);
    beta[static_cast<std::size_t>(var)] -= 1;
    const double h = fd_step(x[static_cast<std::size_t>(var)], total_order);
    auto g = [&](double xv) {
        std::vector<double> y = x;
        y[static_cast<std::size_t>(var)] = xv;
        return fd_mixed_partial(f, y, beta, total_order);
    };
    return fd_first_rich(g, x[static_cast<std::size_t>(var)], h);
}

inline bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Direct numerical evaluation of the terminal-measure drift
//   b^k = -sum_{j>k} w_j <l^k, c l^j> + ∫ l^k z (1 - prod_{j>k}(1 + w_j l^j z)) F(dz)
// (d = 1), independent of the finite moment expansion in MarketModel.
inline double drift_quadrature_oracle(const MarketModel& mkt, int k, double t,
                                      std::span<const double> x) {
    const int n = mkt.n();
    std::vector<double> w(static_cast<std::size_t>(n) + 1);
    for (int j = 1; j <= n; ++j) {
        const double d = mkt.tenor().accrual(j);
        w[static_cast<std::size_t>(j)] = d * x[static_cast<std::size_t>(j) - 1] /
                                         (1.0 + d * x[static_cast<std::size_t>(j) - 1]);
    }
    const int iv = mkt.vols().interval_of(t);
    auto lam = [&](int j) { return mkt.vols().loading(j, iv)[0]; };

    double diffusion = 0.0;
    for (int j = k + 1; j <= n; ++j)
        diffusion += w[static_cast<std::size_t>(j)] * lam(k) * mkt.measure().diffusion(0, 0) * lam(j);

    double jump = 0.0;
    if (const auto* g = std::get_if<CgmyJumps>(&mkt.measure().jumps())) {
        // integrand written as [ (1 - prod(1 + a_j z)) / z ] * z^2 F(z):
        //  - the bracket stays O(1) near zero via expm1/log1p,
        //  - z^2 F(z) = C exp((1-Y) ln|z| - temper |z|) never over/underflows
        //    on the tanh-sinh abscissas.
        auto one_minus_prod_over_z = [&](double z) {
            bool log_route = true;
            double logsum = 0.0, prod = 1.0;
            for (int j = k + 1; j <= n; ++j) {
                const double a = w[static_cast<std::size_t>(j)] * lam(j) * z;
                prod *= 1.0 + a;
                if (!(a > -0.5 && a < 0.5)) log_route = false;
                else logsum += std::log1p(a);
            }
            return log_route ? -std::expm1(logsum) / z : (1.0 - prod) / z;
        };
        auto side = [&](double sign, double temper) {
            auto f = [&](double u) {
                const double z = sign * u;
                const double weighted_density =
                    g->C * std::exp((1.0 - g->Y) * std::log(u) - temper * u);
                return lam(k) * one_minus_prod_over_z(z) * weighted_density;
            };
            return quad::half_line(f, 0.0);
        };
        jump = side(1.0, g->lambda_plus) + side(-1.0, g->lambda_minus);
    } else if (mkt.measure().has_jumps()) {
        auto integrand = [&](double z) {
            double prod = 1.0;
            for (int j = k + 1; j <= n; ++j)
                prod *= 1.0 + w[static_cast<std::size_t>(j)] * lam(j) * z;
            return lam(k) * z * (1.0 - prod) * mkt.measure().jump_density(z);
        };
        jump = quad::half_line(integrand, 0.0) +
               quad::half_line([&](double u) { return integrand(-u); }, 0.0);
    }
    return -diffusion + jump;
}

} // namespace testutil
