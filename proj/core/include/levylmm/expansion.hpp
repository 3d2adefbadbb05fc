#pragma once

#include <levylmm/jet.hpp>
#include <levylmm/market.hpp>

#include <optional>

namespace levylmm {

struct ExpansionOptions {
    int order = 2;        ///< 0, 1 or 2
    double alpha = 1.0;   ///< scale of the jump perturbation; the model itself is alpha = 1
    /// Reproduce the repeated-loading reading of the order-2 drift integrand
    /// (last moment slot = first index) instead of the pattern-consistent
    /// strictly-increasing fourth index.
    bool verbatim_m4_repeat = false;
};

/// Order-0/1/2 state values and discounted price contributions, with the
/// four second-order term groups kept for diagnostics.
struct PriceBreakdown {
    double u0 = 0.0, u1_tilde = 0.0, u2_tilde = 0.0;
    double P0 = 0.0, P1 = 0.0, P2 = 0.0;
    double e1 = 0.0, e2 = 0.0, e3 = 0.0, e4 = 0.0;
    double alpha = 1.0;
    int order = 2;
    bool proxy_u0 = false;  ///< set when u0 derivatives come from an approximate proxy

    double total_at(double a) const {
        double v = P0;
        if (order >= 1) v += a * P1;
        if (order >= 2) v += a * a * P2;
        return v;
    }
    double total() const { return total_at(alpha); }
};

/// First-order correction
///   u1~ = 1/6 sum_{i1,i2,i3} x x x d3u0 ∫ M^3
///       - sum_{j<j0<j1} w_{j0} w_{j1} x_j dju0 ∫ M^3,
/// sums over rate indices first..n, time integrals over [t, horizon].
double u1_tilde(const MarketModel& market, const Jet& u0, double t, double horizon,
                int first);

struct SecondOrderTerms {
    double e1, e2, e3, e4;
    double total() const { return e1 + e2 + e3 + e4; }
};

/// Second-order correction u2~ = E1 + E2 + E3 + E4 with the nested time
/// integrals evaluated in closed form on the piecewise-constant mesh.
SecondOrderTerms u2_tilde(const MarketModel& market, const Jet& u0, double t,
                          double horizon, int first, bool verbatim_m4_repeat = false);

/// Caplet on rate k with strike K, priced at t = 0 from the initial curve:
///   P = B_0(T_n) delta_k (u0 + alpha u1~ + alpha^2 u2~).
PriceBreakdown price_caplet(const MarketModel& market, int k, double strike,
                            const ExpansionOptions& opts = {});

/// Same expansion evaluated at time t and state x; discount_numeraire is
/// B_t(T_n) (defaults to the initial curve's value, valid at t = 0 only).
PriceBreakdown price_caplet_at(const MarketModel& market, int k, double strike,
                               double t, std::span<const double> x,
                               const ExpansionOptions& opts,
                               std::optional<double> discount_numeraire = std::nullopt);

/// sigma such that discount_accrual * P(sigma^2 expiry, forward, K) = price,
/// solved by safeguarded Newton to |price error| < 1e-12.
double implied_black_vol(double price, double forward, double strike, double expiry,
                         double discount_accrual);

} // namespace levylmm
