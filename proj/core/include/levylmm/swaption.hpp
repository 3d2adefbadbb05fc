#pragma once

#include <levylmm/expansion.hpp>
#include <levylmm/jet.hpp>
#include <levylmm/market.hpp>

#include <span>
#include <vector>

namespace levylmm {

/// Payer swaption on the model's full underlying period T_0..T_n with expiry
/// at the swap's first reset T_0 and unit notional.
struct SwapSpec {
    double strike;
};

/// Swap rate R(x) = sum_j f_j(x) x_j with
///   f_j(x) = delta_j prod_{i>j}(1+delta_i x_i) / sum_k delta_k prod_{i>k}(1+delta_i x_i).
double swap_rate(const MarketModel& market, std::span<const double> x);

/// The weights f_j(x), j = 1..n (returned 0-based).
std::vector<double> swap_weights(const MarketModel& market, std::span<const double> x);

/// Analytic gradient dR/dx_i (quotient rule on the closed-form weights).
std::vector<double> swap_rate_gradient(const MarketModel& market, std::span<const double> x);

/// Annuity relative to the terminal bond: A(x) = sum_j delta_j prod_{i>j}(1+delta_i x_i),
/// so that sum_j delta_j B_t(T_j) = B_t(T_n) A(L_t).
double annuity_factor(const MarketModel& market, std::span<const double> x);

/// Frozen-coefficient log-variance of the swap rate over [t0, T]:
///   V = sum_ij dR_i dR_j x_i x_j / R^2 ∫_{t0}^T Sigma_ij(s) ds
/// with everything frozen at the state x.
double swap_variance(const MarketModel& market, double t0, double T,
                     std::span<const double> x);

/// Frozen-weight log-normal approximation of the swaption price at t = 0:
///   sum_j delta_j B_0(T_j) * P(V^swap, R(0), K).
double price_swaption_order0(const MarketModel& market, double strike);

/// Mixed partials (orders <= max_order) of the log-normal proxy value
///   u0(t,x) = A(x) P(V^swap(t,x-frozen), R(x), K)
/// built by truncated series arithmetic on the swap-rate algebra.
Jet swaption_proxy_jet(const MarketModel& market, double strike, double t,
                       std::span<const double> x, int max_order = 6);

/// Expansion-corrected swaption price at t = 0.  Order 0 equals
/// price_swaption_order0; corrections drive the general-payoff machinery with
/// the proxy's derivatives and are flagged proxy_u0 in the result.
PriceBreakdown price_swaption(const MarketModel& market, double strike,
                              const ExpansionOptions& opts = {});

} // namespace levylmm
