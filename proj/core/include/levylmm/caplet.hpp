#pragma once

#include <levylmm/jet.hpp>
#include <levylmm/market.hpp>

#include <span>

namespace levylmm {

/// Mixed partials (up to max_order) of the caplet's log-normal proxy value
///   u0(t,x) = P(V, x_k, K) * prod_{j>k} (1 + delta_j x_j),
///   V = ∫_t^{T_{k-1}} Sigma_kk(s) ds,
/// at the state x.  Partials are exact: the x_k direction uses the kernel's
/// spot derivatives, each x_j (j > k) enters linearly, and derivatives with
/// respect to x_1..x_{k-1} vanish.
Jet caplet_value_jet(const MarketModel& market, int k, double strike, double t,
                     std::span<const double> x, int max_order = 6);

/// d^beta of v^{i,j,l}(t,x) = x_i x_j x_l d^3 u0 / dx_i dx_j dx_l,
/// by Leibniz over the monomial factor (|beta| + 3 <= u0 budget).
double v_partial(const Jet& u0, int i, int j, int l, const MultiIndex& beta);

/// d^beta of vbar^{i,j,l}(t,x) = x_i w_j(x_j) w_l(x_l) du0/dx_i with
/// w_j(y) = delta_j y / (1 + delta_j y); requires i < j < l.
double vbar_partial(const Jet& u0, const TenorStructure& tenor, int i, int j, int l,
                    const MultiIndex& beta);

/// Materialized jets of v / vbar carrying every partial of total order <= 3
/// (which includes the first-order partials the expansion needs).
Jet v_jet(const Jet& u0, int i, int j, int l);
Jet vbar_jet(const Jet& u0, const TenorStructure& tenor, int i, int j, int l);

} // namespace levylmm
