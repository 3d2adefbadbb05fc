#include <levylmm/black.hpp>
#include <levylmm/caplet.hpp>
#include <levylmm/expansion.hpp>

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace levylmm {

namespace {

std::vector<double> rational_weights(const MarketModel& market, const Jet& u0) {
    const int n = market.n();
    std::vector<double> w(static_cast<std::size_t>(n) + 1, 0.0);
    for (int j = 1; j <= n; ++j) {
        const double xj = u0.base()[static_cast<std::size_t>(j) - 1];
        const double g = 1.0 + market.tenor().accrual(j) * xj;
        if (std::abs(g) < 1e-12)
            throw SingularStateError("expansion: 1 + delta_j x_j = 0");
        w[static_cast<std::size_t>(j)] = market.tenor().accrual(j) * xj / g;
    }
    return w;
}

// memoized ∫ M^3 / ∫ M^4 over [t, horizon], keyed by the index multiset
class MomentIntegrals {
public:
    MomentIntegrals(const MarketModel& market, double t, double horizon)
        : market_(market), t_(t), horizon_(horizon) {}

    double triple(int a, int b, int c) {
        const std::uint64_t key = MultiIndex::of({a, b, c}).key();
        auto it = i3_.find(key);
        if (it != i3_.end()) return it->second;
        const int idx[3] = {a, b, c};
        double v = market_.integrated_moment(idx, t_, horizon_);
        i3_.emplace(key, v);
        return v;
    }
    double quad(int a, int b, int c, int d) {
        const std::uint64_t key = MultiIndex::of({a, b, c, d}).key();
        auto it = i4_.find(key);
        if (it != i4_.end()) return it->second;
        const int idx[4] = {a, b, c, d};
        double v = market_.integrated_moment(idx, t_, horizon_);
        i4_.emplace(key, v);
        return v;
    }
    // ∫_t^T M^3_s(A) [∫_s^T M^3_v(B) dv] ds
    double nested(const std::array<int, 3>& a, const std::array<int, 3>& b) {
        const auto key = std::make_pair(MultiIndex::of({a[0], a[1], a[2]}).key(),
                                        MultiIndex::of({b[0], b[1], b[2]}).key());
        auto it = d_.find(key);
        if (it != d_.end()) return it->second;
        double v = market_.double_integrated_moment(a, b, t_, horizon_);
        d_.emplace(key, v);
        return v;
    }

private:
    const MarketModel& market_;
    double t_, horizon_;
    std::map<std::uint64_t, double> i3_, i4_;
    std::map<std::pair<std::uint64_t, std::uint64_t>, double> d_;
};

} // namespace

double u1_tilde(const MarketModel& market, const Jet& u0, double t, double horizon,
                int first) {
    if (!market.measure().has_jumps()) return 0.0;
    const int n = market.n();
    const auto& x = u0.base();
    const auto w = rational_weights(market, u0);
    MomentIntegrals mom(market, t, horizon);

    double term1 = 0.0;
    for (int i1 = first; i1 <= n; ++i1)
        for (int i2 = first; i2 <= n; ++i2)
            for (int i3 = first; i3 <= n; ++i3) {
                const double integral = mom.triple(i1, i2, i3);
                if (integral == 0.0) continue;
                term1 += x[static_cast<std::size_t>(i1) - 1] * x[static_cast<std::size_t>(i2) - 1] *
                         x[static_cast<std::size_t>(i3) - 1] *
                         u0.partial(MultiIndex::of({i1, i2, i3})) * integral;
            }

    double term2 = 0.0;
    for (int j = first; j <= n; ++j) {
        const double dju0 = u0.partial(MultiIndex::of({j}));
        for (int j0 = j + 1; j0 <= n; ++j0)
            for (int j1 = j0 + 1; j1 <= n; ++j1)
                term2 += w[static_cast<std::size_t>(j0)] * w[static_cast<std::size_t>(j1)] *
                         x[static_cast<std::size_t>(j) - 1] * dju0 * mom.triple(j, j0, j1);
    }
    return term1 / 6.0 - term2;
}

SecondOrderTerms u2_tilde(const MarketModel& market, const Jet& u0, double t,
                          double horizon, int first, bool verbatim_m4_repeat) {
    if (!market.measure().has_jumps()) return {0.0, 0.0, 0.0, 0.0};
    const int n = market.n();
    const auto& x = u0.base();
    const auto w = rational_weights(market, u0);
    const auto& tenor = market.tenor();
    MomentIntegrals mom(market, t, horizon);

    // E3: 1/24 sum xxxx d4u0 ∫ M^4
    double e3 = 0.0;
    for (int i1 = first; i1 <= n; ++i1)
        for (int i2 = first; i2 <= n; ++i2)
            for (int i3 = first; i3 <= n; ++i3)
                for (int i4 = first; i4 <= n; ++i4) {
                    const double integral = mom.quad(i1, i2, i3, i4);
                    if (integral == 0.0) continue;
                    e3 += x[static_cast<std::size_t>(i1) - 1] * x[static_cast<std::size_t>(i2) - 1] *
                          x[static_cast<std::size_t>(i3) - 1] * x[static_cast<std::size_t>(i4) - 1] *
                          u0.partial(MultiIndex::of({i1, i2, i3, i4})) * integral;
                }
    e3 /= 24.0;

    // E4: - sum_{j<j0<j1<j2} w w w x_j dju0 ∫ M^4(j, j0, j1, j2-or-j)
    double e4 = 0.0;
    for (int j = first; j <= n; ++j) {
        const double dju0 = u0.partial(MultiIndex::of({j}));
        for (int j0 = j + 1; j0 <= n; ++j0)
            for (int j1 = j0 + 1; j1 <= n; ++j1)
                for (int j2 = j1 + 1; j2 <= n; ++j2) {
                    const double integral = verbatim_m4_repeat ? mom.quad(j, j0, j1, j)
                                                               : mom.quad(j, j0, j1, j2);
                    e4 += w[static_cast<std::size_t>(j0)] * w[static_cast<std::size_t>(j1)] *
                          w[static_cast<std::size_t>(j2)] * x[static_cast<std::size_t>(j) - 1] *
                          dju0 * integral;
                }
    }
    e4 = -e4;

    // Shared inner bracket of E1/E2: given a derivative multi-index beta and
    // the outer triple A,
    //   bracket(A, beta) = 1/6 sum_{i4,i5,i6} D(A, i456) v^{i456}_beta
    //                    - sum_{j4<j5<j6}    D(A, j456) vbar^{j456}_beta
    auto bracket = [&](const std::array<int, 3>& a, const MultiIndex& beta) {
        double acc = 0.0;
        for (int i4 = first; i4 <= n; ++i4)
            for (int i5 = first; i5 <= n; ++i5)
                for (int i6 = first; i6 <= n; ++i6) {
                    const double dd = mom.nested(a, {i4, i5, i6});
                    if (dd == 0.0) continue;
                    acc += dd * v_partial(u0, i4, i5, i6, beta) / 6.0;
                }
        for (int j4 = first; j4 <= n; ++j4)
            for (int j5 = j4 + 1; j5 <= n; ++j5)
                for (int j6 = j5 + 1; j6 <= n; ++j6) {
                    const double dd = mom.nested(a, {j4, j5, j6});
                    if (dd == 0.0) continue;
                    acc -= dd * vbar_partial(u0, tenor, j4, j5, j6, beta);
                }
        return acc;
    };

    // E1: 1/6 sum_{i1,i2,i3} x x x bracket((i1,i2,i3), d/dx_{i1,i2,i3})
    double e1 = 0.0;
    for (int i1 = first; i1 <= n; ++i1)
        for (int i2 = i1; i2 <= n; ++i2)
            for (int i3 = i2; i3 <= n; ++i3) {
                // ordered-tuple multiplicity of the multiset {i1,i2,i3}
                double mult = 6.0;
                if (i1 == i2 && i2 == i3) mult = 1.0;
                else if (i1 == i2 || i2 == i3) mult = 3.0;
                e1 += mult * x[static_cast<std::size_t>(i1) - 1] *
                      x[static_cast<std::size_t>(i2) - 1] * x[static_cast<std::size_t>(i3) - 1] *
                      bracket({i1, i2, i3}, MultiIndex::of({i1, i2, i3}));
            }
    e1 /= 6.0;

    // E2: - sum_{j<j0<j1} w w x_j bracket((j,j0,j1), d/dx_j)
    double e2 = 0.0;
    for (int j = first; j <= n; ++j)
        for (int j0 = j + 1; j0 <= n; ++j0)
            for (int j1 = j0 + 1; j1 <= n; ++j1)
                e2 += w[static_cast<std::size_t>(j0)] * w[static_cast<std::size_t>(j1)] *
                      x[static_cast<std::size_t>(j) - 1] *
                      bracket({j, j0, j1}, MultiIndex::of({j}));
    e2 = -e2;

    return {e1, e2, e3, e4};
}

PriceBreakdown price_caplet_at(const MarketModel& market, int k, double strike,
                               double t, std::span<const double> x,
                               const ExpansionOptions& opts,
                               std::optional<double> discount_numeraire) {
    if (opts.order < 0 || opts.order > 2)
        throw std::invalid_argument("price_caplet: order must be 0, 1 or 2");
    if (!(opts.alpha >= 0.0) || !(opts.alpha <= 1.0))
        throw std::invalid_argument("price_caplet: alpha must lie in [0,1]");
    double disc;
    if (discount_numeraire) {
        disc = *discount_numeraire;
    } else {
        if (t != 0.0)
            throw std::invalid_argument(
                "price_caplet: discount B_t(T_n) required when pricing off t = 0");
        disc = market.terminal_bond();
    }

    const bool need_corrections = opts.order >= 1 && market.measure().has_jumps();
    const double horizon = market.tenor().date(k - 1);
    Jet u0 = caplet_value_jet(market, k, strike, t, x, need_corrections ? 6 : 0);

    PriceBreakdown out;
    out.alpha = opts.alpha;
    out.order = opts.order;
    out.u0 = u0.value();
    if (need_corrections) {
        out.u1_tilde = u1_tilde(market, u0, t, horizon, k);
        if (opts.order >= 2) {
            const auto terms = u2_tilde(market, u0, t, horizon, k, opts.verbatim_m4_repeat);
            out.u2_tilde = terms.total();
            out.e1 = terms.e1;
            out.e2 = terms.e2;
            out.e3 = terms.e3;
            out.e4 = terms.e4;
        }
    }
    const double scale = disc * market.tenor().accrual(k);
    out.P0 = scale * out.u0;
    out.P1 = scale * out.u1_tilde;
    out.P2 = scale * out.u2_tilde;
    return out;
}

PriceBreakdown price_caplet(const MarketModel& market, int k, double strike,
                            const ExpansionOptions& opts) {
    const auto x = market.initial_state();
    return price_caplet_at(market, k, strike, 0.0, x, opts);
}

double implied_black_vol(double price, double forward, double strike, double expiry,
                         double discount_accrual) {
    if (!(forward > 0) || !(strike > 0) || !(expiry > 0) || !(discount_accrual > 0))
        throw std::invalid_argument("implied_black_vol: bad market inputs");
    const double intrinsic = discount_accrual * std::max(forward - strike, 0.0);
    const double upper = discount_accrual * forward;
    if (price < intrinsic - 1e-14 || price >= upper)
        throw PriceBoundsError("implied_black_vol: price violates arbitrage bounds");
    if (price <= intrinsic) return 0.0;

    auto value = [&](double sigma) {
        return discount_accrual * black_price(sigma * sigma * expiry, forward, strike);
    };
    // bracket the root
    double lo = 0.0, hi = 1.0;
    while (value(hi) < price) {
        hi *= 2.0;
        if (hi > 64.0)
            throw PriceBoundsError("implied_black_vol: no volatility matches the price");
    }
    double sigma = std::min(0.5 * hi, std::max(1e-4, 0.25 * hi));
    for (int it = 0; it < 100; ++it) {
        const double diff = value(sigma) - price;
        if (std::abs(diff) < 1e-12) return sigma;
        if (diff > 0) hi = sigma; else lo = sigma;
        const double sv = sigma * std::sqrt(expiry);
        const double d1 = (std::log(forward / strike) + 0.5 * sv * sv) / sv;
        const double vega = discount_accrual * forward * norm_pdf(d1) * std::sqrt(expiry);
        double next = sigma - diff / vega;
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);  // safeguard
        sigma = next;
    }
    return sigma;
}

} // namespace levylmm
