#include <levylmm/black.hpp>
#include <levylmm/series.hpp>
#include <levylmm/swaption.hpp>

#include <cmath>
#include <stdexcept>

namespace levylmm {

namespace {

// prod_{i=j+1}^n (1 + delta_i x_i)
double tail_product(const MarketModel& market, std::span<const double> x, int j) {
    double p = 1.0;
    for (int i = j + 1; i <= market.n(); ++i)
        p *= 1.0 + market.tenor().accrual(i) * x[static_cast<std::size_t>(i) - 1];
    return p;
}

void check_state(const MarketModel& market, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(market.n()))
        throw std::invalid_argument("swaption: state dimension mismatch");
    for (int i = 1; i <= market.n(); ++i)
        if (!(1.0 + market.tenor().accrual(i) * x[static_cast<std::size_t>(i) - 1] > 1e-12))
            throw SingularStateError("swaption: 1 + delta_i x_i must be positive");
}

} // namespace

double annuity_factor(const MarketModel& market, std::span<const double> x) {
    check_state(market, x);
    double a = 0.0;
    for (int j = 1; j <= market.n(); ++j)
        a += market.tenor().accrual(j) * tail_product(market, x, j);
    return a;
}

std::vector<double> swap_weights(const MarketModel& market, std::span<const double> x) {
    check_state(market, x);
    const double a = annuity_factor(market, x);
    std::vector<double> f(static_cast<std::size_t>(market.n()));
    for (int j = 1; j <= market.n(); ++j)
        f[static_cast<std::size_t>(j) - 1] =
            market.tenor().accrual(j) * tail_product(market, x, j) / a;
    return f;
}

double swap_rate(const MarketModel& market, std::span<const double> x) {
    const auto f = swap_weights(market, x);
    double r = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) r += f[j] * x[j];
    return r;
}

std::vector<double> swap_rate_gradient(const MarketModel& market, std::span<const double> x) {
    check_state(market, x);
    const int n = market.n();
    const auto& tenor = market.tenor();
    double numer = 0.0, denom = 0.0;
    std::vector<double> prods(static_cast<std::size_t>(n) + 1);
    for (int j = 1; j <= n; ++j) {
        prods[static_cast<std::size_t>(j)] = tail_product(market, x, j);
        numer += tenor.accrual(j) * x[static_cast<std::size_t>(j) - 1] * prods[static_cast<std::size_t>(j)];
        denom += tenor.accrual(j) * prods[static_cast<std::size_t>(j)];
    }
    std::vector<double> grad(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        const double ri = tenor.accrual(i) /
                          (1.0 + tenor.accrual(i) * x[static_cast<std::size_t>(i) - 1]);
        // d/dx_i of prod_{l>j}: present only for j < i
        double dn = tenor.accrual(i) * prods[static_cast<std::size_t>(i)];
        double dd = 0.0;
        for (int j = 1; j < i; ++j) {
            dn += tenor.accrual(j) * x[static_cast<std::size_t>(j) - 1] *
                  prods[static_cast<std::size_t>(j)] * ri;
            dd += tenor.accrual(j) * prods[static_cast<std::size_t>(j)] * ri;
        }
        grad[static_cast<std::size_t>(i) - 1] = (dn * denom - numer * dd) / (denom * denom);
    }
    return grad;
}

double swap_variance(const MarketModel& market, double t0, double T,
                     std::span<const double> x) {
    if (!(T <= market.tenor().date(0) + 1e-12))
        throw std::invalid_argument("swap_variance: expiry past the first reset");
    const auto grad = swap_rate_gradient(market, x);
    const double r = swap_rate(market, x);
    const int n = market.n();
    double v = 0.0;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            v += grad[static_cast<std::size_t>(i) - 1] * grad[static_cast<std::size_t>(j) - 1] *
                 x[static_cast<std::size_t>(i) - 1] * x[static_cast<std::size_t>(j) - 1] *
                 market.integrated_covariance(i, j, t0, T) / (r * r);
    return v;
}

double price_swaption_order0(const MarketModel& market, double strike) {
    const auto x = market.initial_state();
    const double expiry = market.tenor().date(0);
    const double v = swap_variance(market, 0.0, expiry, x);
    const double r = swap_rate(market, x);
    const double annuity = market.terminal_bond() * annuity_factor(market, x);
    return annuity * black_price(v, r, strike);
}

Jet swaption_proxy_jet(const MarketModel& market, double strike, double t,
                       std::span<const double> x, int max_order) {
    check_state(market, x);
    const int n = market.n();
    const double expiry = market.tenor().date(0);
    if (!(t < expiry))
        throw std::invalid_argument("swaption_proxy_jet: evaluation time past expiry");

    auto layout = TruncatedSeries::Layout::make(n, max_order);
    auto one = TruncatedSeries::constant(layout, 1.0);

    // A(x) and N(x) as exact multilinear polynomials in the state
    std::vector<TruncatedSeries> growth;  // 1 + delta_i x_i
    growth.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        auto g = TruncatedSeries::variable(layout, i, x[static_cast<std::size_t>(i) - 1]);
        g *= market.tenor().accrual(i);
        g += one;
        growth.push_back(std::move(g));
    }
    auto annuity = TruncatedSeries::constant(layout, 0.0);
    auto floating = TruncatedSeries::constant(layout, 0.0);
    auto prod = one;  // prod_{i=j+1}^n computed from the back
    for (int j = n; j >= 1; --j) {
        auto leg = prod * market.tenor().accrual(j);
        annuity += leg;
        floating += leg * TruncatedSeries::variable(layout, j, x[static_cast<std::size_t>(j) - 1]);
        prod = prod * growth[static_cast<std::size_t>(j) - 1];
    }

    auto rate = floating * annuity.reciprocal();
    const double r0 = rate.constant_term();
    const double variance = swap_variance(market, t, expiry, x);
    const auto kernel = black_spot_derivatives(variance, r0, strike, max_order);
    auto value = annuity * rate.compose_outer(kernel);
    Jet jet = value.to_jet(std::vector<double>(x.begin(), x.end()));
    return jet;
}

PriceBreakdown price_swaption(const MarketModel& market, double strike,
                              const ExpansionOptions& opts) {
    if (opts.order < 0 || opts.order > 2)
        throw std::invalid_argument("price_swaption: order must be 0, 1 or 2");
    const auto x = market.initial_state();
    const double expiry = market.tenor().date(0);
    const bool need_corrections = opts.order >= 1 && market.measure().has_jumps();

    Jet u0 = swaption_proxy_jet(market, strike, 0.0, x, need_corrections ? 6 : 0);

    PriceBreakdown out;
    out.alpha = opts.alpha;
    out.order = opts.order;
    out.proxy_u0 = true;
    out.u0 = u0.value();
    if (need_corrections) {
        out.u1_tilde = u1_tilde(market, u0, 0.0, expiry, 1);
        if (opts.order >= 2) {
            const auto terms = u2_tilde(market, u0, 0.0, expiry, 1, opts.verbatim_m4_repeat);
            out.u2_tilde = terms.total();
            out.e1 = terms.e1;
            out.e2 = terms.e2;
            out.e3 = terms.e3;
            out.e4 = terms.e4;
        }
    }
    const double disc = market.terminal_bond();
    out.P0 = disc * out.u0;
    out.P1 = disc * out.u1_tilde;
    out.P2 = disc * out.u2_tilde;
    return out;
}

} // namespace levylmm
