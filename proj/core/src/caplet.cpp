#include <levylmm/black.hpp>
#include <levylmm/caplet.hpp>

#include <cmath>
#include <stdexcept>

namespace levylmm {

Jet caplet_value_jet(const MarketModel& market, int k, double strike, double t,
                     std::span<const double> x, int max_order) {
    const int n = market.n();
    if (k < 1 || k > n)
        throw std::invalid_argument("caplet_value_jet: rate index out of range");
    const double reset = market.tenor().date(k - 1);
    if (!(t < reset))
        throw std::invalid_argument("caplet_value_jet: evaluation time past the caplet reset");
    if (x.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("caplet_value_jet: state dimension mismatch");
    const double xk = x[static_cast<std::size_t>(k) - 1];
    if (!(xk > 0.0))
        throw DomainError("caplet_value_jet: forward rate must be positive");

    const double variance = market.integrated_covariance(k, k, t, reset);
    const auto spot = black_spot_derivatives(variance, xk, strike, max_order);

    double tail_product = 1.0;  // prod_{j>k} (1 + delta_j x_j)
    for (int j = k + 1; j <= n; ++j)
        tail_product *= 1.0 + market.tenor().accrual(j) * x[static_cast<std::size_t>(j) - 1];

    // rho_j = delta_j / (1 + delta_j x_j): switching the linear factor j from
    // "undifferentiated" to "differentiated once" multiplies by rho_j.
    std::vector<double> rho(static_cast<std::size_t>(n) + 1, 0.0);
    for (int j = k + 1; j <= n; ++j) {
        const double g = 1.0 + market.tenor().accrual(j) * x[static_cast<std::size_t>(j) - 1];
        if (std::abs(g) < 1e-12)
            throw SingularStateError("caplet_value_jet: 1 + delta_j x_j = 0");
        rho[static_cast<std::size_t>(j)] = market.tenor().accrual(j) / g;
    }

    Jet jet(std::vector<double>(x.begin(), x.end()), max_order);
    // every nonzero coefficient is (spot order a) x (subset S of tail factors)
    const int tail = n - k;
    for (int a = 0; a <= max_order; ++a) {
        const int room = max_order - a;
        for (std::uint32_t mask = 0; mask < (1u << tail); ++mask) {
            const int bits = __builtin_popcount(mask);
            if (bits > room) continue;
            double coeff = spot[static_cast<std::size_t>(a)] * tail_product;
            MultiIndex mi;
            mi.bump(k, a);
            for (int b = 0; b < tail; ++b)
                if (mask & (1u << b)) {
                    const int j = k + 1 + b;
                    coeff *= rho[static_cast<std::size_t>(j)];
                    mi.bump(j);
                }
            jet.set(mi, coeff);
        }
    }
    return jet;
}

namespace {

inline double falling(int e, int g) {
    double f = 1.0;
    for (int q = 0; q < g; ++q) f *= e - q;
    return f;
}

inline double binom(int n, int k) {
    static const double table[7][7] = {
        {1, 0, 0, 0, 0, 0, 0},  {1, 1, 0, 0, 0, 0, 0},  {1, 2, 1, 0, 0, 0, 0},
        {1, 3, 3, 1, 0, 0, 0},  {1, 4, 6, 4, 1, 0, 0},  {1, 5, 10, 10, 5, 1, 0},
        {1, 6, 15, 20, 15, 6, 1}};
    return table[n][k];
}

// m-th derivative of w(y) = delta y / (1 + delta y)
inline double weight_derivative(double delta, double y, int m) {
    const double g = 1.0 + delta * y;
    if (std::abs(g) < 1e-12)
        throw SingularStateError("weight derivative at 1 + delta y = 0");
    if (m == 0) return delta * y / g;
    double fact = 1.0;
    for (int q = 2; q <= m; ++q) fact *= q;
    const double sign = (m % 2 == 0) ? -1.0 : 1.0;
    return sign * fact * std::pow(delta, m) / std::pow(g, m + 1);
}

} // namespace

double v_partial(const Jet& u0, int i, int j, int l, const MultiIndex& beta) {
    const auto& x = u0.base();
    const MultiIndex inner = MultiIndex::of({i, j, l});

    // exponents of the monomial x_i x_j x_l (indices may repeat)
    int vars[3];
    int nvars = 0;
    for (int v : {i, j, l}) {
        bool seen = false;
        for (int q = 0; q < nvars; ++q) seen = seen || vars[q] == v;
        if (!seen) vars[nvars++] = v;
    }

    double total = 0.0;
    int gamma[3] = {0, 0, 0};
    // iterate gamma <= min(beta, e) componentwise over the monomial's support
    auto loop = [&](auto&& self, int pos) -> void {
        if (pos == nvars) {
            double coeff = 1.0;
            MultiIndex rem = beta;
            for (int q = 0; q < nvars; ++q) {
                const int v = vars[q];
                const int e = inner[v];
                const int g = gamma[q];
                coeff *= binom(beta[v], g) * falling(e, g) *
                         std::pow(x[static_cast<std::size_t>(v) - 1], e - g);
                rem.bump(v, -g);
            }
            total += coeff * u0.partial(rem.plus(inner));
            return;
        }
        const int v = vars[pos];
        const int top = std::min(beta[v], inner[v]);
        for (gamma[pos] = 0; gamma[pos] <= top; ++gamma[pos]) self(self, pos + 1);
    };
    loop(loop, 0);
    return total;
}

double vbar_partial(const Jet& u0, const TenorStructure& tenor, int i, int j, int l,
                    const MultiIndex& beta) {
    if (!(i < j && j < l))
        throw std::invalid_argument("vbar_partial: indices must satisfy i < j < l");
    const auto& x = u0.base();
    const double xi = x[static_cast<std::size_t>(i) - 1];
    const double xj = x[static_cast<std::size_t>(j) - 1];
    const double xl = x[static_cast<std::size_t>(l) - 1];
    const double dj = tenor.accrual(j);
    const double dl = tenor.accrual(l);

    const int bi = beta[i], bj = beta[j], bl = beta[l];
    double total = 0.0;
    for (int gi = 0; gi <= std::min(bi, 1); ++gi)
        for (int gj = 0; gj <= bj; ++gj)
            for (int gl = 0; gl <= bl; ++gl) {
                double coeff = binom(bi, gi) * binom(bj, gj) * binom(bl, gl);
                coeff *= (gi == 0) ? xi : 1.0;
                coeff *= weight_derivative(dj, xj, gj);
                coeff *= weight_derivative(dl, xl, gl);
                MultiIndex rem = beta;
                rem.bump(i, -gi);
                rem.bump(j, -gj);
                rem.bump(l, -gl);
                rem.bump(i);  // the du0/dx_i inside vbar
                total += coeff * u0.partial(rem);
            }
    return total;
}

namespace {

template <typename Eval>
Jet materialize_order3(const Jet& u0, Eval&& eval) {
    Jet out(u0.base(), 3);
    const int n = u0.nvars();
    // all multi-indices of total order <= 3 over variables 1..n
    out.set(MultiIndex{}, eval(MultiIndex{}));
    for (int a = 1; a <= n; ++a) {
        MultiIndex m1 = MultiIndex::of({a});
        out.set(m1, eval(m1));
        for (int b = a; b <= n; ++b) {
            MultiIndex m2 = MultiIndex::of({a, b});
            out.set(m2, eval(m2));
            for (int c = b; c <= n; ++c) {
                MultiIndex m3 = MultiIndex::of({a, b, c});
                out.set(m3, eval(m3));
            }
        }
    }
    return out;
}

} // namespace

Jet v_jet(const Jet& u0, int i, int j, int l) {
    return materialize_order3(u0, [&](const MultiIndex& beta) {
        return v_partial(u0, i, j, l, beta);
    });
}

Jet vbar_jet(const Jet& u0, const TenorStructure& tenor, int i, int j, int l) {
    return materialize_order3(u0, [&](const MultiIndex& beta) {
        return vbar_partial(u0, tenor, i, j, l, beta);
    });
}

} // namespace levylmm
