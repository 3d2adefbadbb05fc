#include <levylmm/black.hpp>
#include <levylmm/errors.hpp>

#include <cmath>
#include <stdexcept>

namespace levylmm {

double norm_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double norm_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double black_price(double V, double S, double K) {
    if (V < 0.0)
        throw DomainError("black_price: negative variance");
    if (!(S > 0.0) || K < 0.0)
        throw DomainError("black_price: bad forward/strike");
    if (K == 0.0)
        return S;  // sure exercise
    if (V == 0.0)
        return std::max(S - K, 0.0);
    const double sv = std::sqrt(V);
    const double d1 = (std::log(S / K) + 0.5 * V) / sv;
    return S * norm_cdf(d1) - K * norm_cdf(d1 - sv);
}

std::vector<double> black_spot_derivatives(double V, double S, double K, int max_order) {
    if (max_order < 0 || max_order > 12)
        throw std::invalid_argument("black_spot_derivatives: order out of range");
    if (V < 0.0)
        throw DomainError("black_spot_derivatives: negative variance");
    std::vector<double> g(static_cast<std::size_t>(max_order) + 1, 0.0);
    if (K == 0.0) {
        g[0] = S;
        if (max_order >= 1) g[1] = 1.0;
        return g;
    }
    if (V < 1e-14) {
        if (max_order >= 2)
            throw DegenerateVarianceError("black_spot_derivatives: variance too small for curvature");
        g[0] = black_price(0.0, S, K);
        if (max_order >= 1) g[1] = (S > K) ? 1.0 : (S < K ? 0.0 : 0.5);
        return g;
    }
    const double sv = std::sqrt(V);
    const double d1 = (std::log(S / K) + 0.5 * V) / sv;
    const double u = 1.0 / (S * sv);
    const double pdf = norm_pdf(d1);

    g[0] = S * norm_cdf(d1) - K * norm_cdf(d1 - sv);
    if (max_order >= 1) g[1] = norm_cdf(d1);

    // q_m(d1) polynomials, m >= 2
    std::vector<double> q{1.0};  // q_2
    double upow = u;
    for (int m = 2; m <= max_order; ++m) {
        double qval = 0.0;
        for (std::size_t i = q.size(); i-- > 0;) qval = qval * d1 + q[i];
        g[static_cast<std::size_t>(m)] = pdf * upow * qval;
        upow *= u;
        // q_{m+1} = q_m' - ((m-1) sv + d1) q_m
        std::vector<double> next(q.size() + 1, 0.0);
        for (std::size_t i = 1; i < q.size(); ++i)
            next[i - 1] += static_cast<double>(i) * q[i];
        const double c = (m - 1) * sv;
        for (std::size_t i = 0; i < q.size(); ++i) {
            next[i] -= c * q[i];
            next[i + 1] -= q[i];
        }
        q = std::move(next);
    }
    return g;
}

} // namespace levylmm
