#pragma once

#include <vector>

namespace levylmm {

double norm_cdf(double x);
double norm_pdf(double x);

/// Undiscounted log-normal call kernel
///   P(V,S,K) = E[(S exp(-V/2 + sqrt(V) Z) - K)^+],  Z ~ N(0,1)
///            = S Phi(d1) - K Phi(d2),  d1 = (ln(S/K) + V/2)/sqrt(V).
/// V = 0 returns the intrinsic value.
double black_price(double V, double S, double K);

struct BlackKernel {
    double V;  ///< integrated variance
    double S;  ///< forward level
    double K;  ///< strike

    double price() const { return black_price(V, S, K); }
};

/// Spot derivatives d^m P / dS^m for m = 0..max_order (max_order <= 12).
/// Orders >= 2 follow the closed recurrence
///   d^m P/dS^m = phi(d1) u^{m-1} q_m(d1),  u = 1/(S sqrt(V)),
///   q_2 = 1,  q_{m+1}(y) = q_m'(y) - ((m-1) sqrt(V) + y) q_m(y).
std::vector<double> black_spot_derivatives(double V, double S, double K, int max_order);

} // namespace levylmm
