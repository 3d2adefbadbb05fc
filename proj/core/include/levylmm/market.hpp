#pragma once

#include <levylmm/levy.hpp>

#include <span>
#include <vector>

namespace levylmm {

/// Discrete tenor structure T_0 < T_1 < ... < T_n with accruals
/// delta_k = T_k - T_{k-1}.  Rate indices k run over 1..n, date indices 0..n.
class TenorStructure {
public:
    explicit TenorStructure(std::vector<double> dates);

    int n() const { return static_cast<int>(dates_.size()) - 1; }
    double date(int i) const { return dates_[static_cast<std::size_t>(i)]; }
    double accrual(int k) const { return dates_[static_cast<std::size_t>(k)] - dates_[static_cast<std::size_t>(k) - 1]; }
    const std::vector<double>& dates() const { return dates_; }

private:
    std::vector<double> dates_;
};

/// Initial forward Libor curve plus the discount for the first tenor date.
struct InitialCurve {
    std::vector<double> libors;  ///< L_0^k for k = 1..n (libors[k-1])
    double b0_first;             ///< B_0(T_0)
};

/// B_0(T_0..T_n) via B_0(T_k) = B_0(T_{k-1}) / (1 + delta_k L_0^k).
std::vector<double> bonds_from_libors(const InitialCurve& curve, const TenorStructure& tenor);

/// Piecewise-constant volatility loadings lambda^k(t) in R^d with breakpoints
/// at tenor dates and the structural cutoff lambda^k(t) = 0 for t >= T_{k-1}.
/// Time intervals are [0,T_0), [T_0,T_1), ..., [T_{n-1},T_n)  (the leading
/// interval is dropped when T_0 = 0).
class VolatilitySpec {
public:
    VolatilitySpec(const TenorStructure& tenor, std::vector<std::vector<LoadingVec>> pieces);

    /// Loadings constant in time until each rate's cutoff.
    static VolatilitySpec constant(const TenorStructure& tenor, std::vector<LoadingVec> lambda);

    int dim() const { return dim_; }
    int intervals() const { return static_cast<int>(edges_.size()) - 1; }
    double edge(int i) const { return edges_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& edges() const { return edges_; }

    /// Interval index containing t (right-continuous; last interval absorbs T_n).
    int interval_of(double t) const;

    const LoadingVec& loading(int k, int interval) const {
        return pieces_[static_cast<std::size_t>(k) - 1][static_cast<std::size_t>(interval)];
    }
    LoadingVec at(int k, double t) const { return loading(k, interval_of(t)); }

private:
    int dim_;
    std::vector<double> edges_;
    std::vector<std::vector<LoadingVec>> pieces_;  // [rate-1][interval]
};

/// Tenor structure + initial curve + loadings + driving measure, with the
/// drift of the Libor vector under the terminal measure and all piecewise
/// time integrals of moment functionals.  Immutable; all methods pure.
class MarketModel {
public:
    MarketModel(TenorStructure tenor, InitialCurve curve, VolatilitySpec vols,
                LevyMeasure measure);

    const TenorStructure& tenor() const { return tenor_; }
    const InitialCurve& curve() const { return curve_; }
    const VolatilitySpec& vols() const { return vols_; }
    const LevyMeasure& measure() const { return measure_; }
    int n() const { return tenor_.n(); }

    const std::vector<double>& bonds() const { return bonds_; }
    double terminal_bond() const { return bonds_.back(); }
    std::vector<double> initial_state() const { return curve_.libors; }

    /// MarketModel with the same market data but a different driving measure
    /// (used for the rescaled-model benchmark).
    MarketModel with_measure(LevyMeasure measure) const;

    /// Sigma_ij(t) on a loading interval (i, j are rate indices 1..n).
    double sigma_on_interval(int i, int j, int interval) const {
        return sigma_[static_cast<std::size_t>(interval) * n() * n() +
                      static_cast<std::size_t>(i - 1) * n() + (j - 1)];
    }

    /// M^k_t(lambda^{i_1},...,lambda^{i_k}) for t inside an interval.
    double contracted_on_interval(std::span<const int> indices, int interval) const;

    double integrated_covariance(int i, int j, double t0, double t1) const;

    /// ∫_{t0}^{t1} M^k_s(lambda^{i_1},...,lambda^{i_k}) ds, exact on the
    /// piecewise-constant mesh.
    double integrated_moment(std::span<const int> indices, double t0, double t1) const;

    /// ∫_{t0}^{t1} M^3_s(A) [ ∫_s^{t1} M^3_v(B) dv ] ds, exact per mesh cell
    /// (the inner integral is affine in s on each interval).
    double double_integrated_moment(std::span<const int> a, std::span<const int> b,
                                    double t0, double t1) const;

    /// Drift expansion layer: drift_layer(0,k) = -sum_{j>k} Sigma_kj(t) w_j and
    /// drift_layer(p,k) = -sum_{k<j_0<...<j_p} M^{p+2}(lambda^k, lambda^{j_0..j_p})
    /// prod_l w_{j_l}, with w_j = delta_j x_j / (1 + delta_j x_j).  Returns 0
    /// for p > n-k-1 and for k = n.
    double drift_layer(int p, int k, double t, std::span<const double> x) const;

    /// b_alpha^k(t,x) = sum_p alpha^p drift_layer(p,k,t,x).  At alpha = 1 this
    /// is the exact terminal-measure drift (the product expansion is finite).
    double drift(int k, double t, std::span<const double> x, double alpha) const;

    /// All drifts b^1..b^n at once; O(n^2) via suffix elementary-symmetric
    /// recursion.  out must have size n.
    void drift_all(double t, std::span<const double> x, double alpha,
                   std::span<double> out) const;

    /// Largest supported number of rates (stack buffers in the drift fast path).
    static constexpr int kMaxRates = 64;

private:
    double scalar_loading(int k, int interval) const {
        return lam_[static_cast<std::size_t>(interval) * n() + (k - 1)];
    }
    double cached_moment(int k) const { return raw_moments_[static_cast<std::size_t>(k)]; }
    std::vector<double> weights(std::span<const double> x) const;

    TenorStructure tenor_;
    InitialCurve curve_;
    VolatilitySpec vols_;
    LevyMeasure measure_;
    std::vector<double> bonds_;
    std::vector<double> sigma_;        // [interval][i][j]
    std::vector<double> lam_;          // [interval][k], d=1 jump loadings (0 when dead)
    std::vector<double> raw_moments_;  // m_k for k = 2..n+1, index by k
};

} // namespace levylmm
