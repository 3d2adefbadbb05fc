#pragma once

#include <levylmm/market.hpp>
#include <levylmm/rng.hpp>

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace levylmm {

/// Jump-adapted Euler benchmark settings.  epsilon is the small-jump
/// truncation level: jumps below it are replaced by a Brownian motion with
/// matched variance, jumps above it are simulated exactly.
struct SimConfig {
    std::int64_t paths = 100000;
    double epsilon = 0.0;      ///< 0 = per-measure default (see default_epsilon)
    std::uint64_t seed = 1;
    double dt = 0.05;          ///< deterministic mesh step (years)
    int threads = 0;           ///< 0 = hardware concurrency
};

/// Dyadic truncation level z_top 2^-m for the measure: refined until the
/// substituted small-jump variance is negligible (sigma_eps^2 <= 1e-3 m_2)
/// or the exact-jump intensity reaches ~100/year, whichever comes first.
double default_epsilon(const LevyMeasure& measure, double z_top = 1.0);

/// Compound-Poisson representation of the jumps with |z| > epsilon, cut into
/// dyadic magnitude bands anchored at z_top.  Each band owns a per-path RNG
/// stream keyed by its absolute lower edge, so refining epsilon adds bands
/// without disturbing the jumps already simulated at coarser levels.
class JumpGenerator {
public:
    JumpGenerator(const LevyMeasure& measure, double epsilon, double z_top = 1.0);

    struct Band {
        double lo, hi;              ///< magnitude range (hi = inf for the top band)
        double intensity_pos, intensity_neg;
        std::uint64_t stream_key;
    };

    double intensity() const { return total_intensity_; }        ///< F(|z| > eps)
    double compensator_mean() const { return gamma_; }           ///< ∫_{|z|>eps} z F
    double small_jump_sigma2() const { return sigma2_; }         ///< ∫_{|z|<=eps} z^2 F
    double epsilon() const { return epsilon_; }
    const std::vector<Band>& bands() const { return bands_; }

    /// One jump mark from the band, tempered-power-law rejection sampling.
    double sample_mark(const Band& band, Xoshiro256& rng) const;

    /// Draw a mark from the whole truncated measure (side and band by mass).
    double sample(Xoshiro256& rng) const;

private:
    const CgmyJumps cgmy_;
    double epsilon_;
    double total_intensity_ = 0.0, gamma_ = 0.0, sigma2_ = 0.0;
    std::vector<Band> bands_;
};

/// Estimate with a symmetric normal confidence interval.
struct McResult {
    double estimate = 0.0;
    double std_error = 0.0;
    std::int64_t paths_used = 0;
    std::int64_t paths_rejected = 0;   ///< exploded or singular, excluded
    double negative_rate_fraction = 0; ///< fraction of used paths that saw L < 0
    double ci_low(double z = 1.96) const { return estimate - z * std_error; }
    double ci_high(double z = 1.96) const { return estimate + z * std_error; }
};

/// Per-path hook: observation states are row-major [obs_date][rate-1].
/// Return the path's payoff sample (undiscounted), or NaN to reject the path.
using PathPayoff = std::function<double(std::span<const double> states)>;

/// Simulate the Libor vector under the terminal measure with the jump-adapted
/// Euler scheme and reduce per-path payoffs.  Deterministic for fixed
/// (seed, config) regardless of thread count.
McResult simulate_terminal_measure(const MarketModel& market, const SimConfig& config,
                                   double horizon, std::span<const double> obs_dates,
                                   const PathPayoff& payoff);

/// Small path ensembles for diagnostics: returns [path][obs][rate].
std::vector<std::vector<std::vector<double>>>
sample_paths(const MarketModel& market, const SimConfig& config, double horizon,
             std::span<const double> obs_dates);

/// Discounted caplet benchmark: B_0(T_n) delta_k E[ prod_{j>k}(1+delta_j L^j)
/// (L^k - K)^+ ] at the reset date T_{k-1}.
McResult mc_caplet_price(const MarketModel& market, int k, double strike,
                         const SimConfig& config);

/// Caplet prices for several strikes from one simulation (shared paths).
std::vector<McResult> mc_caplet_prices(const MarketModel& market, int k,
                                       std::span<const double> strikes,
                                       const SimConfig& config);

/// Discounted payer-swaption benchmark at expiry T_0 (annuity reconstructed
/// from the simulated Libors by telescoping).
McResult mc_swaption_price(const MarketModel& market, double strike,
                           const SimConfig& config);

} // namespace levylmm
