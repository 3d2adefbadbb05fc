#pragma once

#include <levylmm/errors.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <variant>
#include <vector>

namespace levylmm {

/// One loading vector in R^d (d = driving dimension).
using LoadingVec = std::vector<double>;

struct NoJumps {};

/// Two-sided tempered power-law jump density
///   C |z|^{-1-Y} exp(-lambda_plus z)   on z > 0
///   C |z|^{-1-Y} exp(-lambda_minus|z|) on z < 0
/// with C > 0, lambda_plus > 0, lambda_minus > 0, Y in (0,2).
struct CgmyJumps {
    double C;
    double lambda_plus;
    double lambda_minus;
    double Y;
};

/// Jump density given by samples (z_i, f_i), linearly interpolated between
/// samples and zero outside [z.front(), z.back()].  z must be strictly
/// increasing; samples at z = 0 are not allowed.
struct TabulatedJumps {
    std::vector<double> z;
    std::vector<double> density;
};

using JumpPart = std::variant<NoJumps, CgmyJumps, TabulatedJumps>;

/// Driving-noise description: diffusion matrix c (d x d, symmetric PSD) plus
/// a jump measure.  Immutable after construction; all accessors are safe for
/// concurrent use (moment memoization is internally synchronized).
class LevyMeasure {
public:
    LevyMeasure(int dim, std::vector<double> c_matrix, JumpPart jumps);

    /// d = 1 convenience factories.
    static LevyMeasure diffusion_only(double c);
    static LevyMeasure cgmy(double C, double lambda_plus, double lambda_minus,
                            double Y, double c = 0.0);
    static LevyMeasure tabulated(std::vector<double> z, std::vector<double> density,
                                 double c = 0.0);

    int dim() const { return dim_; }
    double diffusion(int i, int j) const { return c_[static_cast<std::size_t>(i) * dim_ + j]; }
    bool has_jumps() const { return !std::holds_alternative<NoJumps>(jumps_); }
    const JumpPart& jumps() const { return jumps_; }

    /// Raw jump moment m_k = ∫ z^k F(dz), k >= 2.  Closed form for the
    /// tempered power-law density, per-segment quadrature for tabulated
    /// densities, 0 without jumps.  Memoized per k.
    double raw_moment(int k) const;

    /// ∫ ∏_p <lambda^p, z> F(dz) for k = loadings.size() vectors.  In d = 1
    /// this is (∏_p lambda^p) m_k; symmetric and multilinear in the loadings.
    double contracted_moment(std::span<const LoadingVec> loadings) const;

    /// Effective covariance of the driving noise seen through loading rows:
    ///   Sigma_ij = <lambda^i, c lambda^j> + ∫ <lambda^i,z><lambda^j,z> F(dz).
    /// Returns a symmetric PSD n x n matrix (row-major).
    std::vector<double> covariance(std::span<const LoadingVec> rows) const;

    /// Scalar Sigma entry for two loading vectors.
    double covariance_entry(const LoadingVec& a, const LoadingVec& b) const;

    // --- jump-tail functionals (d = 1), used by the simulator -------------
    double tail_mass(double eps) const;    ///< F({|z| > eps})
    double tail_mean(double eps) const;    ///< ∫_{|z|>eps} z F(dz)
    double tail_second(double eps) const;  ///< ∫_{|z|>eps} z^2 F(dz)
    /// sigma_eps^2 = ∫_{|z|<=eps} z^2 F(dz) = m_2 - tail_second(eps).
    double small_jump_variance(double eps) const;

    /// Jump density at a point (d = 1); 0 without jumps.
    double jump_density(double z) const;

private:
    double raw_moment_uncached(int k) const;

    int dim_;
    std::vector<double> c_;
    JumpPart jumps_;

    struct MomentCache {
        std::mutex mutex;
        std::map<int, double> values;
    };
    std::shared_ptr<MomentCache> cache_;
};

/// The measure of the rescaled driving process X^alpha_t = alpha X_{t/alpha^2}:
/// F_alpha(A) = alpha^{-2} F({z : alpha z in A}), diffusion part unchanged.
/// Satisfies m_k(F_alpha) = alpha^{k-2} m_k(F) for all k >= 2.
struct ScaledMeasure {
    LevyMeasure base;
    double alpha;
    LevyMeasure measure;
};

ScaledMeasure scale(const LevyMeasure& base, double alpha);

} // namespace levylmm
