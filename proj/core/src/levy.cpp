#include <levylmm/levy.hpp>
#include <levylmm/quadrature.hpp>

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace levylmm {

namespace {

bool ldlt_psd(const std::vector<double>& a, int n, double tol) {
    // In-place LDL^T pivots; PSD iff all pivots >= -tol.
    std::vector<double> m = a;
    for (int j = 0; j < n; ++j) {
        double d = m[static_cast<std::size_t>(j) * n + j];
        if (d < -tol) return false;
        if (std::abs(d) < tol) continue;
        for (int i = j + 1; i < n; ++i) {
            double lij = m[static_cast<std::size_t>(i) * n + j] / d;
            for (int k = j; k < n; ++k)
                m[static_cast<std::size_t>(i) * n + k] -= lij * m[static_cast<std::size_t>(j) * n + k];
        }
    }
    return true;
}

// ∫ z^k g(z) dz on [a,b] for the linear interpolant of (z_i, f_i); exact
// (15-point Gauss is exact for polynomials up to degree 29).
double segment_moment(double za, double fa, double zb, double fb, int k,
                      double lo, double hi) {
    if (hi <= lo) return 0.0;
    const double slope = (fb - fa) / (zb - za);
    auto f = [&](double z) {
        return std::pow(z, k) * (fa + slope * (z - za));
    };
    return boost::math::quadrature::gauss<double, 15>::integrate(f, lo, hi);
}

double tabulated_integral(const TabulatedJumps& tab, int k, double excl_lo,
                          double excl_hi) {
    // ∫ z^k f(z) dz over support minus the open interval (excl_lo, excl_hi).
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < tab.z.size(); ++i) {
        double za = tab.z[i], zb = tab.z[i + 1];
        double fa = tab.density[i], fb = tab.density[i + 1];
        // clip the excluded window out of [za, zb]
        if (excl_hi > excl_lo) {
            if (za < excl_lo)
                total += segment_moment(za, fa, zb, fb, k, za, std::min(zb, excl_lo));
            if (zb > excl_hi)
                total += segment_moment(za, fa, zb, fb, k, std::max(za, excl_hi), zb);
        } else {
            total += segment_moment(za, fa, zb, fb, k, za, zb);
        }
    }
    return total;
}

} // namespace

LevyMeasure::LevyMeasure(int dim, std::vector<double> c_matrix, JumpPart jumps)
    : dim_(dim), c_(std::move(c_matrix)), jumps_(std::move(jumps)),
      cache_(std::make_shared<MomentCache>()) {
    if (dim_ < 1 || c_.size() != static_cast<std::size_t>(dim_) * dim_)
        throw std::invalid_argument("LevyMeasure: c must be dim x dim");
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < i; ++j)
            if (std::abs(diffusion(i, j) - diffusion(j, i)) > 1e-14)
                throw std::invalid_argument("LevyMeasure: c must be symmetric");
    if (!ldlt_psd(c_, dim_, 1e-12))
        throw std::invalid_argument("LevyMeasure: c must be positive semidefinite");

    if (const auto* g = std::get_if<CgmyJumps>(&jumps_)) {
        if (!(g->C > 0) || !(g->lambda_plus > 0) || !(g->lambda_minus > 0))
            throw std::invalid_argument("LevyMeasure: CGMY parameters must be positive");
        if (!(g->Y > 0.0) || !(g->Y < 2.0))
            throw std::invalid_argument("LevyMeasure: CGMY activity Y must lie in (0,2)");
    } else if (const auto* t = std::get_if<TabulatedJumps>(&jumps_)) {
        if (dim_ != 1)
            throw std::invalid_argument("LevyMeasure: tabulated jumps require d = 1");
        if (t->z.size() < 2 || t->z.size() != t->density.size())
            throw std::invalid_argument("LevyMeasure: tabulated jumps need >= 2 samples");
        for (std::size_t i = 0; i < t->z.size(); ++i) {
            if (!std::isfinite(t->z[i]) || !std::isfinite(t->density[i]) || t->density[i] < 0)
                throw std::invalid_argument("LevyMeasure: tabulated density must be finite and >= 0");
            if (i > 0 && t->z[i] <= t->z[i - 1])
                throw std::invalid_argument("LevyMeasure: tabulated abscissae must increase");
            if (t->z[i] == 0.0)
                throw std::invalid_argument("LevyMeasure: tabulated sample at z = 0 not allowed");
        }
        // ∫_{|z|>1} |z| F(dz) must be finite; numeric check of the invariant.
        double heavy = tabulated_integral(*t, 1, -1.0, 1.0);
        if (!std::isfinite(heavy))
            throw DivergentMomentError("tabulated jump measure: ∫_{|z|>1}|z|F diverges");
    }
}

LevyMeasure LevyMeasure::diffusion_only(double c) {
    return LevyMeasure(1, {c}, NoJumps{});
}

LevyMeasure LevyMeasure::cgmy(double C, double lambda_plus, double lambda_minus,
                              double Y, double c) {
    return LevyMeasure(1, {c}, CgmyJumps{C, lambda_plus, lambda_minus, Y});
}

LevyMeasure LevyMeasure::tabulated(std::vector<double> z, std::vector<double> density,
                                   double c) {
    return LevyMeasure(1, {c}, TabulatedJumps{std::move(z), std::move(density)});
}

double LevyMeasure::raw_moment_uncached(int k) const {
    if (k < 2)
        throw std::invalid_argument("raw_moment: k must be >= 2");
    if (std::holds_alternative<NoJumps>(jumps_))
        return 0.0;
    if (const auto* g = std::get_if<CgmyJumps>(&jumps_)) {
        if (!(k > g->Y)) {
            std::ostringstream os;
            os << "raw_moment: moment k=" << k << " diverges for activity Y=" << g->Y;
            throw DivergentMomentError(os.str());
        }
        // ∫_0^∞ z^{k-1-Y} e^{-l z} dz = Γ(k-Y) l^{Y-k} on each side.
        const double gam = std::tgamma(k - g->Y);
        const double pos = std::pow(g->lambda_plus, g->Y - k);
        const double neg = std::pow(g->lambda_minus, g->Y - k);
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        return g->C * gam * (pos + sign * neg);
    }
    const auto& tab = std::get<TabulatedJumps>(jumps_);
    return tabulated_integral(tab, k, 0.0, 0.0);
}

double LevyMeasure::raw_moment(int k) const {
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        auto it = cache_->values.find(k);
        if (it != cache_->values.end()) return it->second;
    }
    double v = raw_moment_uncached(k);
    std::lock_guard<std::mutex> lock(cache_->mutex);
    cache_->values.emplace(k, v);  // idempotent on races
    return v;
}

double LevyMeasure::contracted_moment(std::span<const LoadingVec> loadings) const {
    if (!has_jumps()) return 0.0;
    if (dim_ != 1)
        throw DomainError("contracted_moment: jump contraction implemented for d = 1");
    double prod = 1.0;
    for (const auto& l : loadings) {
        if (l.size() != 1)
            throw std::invalid_argument("contracted_moment: loading dimension mismatch");
        prod *= l[0];
    }
    if (prod == 0.0) return 0.0;
    return prod * raw_moment(static_cast<int>(loadings.size()));
}

double LevyMeasure::covariance_entry(const LoadingVec& a, const LoadingVec& b) const {
    if (a.size() != static_cast<std::size_t>(dim_) || b.size() != static_cast<std::size_t>(dim_))
        throw std::invalid_argument("covariance: loading dimension mismatch");
    double diff = 0.0;
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j)
            diff += a[i] * diffusion(i, j) * b[j];
    double jump = 0.0;
    if (has_jumps()) {
        if (dim_ != 1)
            throw DomainError("covariance: jump part implemented for d = 1");
        jump = a[0] * b[0] * raw_moment(2);
    }
    return diff + jump;
}

std::vector<double> LevyMeasure::covariance(std::span<const LoadingVec> rows) const {
    const std::size_t n = rows.size();
    std::vector<double> sigma(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double v = covariance_entry(rows[i], rows[j]);
            sigma[i * n + j] = v;
            sigma[j * n + i] = v;
        }
    return sigma;
}

double LevyMeasure::jump_density(double z) const {
    if (std::holds_alternative<NoJumps>(jumps_) || z == 0.0) return 0.0;
    if (const auto* g = std::get_if<CgmyJumps>(&jumps_)) {
        const double az = std::abs(z);
        const double temper = z > 0 ? g->lambda_plus : g->lambda_minus;
        return g->C * std::exp(-temper * az) / std::pow(az, 1.0 + g->Y);
    }
    const auto& tab = std::get<TabulatedJumps>(jumps_);
    if (z <= tab.z.front() || z >= tab.z.back()) return 0.0;
    auto it = std::upper_bound(tab.z.begin(), tab.z.end(), z);
    std::size_t i = static_cast<std::size_t>(it - tab.z.begin()) - 1;
    double w = (z - tab.z[i]) / (tab.z[i + 1] - tab.z[i]);
    return tab.density[i] * (1.0 - w) + tab.density[i + 1] * w;
}

namespace {

// ∫_{|z|>eps} z^k F(dz) for k = 0,1,2.  tanh-sinh handles the near-origin
// part (eps can sit many decades below the tempering scale), Gauss-Kronrod
// the smooth tail.
double cgmy_tail(const CgmyJumps& g, double eps, int k) {
    auto one_side = [&](double temper) {
        auto f = [&](double z) { return g.C * std::pow(z, k - 1.0 - g.Y) * std::exp(-temper * z); };
        return quad::half_line(f, eps);
    };
    const double pos = one_side(g.lambda_plus);
    const double neg = one_side(g.lambda_minus);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return pos + sign * neg;
}

} // namespace

double LevyMeasure::tail_mass(double eps) const {
    if (!(eps > 0)) throw std::invalid_argument("tail_mass: eps must be > 0");
    if (!has_jumps()) return 0.0;
    if (const auto* g = std::get_if<CgmyJumps>(&jumps_)) return cgmy_tail(*g, eps, 0);
    return tabulated_integral(std::get<TabulatedJumps>(jumps_), 0, -eps, eps);
}

double LevyMeasure::tail_mean(double eps) const {
    if (!(eps > 0)) throw std::invalid_argument("tail_mean: eps must be > 0");
    if (!has_jumps()) return 0.0;
    if (const auto* g = std::get_if<CgmyJumps>(&jumps_)) return cgmy_tail(*g, eps, 1);
    return tabulated_integral(std::get<TabulatedJumps>(jumps_), 1, -eps, eps);
}

double LevyMeasure::tail_second(double eps) const {
    if (!(eps > 0)) throw std::invalid_argument("tail_second: eps must be > 0");
    if (!has_jumps()) return 0.0;
    if (const auto* g = std::get_if<CgmyJumps>(&jumps_)) return cgmy_tail(*g, eps, 2);
    return tabulated_integral(std::get<TabulatedJumps>(jumps_), 2, -eps, eps);
}

double LevyMeasure::small_jump_variance(double eps) const {
    if (!has_jumps()) return 0.0;
    return std::max(0.0, raw_moment(2) - tail_second(eps));
}

ScaledMeasure scale(const LevyMeasure& base, double alpha) {
    if (!(alpha > 0.0) || !(alpha <= 1.0))
        throw std::invalid_argument("scale: alpha must lie in (0,1]");
    if (alpha == 1.0) return ScaledMeasure{base, alpha, base};

    std::vector<double> c(static_cast<std::size_t>(base.dim()) * base.dim());
    for (int i = 0; i < base.dim(); ++i)
        for (int j = 0; j < base.dim(); ++j)
            c[static_cast<std::size_t>(i) * base.dim() + j] = base.diffusion(i, j);

    JumpPart scaled_jumps;
    if (const auto* g = std::get_if<CgmyJumps>(&base.jumps())) {
        // f_alpha(z) = alpha^{-3} f(z/alpha): tempered power law is closed
        // under the rescaling with C -> C alpha^{Y-2}, lambda -> lambda/alpha.
        scaled_jumps = CgmyJumps{g->C * std::pow(alpha, g->Y - 2.0),
                                 g->lambda_plus / alpha, g->lambda_minus / alpha, g->Y};
    } else if (const auto* t = std::get_if<TabulatedJumps>(&base.jumps())) {
        TabulatedJumps s;
        s.z.reserve(t->z.size());
        s.density.reserve(t->z.size());
        const double a3 = alpha * alpha * alpha;
        for (std::size_t i = 0; i < t->z.size(); ++i) {
            s.z.push_back(alpha * t->z[i]);
            s.density.push_back(t->density[i] / a3);
        }
        scaled_jumps = std::move(s);
    } else {
        scaled_jumps = NoJumps{};
    }
    return ScaledMeasure{base, alpha, LevyMeasure(base.dim(), std::move(c), std::move(scaled_jumps))};
}

} // namespace levylmm
