#include <levylmm/market.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace levylmm {

TenorStructure::TenorStructure(std::vector<double> dates) : dates_(std::move(dates)) {
    if (dates_.size() < 2)
        throw std::invalid_argument("TenorStructure: need at least T_0 and T_1");
    if (dates_.front() < 0.0)
        throw std::invalid_argument("TenorStructure: T_0 must be >= 0");
    for (std::size_t i = 1; i < dates_.size(); ++i)
        if (!(dates_[i] > dates_[i - 1]))
            throw std::invalid_argument("TenorStructure: dates must strictly increase");
}

std::vector<double> bonds_from_libors(const InitialCurve& curve, const TenorStructure& tenor) {
    const int n = tenor.n();
    if (curve.libors.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("bonds_from_libors: curve size mismatch");
    if (!(curve.b0_first > 0))
        throw std::invalid_argument("bonds_from_libors: B_0(T_0) must be positive");
    std::vector<double> bonds(static_cast<std::size_t>(n) + 1);
    bonds[0] = curve.b0_first;
    for (int k = 1; k <= n; ++k) {
        const double growth = 1.0 + tenor.accrual(k) * curve.libors[static_cast<std::size_t>(k) - 1];
        if (!(growth > 0))
            throw std::invalid_argument("bonds_from_libors: 1 + delta L must be positive");
        bonds[static_cast<std::size_t>(k)] = bonds[static_cast<std::size_t>(k) - 1] / growth;
    }
    return bonds;
}

VolatilitySpec::VolatilitySpec(const TenorStructure& tenor,
                               std::vector<std::vector<LoadingVec>> pieces)
    : pieces_(std::move(pieces)) {
    const int n = tenor.n();
    if (pieces_.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("VolatilitySpec: one loading row per rate expected");

    edges_.clear();
    if (tenor.date(0) > 0.0) edges_.push_back(0.0);
    for (int i = 0; i <= n; ++i) edges_.push_back(tenor.date(i));
    const int m = intervals();

    dim_ = 0;
    for (auto& row : pieces_) {
        if (row.size() != static_cast<std::size_t>(m))
            throw std::invalid_argument("VolatilitySpec: one loading per time interval expected");
        for (auto& l : row) {
            if (dim_ == 0) dim_ = static_cast<int>(l.size());
            if (l.empty() || static_cast<int>(l.size()) != dim_)
                throw std::invalid_argument("VolatilitySpec: inconsistent loading dimension");
            for (double v : l)
                if (!std::isfinite(v))
                    throw std::invalid_argument("VolatilitySpec: loadings must be finite");
        }
    }
    // structural cutoff: lambda^k vanishes from T_{k-1} on
    for (int k = 1; k <= n; ++k)
        for (int i = 0; i < m; ++i)
            if (edges_[static_cast<std::size_t>(i)] >= tenor.date(k - 1))
                pieces_[static_cast<std::size_t>(k) - 1][static_cast<std::size_t>(i)]
                    .assign(static_cast<std::size_t>(dim_), 0.0);
}

VolatilitySpec VolatilitySpec::constant(const TenorStructure& tenor,
                                        std::vector<LoadingVec> lambda) {
    const int n = tenor.n();
    if (lambda.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("VolatilitySpec: one loading per rate expected");
    const int m = (tenor.date(0) > 0.0 ? n + 1 : n);
    std::vector<std::vector<LoadingVec>> pieces(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        pieces[static_cast<std::size_t>(k)].assign(static_cast<std::size_t>(m),
                                                   lambda[static_cast<std::size_t>(k)]);
    return VolatilitySpec(tenor, std::move(pieces));
}

int VolatilitySpec::interval_of(double t) const {
    if (t < 0.0)
        throw std::invalid_argument("VolatilitySpec: negative time");
    auto it = std::upper_bound(edges_.begin(), edges_.end(), t);
    int idx = static_cast<int>(it - edges_.begin()) - 1;
    return std::min(idx, intervals() - 1);
}

MarketModel::MarketModel(TenorStructure tenor, InitialCurve curve, VolatilitySpec vols,
                         LevyMeasure measure)
    : tenor_(std::move(tenor)), curve_(std::move(curve)), vols_(std::move(vols)),
      measure_(std::move(measure)) {
    if (vols_.dim() != measure_.dim())
        throw std::invalid_argument("MarketModel: loading/measure dimension mismatch");
    if (measure_.has_jumps() && measure_.dim() != 1)
        throw std::invalid_argument("MarketModel: jump-driven models require d = 1");
    bonds_ = bonds_from_libors(curve_, tenor_);

    const int n = tenor_.n();
    if (n > kMaxRates)
        throw std::invalid_argument("MarketModel: too many rates");
    const int m = vols_.intervals();
    raw_moments_.assign(static_cast<std::size_t>(n) + 2, 0.0);
    if (measure_.has_jumps())
        for (int k = 2; k <= n + 1; ++k)
            raw_moments_[static_cast<std::size_t>(k)] = measure_.raw_moment(k);
    sigma_.assign(static_cast<std::size_t>(m) * n * n, 0.0);
    lam_.assign(static_cast<std::size_t>(m) * n, 0.0);
    for (int iv = 0; iv < m; ++iv) {
        for (int i = 1; i <= n; ++i) {
            if (measure_.dim() == 1)
                lam_[static_cast<std::size_t>(iv) * n + (i - 1)] = vols_.loading(i, iv)[0];
            for (int j = i; j <= n; ++j) {
                double v = measure_.covariance_entry(vols_.loading(i, iv), vols_.loading(j, iv));
                sigma_[static_cast<std::size_t>(iv) * n * n + static_cast<std::size_t>(i - 1) * n + (j - 1)] = v;
                sigma_[static_cast<std::size_t>(iv) * n * n + static_cast<std::size_t>(j - 1) * n + (i - 1)] = v;
            }
        }
    }
}

MarketModel MarketModel::with_measure(LevyMeasure measure) const {
    return MarketModel(tenor_, curve_, vols_, std::move(measure));
}

double MarketModel::contracted_on_interval(std::span<const int> indices, int interval) const {
    if (!measure_.has_jumps()) return 0.0;
    double prod = 1.0;
    for (int idx : indices) {
        prod *= scalar_loading(idx, interval);
        if (prod == 0.0) return 0.0;
    }
    const int k = static_cast<int>(indices.size());
    return prod * (k < static_cast<int>(raw_moments_.size()) ? cached_moment(k)
                                                             : measure_.raw_moment(k));
}

namespace {

// Walk the loading intervals clipped to [t0, t1].
template <typename Fn>
void walk_mesh(const VolatilitySpec& vols, double t0, double t1, Fn&& fn) {
    if (t1 <= t0) return;
    int iv = vols.interval_of(t0);
    double start = t0;
    while (start < t1) {
        double end = (iv + 1 < vols.intervals()) ? std::min(vols.edge(iv + 1), t1) : t1;
        if (end > start) fn(iv, start, end);
        start = end;
        ++iv;
        if (iv >= vols.intervals() && start < t1) {
            // past the last breakpoint the loadings are all cut off; nothing accrues
            break;
        }
    }
}

} // namespace

double MarketModel::integrated_covariance(int i, int j, double t0, double t1) const {
    if (t1 < t0) throw std::invalid_argument("integrated_covariance: t1 < t0");
    double acc = 0.0;
    walk_mesh(vols_, t0, t1, [&](int iv, double a, double b) {
        acc += (b - a) * sigma_on_interval(i, j, iv);
    });
    return acc;
}

double MarketModel::integrated_moment(std::span<const int> indices, double t0, double t1) const {
    if (t1 < t0) throw std::invalid_argument("integrated_moment: t1 < t0");
    if (!measure_.has_jumps()) return 0.0;
    double acc = 0.0;
    walk_mesh(vols_, t0, t1, [&](int iv, double a, double b) {
        acc += (b - a) * contracted_on_interval(indices, iv);
    });
    return acc;
}

double MarketModel::double_integrated_moment(std::span<const int> a, std::span<const int> b,
                                             double t0, double t1) const {
    if (t1 < t0) throw std::invalid_argument("double_integrated_moment: t1 < t0");
    if (!measure_.has_jumps()) return 0.0;
    // collect clipped cells, then accumulate the suffix of B from the right:
    // on a cell [u,v]:  ∫_u^v cA (IB_v + cB (v - s)) ds = cA (IB_v len + cB len^2/2)
    struct Cell { int iv; double lo, hi; };
    std::vector<Cell> cells;
    walk_mesh(vols_, t0, t1, [&](int iv, double lo, double hi) {
        cells.push_back({iv, lo, hi});
    });
    double acc = 0.0, suffix_b = 0.0;
    for (auto it = cells.rbegin(); it != cells.rend(); ++it) {
        const double len = it->hi - it->lo;
        const double ca = contracted_on_interval(a, it->iv);
        const double cb = contracted_on_interval(b, it->iv);
        acc += ca * (suffix_b * len + cb * len * len / 2.0);
        suffix_b += cb * len;
    }
    return acc;
}

std::vector<double> MarketModel::weights(std::span<const double> x) const {
    const int n = tenor_.n();
    if (x.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("state dimension mismatch");
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) {
        const double g = 1.0 + tenor_.accrual(j) * x[static_cast<std::size_t>(j) - 1];
        if (std::abs(g) < 1e-12)
            throw SingularStateError("state has 1 + delta_j x_j = 0");
        w[static_cast<std::size_t>(j) - 1] = tenor_.accrual(j) * x[static_cast<std::size_t>(j) - 1] / g;
    }
    return w;
}

double MarketModel::drift_layer(int p, int k, double t, std::span<const double> x) const {
    const int n = tenor_.n();
    if (p < 0 || k < 1 || k > n)
        throw std::invalid_argument("drift_layer: bad indices");
    if (k == n || p > n - k - 1) return 0.0;

    const int iv = vols_.interval_of(t);
    const auto w = weights(x);

    if (p == 0) {
        double acc = 0.0;
        for (int j = k + 1; j <= n; ++j)
            acc += sigma_on_interval(k, j, iv) * w[static_cast<std::size_t>(j) - 1];
        return -acc;
    }
    if (!measure_.has_jumps()) return 0.0;

    const double ak = scalar_loading(k, iv);
    if (ak == 0.0) return 0.0;
    // elementary symmetric polynomial e_{p+1} of {lambda^j w_j : j > k}
    std::vector<double> e(static_cast<std::size_t>(p) + 2, 0.0);
    e[0] = 1.0;
    for (int j = k + 1; j <= n; ++j) {
        const double aw = scalar_loading(j, iv) * w[static_cast<std::size_t>(j) - 1];
        for (int q = std::min<int>(p + 1, j - k); q >= 1; --q)
            e[static_cast<std::size_t>(q)] += aw * e[static_cast<std::size_t>(q) - 1];
    }
    return -cached_moment(p + 2) * ak * e[static_cast<std::size_t>(p) + 1];
}

double MarketModel::drift(int k, double t, std::span<const double> x, double alpha) const {
    const int n = tenor_.n();
    double acc = 0.0, ap = 1.0;
    for (int p = 0; p <= n - k - 1; ++p) {
        acc += ap * drift_layer(p, k, t, x);
        ap *= alpha;
    }
    return acc;
}

void MarketModel::drift_all(double t, std::span<const double> x, double alpha,
                            std::span<double> out) const {
    const int n = tenor_.n();
    if (out.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("drift_all: output size mismatch");
    const int iv = vols_.interval_of(t);

    double w[kMaxRates];
    for (int j = 1; j <= n; ++j) {
        const double g = 1.0 + tenor_.accrual(j) * x[static_cast<std::size_t>(j) - 1];
        if (std::abs(g) < 1e-12)
            throw SingularStateError("state has 1 + delta_j x_j = 0");
        w[j - 1] = tenor_.accrual(j) * x[static_cast<std::size_t>(j) - 1] / g;
    }

    const bool jumps = measure_.has_jumps();
    // suffix elementary symmetric polynomials of {lambda^j w_j : j > k}
    double e[kMaxRates + 1] = {0.0};
    e[0] = 1.0;
    for (int k = n; k >= 1; --k) {
        double acc = 0.0;
        for (int j = k + 1; j <= n; ++j)
            acc += sigma_on_interval(k, j, iv) * w[j - 1];
        if (jumps) {
            const double ak = scalar_loading(k, iv);
            if (ak != 0.0) {
                double ap = alpha;
                for (int p = 1; p <= n - k - 1; ++p) {
                    acc += ap * cached_moment(p + 2) * ak * e[p + 1];
                    ap *= alpha;
                }
            }
        }
        out[static_cast<std::size_t>(k) - 1] = -acc;
        // extend the suffix set with element k for the next (smaller) rate
        if (jumps) {
            const double aw = scalar_loading(k, iv) * w[k - 1];
            for (int q = n - k + 1; q >= 1; --q)
                e[q] += aw * e[q - 1];
        }
    }
}

} // namespace levylmm
