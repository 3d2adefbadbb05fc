#pragma once

#include <levylmm/errors.hpp>

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <unordered_map>
#include <vector>

namespace levylmm {

/// Canonical multi-index over rate variables 1..kMaxVars (exponent per
/// variable, total order <= 15 per variable).  Permutation symmetry of mixed
/// partials is structural: any ordering of the same variables produces the
/// same index.
struct MultiIndex {
    static constexpr int kMaxVars = 16;
    std::array<std::uint8_t, kMaxVars> exp{};

    static MultiIndex of(std::initializer_list<int> vars) {
        MultiIndex m;
        for (int v : vars) m.bump(v);
        return m;
    }
    static MultiIndex of(std::span<const int> vars) {
        MultiIndex m;
        for (int v : vars) m.bump(v);
        return m;
    }

    void bump(int var, int by = 1) {
        exp[static_cast<std::size_t>(var) - 1] = static_cast<std::uint8_t>(
            exp[static_cast<std::size_t>(var) - 1] + by);
    }
    int order() const {
        int s = 0;
        for (auto e : exp) s += e;
        return s;
    }
    int operator[](int var) const { return exp[static_cast<std::size_t>(var) - 1]; }

    MultiIndex plus(const MultiIndex& o) const {
        MultiIndex m = *this;
        for (std::size_t i = 0; i < kMaxVars; ++i)
            m.exp[i] = static_cast<std::uint8_t>(m.exp[i] + o.exp[i]);
        return m;
    }

    /// 4 bits per variable; canonical key for hashing/look-up.
    std::uint64_t key() const {
        std::uint64_t k = 0;
        for (std::size_t i = 0; i < kMaxVars; ++i)
            k |= static_cast<std::uint64_t>(exp[i] & 0xF) << (4 * i);
        return k;
    }
    bool operator==(const MultiIndex& o) const { return exp == o.exp; }
};

/// Truncated Taylor coefficient container: mixed partial derivatives of a
/// function at a base point, addressed by multi-index.  Coefficients not
/// stored are structural zeros; queries beyond the carried order throw.
class Jet {
public:
    Jet() : max_order_(0) {}
    Jet(std::vector<double> base, int max_order)
        : base_(std::move(base)), max_order_(max_order) {}

    const std::vector<double>& base() const { return base_; }
    int nvars() const { return static_cast<int>(base_.size()); }
    int max_order() const { return max_order_; }

    void set(const MultiIndex& mi, double value) { coeff_[mi.key()] = value; }

    double partial(const MultiIndex& mi) const {
        const int ord = mi.order();
        if (ord > max_order_)
            throw OrderBudgetError("Jet: derivative order exceeds carried budget");
        auto it = coeff_.find(mi.key());
        return it == coeff_.end() ? 0.0 : it->second;
    }

    double value() const { return partial(MultiIndex{}); }
    std::size_t stored() const { return coeff_.size(); }

private:
    std::vector<double> base_;
    int max_order_;
    std::unordered_map<std::uint64_t, double> coeff_;
};

} // namespace levylmm
