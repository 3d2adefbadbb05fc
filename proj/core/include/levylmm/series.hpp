#pragma once

#include <levylmm/jet.hpp>

#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

namespace levylmm {

/// Dense multivariate Taylor polynomial around a base point, truncated at a
/// total order.  Supports the ring operations plus reciprocal and univariate
/// outer composition; exact for the orders carried.  Used to differentiate
/// composite value functions (rational swap-rate algebra fed into the
/// log-normal kernel) where no sparse closed form exists.
class TruncatedSeries {
public:
    struct Layout {
        int nvars;
        int max_order;
        std::vector<MultiIndex> exps;                      // graded enumeration
        std::unordered_map<std::uint64_t, int> index_of;   // key -> position
        static std::shared_ptr<const Layout> make(int nvars, int max_order);
    };

    TruncatedSeries(std::shared_ptr<const Layout> layout);
    static TruncatedSeries constant(std::shared_ptr<const Layout> layout, double c);
    /// x0 + (x_var - x0): the affine coordinate function.
    static TruncatedSeries variable(std::shared_ptr<const Layout> layout, int var, double x0);

    const Layout& layout() const { return *layout_; }
    double coeff(const MultiIndex& mi) const;
    double constant_term() const { return c_[0]; }

    TruncatedSeries& operator+=(const TruncatedSeries& o);
    TruncatedSeries& operator-=(const TruncatedSeries& o);
    TruncatedSeries& operator*=(double s);
    friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
    friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }
    friend TruncatedSeries operator*(TruncatedSeries a, double s) { return a *= s; }
    TruncatedSeries operator*(const TruncatedSeries& o) const;

    /// 1 / this; requires a nonzero constant term.
    TruncatedSeries reciprocal() const;

    /// f(this) for an outer univariate f given by derivatives f^{(m)} at the
    /// constant term, m = 0..max_order.
    TruncatedSeries compose_outer(std::span<const double> outer_derivatives) const;

    /// Convert coefficients to mixed partials: d^beta = coeff(beta) * beta!.
    Jet to_jet(std::vector<double> base) const;

private:
    std::shared_ptr<const Layout> layout_;
    std::vector<double> c_;
};

} // namespace levylmm
