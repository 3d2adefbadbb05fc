#include <levylmm/series.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace levylmm {

namespace {

void enumerate(int nvars, int max_order, int var, MultiIndex& cur, int used,
               std::vector<MultiIndex>& out) {
    if (var > nvars) {
        out.push_back(cur);
        return;
    }
    for (int e = 0; e + used <= max_order; ++e) {
        if (e) cur.bump(var);
        enumerate(nvars, max_order, var + 1, cur, used + e, out);
    }
    cur.bump(var, -cur[var]);
}

} // namespace

std::shared_ptr<const TruncatedSeries::Layout> TruncatedSeries::Layout::make(int nvars,
                                                                             int max_order) {
    if (nvars < 1 || nvars > MultiIndex::kMaxVars)
        throw std::invalid_argument("TruncatedSeries: unsupported variable count");
    if (max_order < 0 || max_order > 8)
        throw std::invalid_argument("TruncatedSeries: unsupported order");
    auto layout = std::make_shared<Layout>();
    layout->nvars = nvars;
    layout->max_order = max_order;
    MultiIndex cur;
    enumerate(nvars, max_order, 1, cur, 0, layout->exps);
    // graded ordering so products can early-exit on order
    std::sort(layout->exps.begin(), layout->exps.end(),
              [](const MultiIndex& a, const MultiIndex& b) {
                  const int oa = a.order(), ob = b.order();
                  return oa != ob ? oa < ob : a.key() < b.key();
              });
    layout->index_of.reserve(layout->exps.size());
    for (std::size_t i = 0; i < layout->exps.size(); ++i)
        layout->index_of.emplace(layout->exps[i].key(), static_cast<int>(i));
    return layout;
}

TruncatedSeries::TruncatedSeries(std::shared_ptr<const Layout> layout)
    : layout_(std::move(layout)), c_(layout_->exps.size(), 0.0) {}

TruncatedSeries TruncatedSeries::constant(std::shared_ptr<const Layout> layout, double c) {
    TruncatedSeries s(std::move(layout));
    s.c_[0] = c;
    return s;
}

TruncatedSeries TruncatedSeries::variable(std::shared_ptr<const Layout> layout, int var,
                                          double x0) {
    TruncatedSeries s(std::move(layout));
    s.c_[0] = x0;
    if (s.layout_->max_order >= 1)
        s.c_[static_cast<std::size_t>(s.layout_->index_of.at(MultiIndex::of({var}).key()))] = 1.0;
    return s;
}

double TruncatedSeries::coeff(const MultiIndex& mi) const {
    auto it = layout_->index_of.find(mi.key());
    if (it == layout_->index_of.end())
        throw OrderBudgetError("TruncatedSeries: coefficient beyond truncation order");
    return c_[static_cast<std::size_t>(it->second)];
}

TruncatedSeries& TruncatedSeries::operator+=(const TruncatedSeries& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

TruncatedSeries& TruncatedSeries::operator-=(const TruncatedSeries& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

TruncatedSeries& TruncatedSeries::operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
}

TruncatedSeries TruncatedSeries::operator*(const TruncatedSeries& o) const {
    TruncatedSeries out(layout_);
    const auto& exps = layout_->exps;
    const int max_order = layout_->max_order;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0.0) continue;
        const int oi = exps[i].order();
        for (std::size_t j = 0; j < c_.size(); ++j) {
            if (o.c_[j] == 0.0) continue;
            if (oi + exps[j].order() > max_order) break;  // graded order
            const auto key = exps[i].plus(exps[j]).key();
            out.c_[static_cast<std::size_t>(layout_->index_of.at(key))] += c_[i] * o.c_[j];
        }
    }
    return out;
}

TruncatedSeries TruncatedSeries::reciprocal() const {
    const double a0 = c_[0];
    if (std::abs(a0) < 1e-300)
        throw DomainError("TruncatedSeries: reciprocal of series with zero constant term");
    // A = a0 (1 + B) with ord(B) >= 1: 1/A = (1/a0) sum (-B)^m, Horner form.
    TruncatedSeries b = *this;
    b *= 1.0 / a0;
    b.c_[0] = 0.0;
    TruncatedSeries r = constant(layout_, 1.0);
    for (int m = 0; m < layout_->max_order; ++m) {
        r = b * r;
        r *= -1.0;
        r.c_[0] += 1.0;
    }
    r *= 1.0 / a0;
    return r;
}

TruncatedSeries TruncatedSeries::compose_outer(std::span<const double> outer) const {
    if (outer.size() < static_cast<std::size_t>(layout_->max_order) + 1)
        throw std::invalid_argument("compose_outer: need outer derivatives up to the truncation order");
    TruncatedSeries delta = *this;
    delta.c_[0] = 0.0;
    // Horner: sum_m outer[m]/m! delta^m
    double fact = 1.0;
    for (int m = 2; m <= layout_->max_order; ++m) fact *= m;
    TruncatedSeries acc = constant(layout_, outer[static_cast<std::size_t>(layout_->max_order)] / fact);
    for (int m = layout_->max_order - 1; m >= 0; --m) {
        fact = 1.0;
        for (int q = 2; q <= m; ++q) fact *= q;
        acc = delta * acc;
        acc.c_[0] += outer[static_cast<std::size_t>(m)] / fact;
    }
    return acc;
}

Jet TruncatedSeries::to_jet(std::vector<double> base) const {
    Jet jet(std::move(base), layout_->max_order);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0.0) continue;
        double fact = 1.0;
        for (int v = 1; v <= layout_->nvars; ++v)
            for (int q = 2; q <= layout_->exps[i][v]; ++q) fact *= q;
        jet.set(layout_->exps[i], c_[i] * fact);
    }
    return jet;
}

} // namespace levylmm
