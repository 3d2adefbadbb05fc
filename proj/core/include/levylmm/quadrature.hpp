#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <functional>
#include <limits>

namespace levylmm::quad {

// Adaptive Gauss-Kronrod on a finite or semi-infinite interval.
template <typename F>
double gauss_kronrod(F&& f, double a, double b, double tol = 1e-12) {
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        std::forward<F>(f), a, b, 14, tol);
}

// tanh-sinh, robust against integrable endpoint singularities (z^{-1-Y} type).
template <typename F>
double tanh_sinh(F&& f, double a, double b, double tol = 1e-12) {
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(std::forward<F>(f), a, b, tol);
}

// Integral of f over one side of the real line away from zero, split so the
// possibly singular inner part goes to tanh-sinh and the smooth tail to
// Gauss-Kronrod.  `a` may be 0 (singular endpoint allowed).
template <typename F>
double half_line(F&& f, double a, double split = 1.0, double tol = 1e-12) {
    double inner = 0.0;
    if (a < split)
        inner = tanh_sinh(f, a, split, tol);
    double tail = gauss_kronrod(f, std::max(a, split),
                                std::numeric_limits<double>::infinity(), tol);
    return inner + tail;
}

} // namespace levylmm::quad
