#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <vector>

#include "genfrac/errors.hpp"

namespace genfrac {

/// Per-node quality flags attached to operator outputs. A set entry marks a
/// node whose value could not be resolved by the quadrature (for instance a
/// kernel singularity sitting on the evaluation point) and should be excluded
/// from norms or replaced by extrapolation before integrating.
using NodeMask = std::vector<std::uint8_t>;

/// A real-valued function sampled on a uniform grid over [a, b] with n
/// intervals (n + 1 nodes). The common currency of every operator in the
/// library.
struct GridFunction {
    double a = 0.0;
    double b = 1.0;
    Eigen::ArrayXd values;

    GridFunction() = default;
    GridFunction(double a_, double b_, Eigen::ArrayXd v);

    Eigen::Index n() const { return values.size() - 1; }
    double step() const { return (b - a) / static_cast<double>(n()); }
    double node(Eigen::Index i) const { return a + static_cast<double>(i) * step(); }
    Eigen::ArrayXd nodes() const;

    /// Piecewise-linear evaluation at an arbitrary point of [a, b].
    double interpolate(double t) const;

    static GridFunction sample(double a, double b, Eigen::Index n,
                               const std::function<double(double)>& f);
    static GridFunction zeros(double a, double b, Eigen::Index n);
    static GridFunction constant(double a, double b, Eigen::Index n, double c);
};

enum class DerivativeScheme {
    Central2,         ///< central differences inside, first-order one-sided at the ends
    OneSided2AtEnds,  ///< central differences inside, second-order one-sided at the ends
};

/// Nodal finite-difference derivative of a grid function.
GridFunction derivative(const GridFunction& f,
                        DerivativeScheme scheme = DerivativeScheme::OneSided2AtEnds);

/// Dense matrix form of `derivative` acting on nodal values.
Eigen::MatrixXd derivative_matrix(Eigen::Index n, double h,
                                  DerivativeScheme scheme = DerivativeScheme::OneSided2AtEnds);

/// Composite trapezoid rule over the whole grid.
double trapezoid(const GridFunction& f);

/// Trapezoid rule where masked nodes are first replaced by quadratic
/// extrapolation from the three nearest unmasked nodes.
double masked_trapezoid(const GridFunction& f, const NodeMask& mask);

/// Replaces masked nodal values by quadratic extrapolation from the three
/// nearest unmasked nodes, returning the repaired function.
GridFunction fill_masked(const GridFunction& f, const NodeMask& mask);

/// Discrete L2 norm with trapezoid weights.
double l2_norm(const GridFunction& f);

double max_norm(const GridFunction& f);

/// Max-norm of f - g over unmasked nodes (mask may be empty).
double masked_max_diff(const GridFunction& f, const GridFunction& g, const NodeMask& mask);

/// Restricts a function sampled on a grid refined by `factor` back to the
/// coarse grid (every factor-th node).
GridFunction restrict_to_coarse(const GridFunction& fine, int factor);

/// Linear interpolation of f onto a grid refined by `factor`.
GridFunction refine_linear(const GridFunction& f, int factor);

} // namespace genfrac
