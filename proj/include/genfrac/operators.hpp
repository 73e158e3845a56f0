#pragma once

#include <Eigen/Dense>

#include <optional>

#include "genfrac/grid.hpp"
#include "genfrac/kernels.hpp"

namespace genfrac {

/// Parameter set <a, t, b, p, q> without the running variable: the domain
/// plus the weights of the left-looking and right-looking kernel integrals.
struct ParamSet {
    double a = 0.0;
    double b = 1.0;
    double p = 1.0;
    double q = 0.0;

    void validate() const;
};

/// The dual parameter set: p and q swapped. An involution.
ParamSet dual(const ParamSet& P);

enum class Quadrature {
    ProductTrapezoid,   ///< piecewise-linear interpolant, kernel cell moments exact
    CompositeMidpoint,  ///< two-level midpoint rule offset half a step from the diagonal
};

struct OperatorConfig {
    Quadrature quadrature = Quadrature::ProductTrapezoid;
    DerivativeScheme derivative_scheme = DerivativeScheme::OneSided2AtEnds;
    int refine_factor = 4;  ///< internal grid refinement for the derivative in a_op

    void validate() const;
};

/// Configuration matching the kernel: the product rule for difference
/// kernels, the midpoint rule for general ones.
OperatorConfig default_config_for(const Kernel& kernel);

/// K f(t) = p * int_a^t k(t,tau) f(tau) dtau + q * int_t^b k(tau,t) f(tau) dtau
/// sampled on f's grid. At t=a the left term vanishes, at t=b the right term.
///
/// Nodes whose quadrature did not settle (a non-integrable kernel corner on
/// the evaluation point) are reported through `mask` when provided; their
/// values are the best available estimate and should not be trusted.
GridFunction k_op(const ParamSet& P, const Kernel& kernel, const GridFunction& f,
                  const OperatorConfig& cfg, NodeMask* mask = nullptr);

/// Dense matrix of the discrete K operator on an n-interval grid: row i holds
/// the quadrature weights of node i. Only the product-trapezoid path is
/// available in matrix form.
Eigen::MatrixXd k_matrix(const ParamSet& P, const Kernel& kernel, Eigen::Index n,
                         const OperatorConfig& cfg);

/// A f = D (K^{1-alpha} f): the integral is taken on a grid refined by
/// cfg.refine_factor, differentiated by second-order differences, and
/// restricted back. `kernel_1ma` is the order-(1-alpha) kernel. Nodes within
/// one coarse step of a singular endpoint are computed but flagged in `mask`.
GridFunction a_op(const ParamSet& P, const Kernel& kernel_1ma, const GridFunction& f,
                  const OperatorConfig& cfg, NodeMask* mask = nullptr);

/// B f = K^{1-alpha} (f'). The derivative is the caller's exact one when
/// given, otherwise finite differences of f.
GridFunction b_op(const ParamSet& P, const Kernel& kernel_1ma, const GridFunction& f,
                  const std::optional<GridFunction>& f_prime, const OperatorConfig& cfg,
                  NodeMask* mask = nullptr);

struct NormCheckReport {
    double empirical_ratio_max = 0.0;
    double l2_bound = 0.0;
};

/// Hilbert-Schmidt bound ( double integral of the combined kernel squared )
/// against the largest observed ||K f||_2 / ||f||_2 over random
/// piecewise-linear f. Raises NotSquareIntegrableError when the double
/// integral refuses to settle.
NormCheckReport operator_norm_check(const ParamSet& P, const Kernel& kernel, int trials,
                                    Eigen::Index n);

} // namespace genfrac
