#include "genfrac/operators.hpp"

#include <cmath>
#include <random>

#include "genfrac/parallel.hpp"
#include "genfrac/quadrature.hpp"

namespace genfrac {

void ParamSet::validate() const {
    if (!(a < b)) throw InvalidDomainError("ParamSet: requires a < b");
    if (!std::isfinite(p) || !std::isfinite(q))
        throw PreconditionError("ParamSet: weights must be finite");
}

ParamSet dual(const ParamSet& P) { return {P.a, P.b, P.q, P.p}; }

void OperatorConfig::validate() const {
    if (refine_factor != 1 && refine_factor != 2 && refine_factor != 4 && refine_factor != 8)
        throw ConfigurationError("OperatorConfig: refine_factor must be one of {1,2,4,8}");
}

OperatorConfig default_config_for(const Kernel& kernel) {
    OperatorConfig cfg;
    cfg.quadrature = kernel.is_difference() ? Quadrature::ProductTrapezoid
                                            : Quadrature::CompositeMidpoint;
    return cfg;
}

namespace {

constexpr double kMaskThreshold = 1e-4;  // relative two-level disagreement that flags a node

// Zeroth and first kernel cell moments over [ (m-1)h, mh ], m = 1..n.
struct CellMoments {
    Eigen::ArrayXd m0;
    Eigen::ArrayXd m1;
};

CellMoments cell_moments(const Kernel& kernel, double h, Eigen::Index n) {
    CellMoments cm;
    cm.m0.resize(n);
    cm.m1.resize(n);
    if (kernel.has_moments()) {
        for (Eigen::Index m = 1; m <= n; ++m) {
            cm.m0[m - 1] = kernel.moment((m - 1) * h, m * h);
            cm.m1[m - 1] = kernel.first_moment((m - 1) * h, m * h);
        }
        return cm;
    }
    if (kernel.singular_at_diagonal)
        throw ConfigurationError("k_op: singular difference kernel '" + kernel.name +
                                 "' needs closed-form moments for the product rule");
    QuadratureOptions opts;
    opts.abs_tol = 1e-14;
    opts.rel_tol = 1e-13;
    for (Eigen::Index m = 1; m <= n; ++m) {
        const double s0 = (m - 1) * h, s1 = m * h;
        cm.m0[m - 1] = integrate(kernel.eval1, s0, s1, opts);
        cm.m1[m - 1] = integrate([&](double s) { return s * kernel.eval1(s); }, s0, s1, opts);
    }
    return cm;
}

// Product-trapezoid apply for difference kernels, matrix free.
void product_trapezoid_apply(const ParamSet& P, const CellMoments& cm, double h,
                             const Eigen::ArrayXd& f, Eigen::ArrayXd& out) {
    const Eigen::Index n = f.size() - 1;
    parallel_for(static_cast<std::size_t>(n + 1), [&](std::size_t ii) {
        const Eigen::Index i = static_cast<Eigen::Index>(ii);
        double left = 0.0, right = 0.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const Eigen::Index m = i - j;
            const double s0 = (m - 1) * h, s1 = m * h;
            const double m0 = cm.m0[m - 1], m1 = cm.m1[m - 1];
            left += f[j] * ((m1 - s0 * m0) / h) + f[j + 1] * ((s1 * m0 - m1) / h);
        }
        for (Eigen::Index j = i; j < n; ++j) {
            const Eigen::Index m = j - i + 1;
            const double s0 = (m - 1) * h, s1 = m * h;
            const double m0 = cm.m0[m - 1], m1 = cm.m1[m - 1];
            right += f[j] * ((s1 * m0 - m1) / h) + f[j + 1] * ((m1 - s0 * m0) / h);
        }
        out[i] = P.p * left + P.q * right;
    });
}

// Two-level composite midpoint with Richardson combination. The base rule
// samples each cell at its midpoint (half a step off the diagonal); the fine
// rule at the two quarter points. Nodes where the two levels disagree are
// flagged in `mask`.
void midpoint_apply(const ParamSet& P, const Kernel& kernel, double a, double h,
                    const Eigen::ArrayXd& f, Eigen::ArrayXd& out, NodeMask& mask) {
    const Eigen::Index n = f.size() - 1;
    auto kv = [&](double t, double tau) {
        return kernel.is_difference() ? kernel.eval1(t - tau) : kernel.eval2(t, tau);
    };
    parallel_for(static_cast<std::size_t>(n + 1), [&](std::size_t ii) {
        const Eigen::Index i = static_cast<Eigen::Index>(ii);
        const double ti = a + i * h;
        double lc = 0.0, rc = 0.0, lf = 0.0, rf = 0.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double tj = a + j * h;
            const double fmid = 0.5 * (f[j] + f[j + 1]);
            lc += h * kv(ti, tj + 0.5 * h) * fmid;
            const double f14 = 0.75 * f[j] + 0.25 * f[j + 1];
            const double f34 = 0.25 * f[j] + 0.75 * f[j + 1];
            lf += 0.5 * h * (kv(ti, tj + 0.25 * h) * f14 + kv(ti, tj + 0.75 * h) * f34);
        }
        for (Eigen::Index j = i; j < n; ++j) {
            const double tj = a + j * h;
            const double fmid = 0.5 * (f[j] + f[j + 1]);
            rc += h * kv(tj + 0.5 * h, ti) * fmid;
            const double f14 = 0.75 * f[j] + 0.25 * f[j + 1];
            const double f34 = 0.25 * f[j] + 0.75 * f[j + 1];
            rf += 0.5 * h * (kv(tj + 0.25 * h, ti) * f14 + kv(tj + 0.75 * h, ti) * f34);
        }
        const double coarse = P.p * lc + P.q * rc;
        const double fine = P.p * lf + P.q * rf;
        out[i] = (4.0 * fine - coarse) / 3.0;
        if (!(std::abs(fine - coarse) <= kMaskThreshold * (1.0 + std::abs(fine))))
            mask[ii] = 1;
    });
}

} // namespace

GridFunction k_op(const ParamSet& P, const Kernel& kernel, const GridFunction& f,
                  const OperatorConfig& cfg, NodeMask* mask) {
    P.validate();
    cfg.validate();
    kernel.validate();
    const Eigen::Index n = f.n();
    const double h = f.step();
    Eigen::ArrayXd out(n + 1);
    NodeMask local(static_cast<std::size_t>(n + 1), 0);

    if (cfg.quadrature == Quadrature::ProductTrapezoid) {
        if (!kernel.is_difference())
            throw ConfigurationError("k_op: the product-trapezoid rule needs a difference kernel");
        const CellMoments cm = cell_moments(kernel, h, n);
        product_trapezoid_apply(P, cm, h, f.values, out);
    } else {
        midpoint_apply(P, kernel, f.a, h, f.values, out, local);
    }

    for (Eigen::Index i = 0; i <= n; ++i) {
        if (!std::isfinite(out[i])) {
            if (local[static_cast<std::size_t>(i)]) {
                out[i] = 0.0;  // flagged placeholder, consumers extrapolate
            } else {
                throw NumericalOverflowError("k_op: non-finite value at node " + std::to_string(i));
            }
        }
    }
    if (mask) *mask = std::move(local);
    return GridFunction(f.a, f.b, std::move(out));
}

Eigen::MatrixXd k_matrix(const ParamSet& P, const Kernel& kernel, Eigen::Index n,
                         const OperatorConfig& cfg) {
    P.validate();
    cfg.validate();
    if (cfg.quadrature != Quadrature::ProductTrapezoid || !kernel.is_difference())
        throw ConfigurationError("k_matrix: only the product-trapezoid difference path has a matrix form");
    const double h = (P.b - P.a) / static_cast<double>(n);
    const CellMoments cm = cell_moments(kernel, h, n);
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (Eigen::Index i = 0; i <= n; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            const Eigen::Index m = i - j;
            const double s0 = (m - 1) * h, s1 = m * h;
            const double m0 = cm.m0[m - 1], m1 = cm.m1[m - 1];
            W(i, j) += P.p * (m1 - s0 * m0) / h;
            W(i, j + 1) += P.p * (s1 * m0 - m1) / h;
        }
        for (Eigen::Index j = i; j < n; ++j) {
            const Eigen::Index m = j - i + 1;
            const double s0 = (m - 1) * h, s1 = m * h;
            const double m0 = cm.m0[m - 1], m1 = cm.m1[m - 1];
            W(i, j) += P.q * (s1 * m0 - m1) / h;
            W(i, j + 1) += P.q * (m1 - s0 * m0) / h;
        }
    }
    return W;
}

GridFunction a_op(const ParamSet& P, const Kernel& kernel_1ma, const GridFunction& f,
                  const OperatorConfig& cfg, NodeMask* mask) {
    P.validate();
    cfg.validate();
    const Eigen::Index n = f.n();
    const int r = cfg.refine_factor;
    const GridFunction fr = r > 1 ? refine_linear(f, r) : f;
    NodeMask kmask;
    const GridFunction Kf = k_op(P, kernel_1ma, fr, cfg, &kmask);
    const double hr = Kf.step();
    const double scale = std::max(1.0, Kf.values.abs().maxCoeff());

    GridFunction d = derivative(Kf, cfg.derivative_scheme);
    const double blowup = scale / (hr * hr);
    if (std::abs(d.values[0]) > blowup || std::abs(d.values[d.n()]) > blowup)
        throw DerivativeBlowupError("a_op: endpoint difference exceeds the blow-up sentinel");

    GridFunction out = restrict_to_coarse(d, r);
    NodeMask local(static_cast<std::size_t>(n + 1), 0);
    // Flag nodes within one coarse step of a singular endpoint; the
    // differentiated integral is not trustworthy there.
    if (kernel_1ma.singular_at_diagonal) {
        if (P.p != 0.0) {
            local[0] = 1;
            if (n >= 1) local[1] = 1;
        }
        if (P.q != 0.0) {
            local[static_cast<std::size_t>(n)] = 1;
            if (n >= 1) local[static_cast<std::size_t>(n - 1)] = 1;
        }
    }
    // propagate quadrature flags from the refined integral (one coarse-node halo)
    for (std::size_t ir = 0; ir < kmask.size(); ++ir) {
        if (!kmask[ir]) continue;
        const Eigen::Index coarse = static_cast<Eigen::Index>(ir) / r;
        for (Eigen::Index c = std::max<Eigen::Index>(0, coarse - 1);
             c <= std::min<Eigen::Index>(n, coarse + 1); ++c)
            local[static_cast<std::size_t>(c)] = 1;
    }
    if (mask) *mask = std::move(local);
    return out;
}

GridFunction b_op(const ParamSet& P, const Kernel& kernel_1ma, const GridFunction& f,
                  const std::optional<GridFunction>& f_prime, const OperatorConfig& cfg,
                  NodeMask* mask) {
    GridFunction df = f_prime ? *f_prime : derivative(f, cfg.derivative_scheme);
    if (df.n() != f.n() || df.a != f.a || df.b != f.b)
        throw PreconditionError("b_op: f_prime must live on f's grid");
    return k_op(P, kernel_1ma, df, cfg, mask);
}

NormCheckReport operator_norm_check(const ParamSet& P, const Kernel& kernel, int trials,
                                    Eigen::Index n) {
    P.validate();
    NormCheckReport rep;
    const double L = P.b - P.a;
    const double pq2 = P.p * P.p + P.q * P.q;

    if (pq2 == 0.0) {
        rep.l2_bound = 0.0;
    } else if (kernel.is_difference()) {
        // double integral of G^2 collapses to int_0^L k(s)^2 (L - s) ds
        QuadratureOptions opts;
        opts.abs_tol = 1e-11;
        opts.rel_tol = 1e-9;
        opts.max_intervals = 20000;
        QuadratureResult q = integrate_adaptive(
            [&](double s) {
                const double v = kernel.eval1(s);
                return v * v * (L - s);
            },
            0.0, L, opts);
        if (q.diverging || (!q.converged && q.value > 1e6))
            throw NotSquareIntegrableError("operator_norm_check: kernel '" + kernel.name +
                                           "' is not square integrable on the square");
        if (!q.converged)
            throw QuadratureFailureError("operator_norm_check: bound quadrature did not converge");
        rep.l2_bound = std::sqrt(pq2 * q.value);
    } else {
        // offset-diagonal double midpoint at three refinements
        double prev = 0.0;
        double cur = 0.0;
        for (int m : {64, 128, 256}) {
            const double hm = L / m;
            double acc = 0.0;
            for (int i = 0; i < m; ++i) {
                const double t = P.a + (i + 0.5) * hm;
                for (int j = 0; j < i; ++j) {
                    const double tau = P.a + (j + 0.5) * hm;
                    const double v = kernel.eval2(t, tau);
                    acc += v * v * hm * hm;
                }
            }
            prev = cur;
            cur = acc;
        }
        if (cur > 1.25 * prev)
            throw NotSquareIntegrableError("operator_norm_check: kernel '" + kernel.name +
                                           "' is not square integrable on the square");
        rep.l2_bound = std::sqrt(pq2 * cur);
    }

    const OperatorConfig cfg = default_config_for(kernel);
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < trials; ++trial) {
        Eigen::ArrayXd v(n + 1);
        for (Eigen::Index i = 0; i <= n; ++i) v[i] = uni(rng);
        GridFunction f(P.a, P.b, std::move(v));
        const GridFunction Kf = k_op(P, kernel, f, cfg);
        const double denom = l2_norm(f);
        if (denom > 0.0) rep.empirical_ratio_max = std::max(rep.empirical_ratio_max, l2_norm(Kf) / denom);
    }
    return rep;
}

} // namespace genfrac
