#include "genfrac/variational.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

namespace genfrac {

namespace {
constexpr double kBoundaryLayerFraction = 0.05;
}

Lagrangian Lagrangian::checked(Fn value, Fn d2, Fn d3, Fn d4, Fn d5) {
    if (!value || !d2 || !d3 || !d4 || !d5)
        throw PreconditionError("Lagrangian: all five maps must be set");
    Lagrangian L{std::move(value), std::move(d2), std::move(d3), std::move(d4), std::move(d5)};

    std::mt19937_64 rng(0x1a6c0deULL);
    std::uniform_real_distribution<double> ut(0.0, 1.0);
    std::uniform_real_distribution<double> ux(-2.0, 2.0);
    const Fn* parts[4] = {&L.d2, &L.d3, &L.d4, &L.d5};
    for (int pt = 0; pt < 100; ++pt) {
        double x[5] = {ut(rng), ux(rng), ux(rng), ux(rng), ux(rng)};
        for (int slot = 1; slot <= 4; ++slot) {
            const double step = 1e-6 * std::max(1.0, std::abs(x[slot]));
            double lo[5], hi[5];
            std::copy(x, x + 5, lo);
            std::copy(x, x + 5, hi);
            lo[slot] -= step;
            hi[slot] += step;
            const double fd = (L.value(hi[0], hi[1], hi[2], hi[3], hi[4]) -
                               L.value(lo[0], lo[1], lo[2], lo[3], lo[4])) /
                              (2.0 * step);
            const double an = (*parts[slot - 1])(x[0], x[1], x[2], x[3], x[4]);
            if (std::abs(fd - an) > 1e-5 * (1.0 + std::max(std::abs(fd), std::abs(an))))
                throw PreconditionError(
                    "Lagrangian: partial derivative d" + std::to_string(slot + 1) +
                    " disagrees with finite differences (got " + std::to_string(an) +
                    ", expected about " + std::to_string(fd) + ")");
        }
    }
    return L;
}

void VariationalProblem::validate() const {
    if (!(a < b)) throw InvalidDomainError("VariationalProblem: requires a < b");
    if (P1.a != a || P1.b != b || P2.a != a || P2.b != b)
        throw PreconditionError("VariationalProblem: parameter sets must share the domain");
    if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0))
        throw PreconditionError("VariationalProblem: orders must lie in (0, 1)");
    kernel_B.validate();
    kernel_K.validate();
    if (std::abs(kernel_B.order - (1.0 - alpha)) > 1e-9)
        throw PreconditionError("VariationalProblem: kernel_B must have order 1 - alpha");
}

namespace {

struct SlotFields {
    GridFunction u, v, w;
    NodeMask mask_v, mask_w;
};

SlotFields slot_fields(const VariationalProblem& prob, const GridFunction& y,
                       const OperatorConfig& cfg) {
    SlotFields s{derivative(y, cfg.derivative_scheme), GridFunction{}, GridFunction{}, {}, {}};
    s.v = b_op(prob.P1, prob.kernel_B, y, std::nullopt, cfg, &s.mask_v);
    s.w = k_op(prob.P2, prob.kernel_K, y, cfg, &s.mask_w);
    return s;
}

GridFunction apply_field(const Lagrangian::Fn& fn, const GridFunction& y, const SlotFields& s) {
    Eigen::ArrayXd out(y.values.size());
    for (Eigen::Index i = 0; i < y.values.size(); ++i)
        out[i] = fn(y.node(i), y.values[i], s.u.values[i], s.v.values[i], s.w.values[i]);
    return GridFunction(y.a, y.b, std::move(out));
}

void check_boundary(const VariationalProblem& prob, const GridFunction& y) {
    const auto n = y.n();
    const double scale = std::max(1.0, y.values.abs().maxCoeff());
    if (prob.bc.type == BoundaryCondition::Type::Fixed &&
        std::abs(y.values[0] - prob.bc.ya) > 1e-10 * scale)
        throw PreconditionError("el_residual: y(a) violates the boundary condition");
    if (std::abs(y.values[n] - prob.bc.yb) > 1e-10 * scale)
        throw PreconditionError("el_residual: y(b) violates the boundary condition");
}

} // namespace

GridFunction el_residual(const VariationalProblem& prob, const GridFunction& y,
                         const OperatorConfig& cfg, NodeMask* mask) {
    prob.validate();
    check_boundary(prob, y);
    const auto n = y.n();
    const SlotFields s = slot_fields(prob, y, cfg);

    const GridFunction f2 = apply_field(prob.F.d2, y, s);
    const GridFunction f3 = apply_field(prob.F.d3, y, s);
    const GridFunction f4 = apply_field(prob.F.d4, y, s);
    const GridFunction f5 = apply_field(prob.F.d5, y, s);

    const GridFunction ddt3 = derivative(f3, cfg.derivative_scheme);
    NodeMask maskA;
    const GridFunction a4 = a_op(dual(prob.P1), prob.kernel_B, f4, cfg, &maskA);
    NodeMask maskK;
    const GridFunction k5 = k_op(dual(prob.P2), prob.kernel_K, f5, cfg, &maskK);

    GridFunction R(y.a, y.b, f2.values - ddt3.values - a4.values + k5.values);

    NodeMask local(static_cast<std::size_t>(n + 1), 0);
    local[0] = 1;
    local[static_cast<std::size_t>(n)] = 1;
    for (std::size_t i = 0; i < local.size(); ++i)
        if (maskA[i] || maskK[i] || s.mask_v[i] || s.mask_w[i]) local[i] = 1;
    if (prob.kernel_B.singular_at_diagonal || prob.kernel_K.singular_at_diagonal) {
        const auto layer = static_cast<Eigen::Index>(
            std::ceil(kBoundaryLayerFraction * static_cast<double>(n)));
        for (Eigen::Index i = 0; i <= layer; ++i) {
            local[static_cast<std::size_t>(i)] = 1;
            local[static_cast<std::size_t>(n - i)] = 1;
        }
    }
    if (mask) *mask = std::move(local);
    return R;
}

double el_residual_norm(const VariationalProblem& prob, const GridFunction& y,
                        const OperatorConfig& cfg) {
    NodeMask mask;
    const GridFunction R = el_residual(prob, y, cfg, &mask);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < R.values.size(); ++i)
        if (!mask[static_cast<std::size_t>(i)]) worst = std::max(worst, std::abs(R.values[i]));
    return worst;
}

double natural_bc_residual(const VariationalProblem& prob, const GridFunction& y,
                           const OperatorConfig& cfg) {
    prob.validate();
    if (prob.bc.type != BoundaryCondition::Type::FreeStart)
        throw ModeError("natural_bc_residual: problem does not have a free start");
    check_boundary(prob, y);
    const SlotFields s = slot_fields(prob, y, cfg);
    const GridFunction f3 = apply_field(prob.F.d3, y, s);
    const GridFunction f4 = apply_field(prob.F.d4, y, s);
    // K at t = a keeps only its right-looking term by construction
    const GridFunction K4 = k_op(dual(prob.P1), prob.kernel_B, f4, cfg);
    return std::abs(f3.values[0] + K4.values[0]);
}

// ----------------------------------------------------------------------------
// direct solver
// ----------------------------------------------------------------------------

namespace {

/// Midpoint-cell discretization of the integral functional and its exact
/// gradient through the discrete linear operators.
struct DiscreteFunctional {
    double a, b, h;
    Eigen::Index n;
    Eigen::VectorXd tc;      // cell midpoints
    Eigen::MatrixXd Mv;      // cells x nodes: y -> cell average of B y
    Eigen::MatrixXd Mw;      // cells x nodes: y -> cell average of K y
    std::vector<Eigen::Index> free_idx;

    void build(const VariationalProblem& prob, Eigen::Index n_, DerivativeScheme scheme) {
        if (!prob.kernel_B.is_difference() || !prob.kernel_K.is_difference())
            throw ConfigurationError(
                "solver: the direct method needs difference kernels for its operator matrices");
        n = n_;
        a = prob.a;
        b = prob.b;
        h = (b - a) / static_cast<double>(n);
        tc.resize(n);
        for (Eigen::Index j = 0; j < n; ++j) tc[j] = a + (j + 0.5) * h;

        OperatorConfig cfg;  // product-trapezoid matrices
        Eigen::MatrixXd WB = k_matrix(prob.P1, prob.kernel_B, n, cfg);
        Eigen::MatrixXd WK = k_matrix(prob.P2, prob.kernel_K, n, cfg);
        Eigen::MatrixXd Dn = derivative_matrix(n, h, scheme);
        Eigen::MatrixXd Ac = Eigen::MatrixXd::Zero(n, n + 1);
        for (Eigen::Index j = 0; j < n; ++j) {
            Ac(j, j) = 0.5;
            Ac(j, j + 1) = 0.5;
        }
        Mv = Ac * WB * Dn;
        Mw = Ac * WK;

        free_idx.clear();
        if (prob.bc.type == BoundaryCondition::Type::FreeStart) free_idx.push_back(0);
        for (Eigen::Index i = 1; i < n; ++i) free_idx.push_back(i);
    }

    struct CellSlots {
        Eigen::VectorXd yc, uc, vc, wc;
    };

    CellSlots slots(const Eigen::VectorXd& y) const {
        CellSlots s;
        s.yc.resize(n);
        s.uc.resize(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            s.yc[j] = 0.5 * (y[j] + y[j + 1]);
            s.uc[j] = (y[j + 1] - y[j]) / h;
        }
        s.vc = Mv * y;
        s.wc = Mw * y;
        return s;
    }

    double integral(const Lagrangian& L, const Eigen::VectorXd& y) const {
        const CellSlots s = slots(y);
        double acc = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            acc += L.value(tc[j], s.yc[j], s.uc[j], s.vc[j], s.wc[j]);
        return acc * h;
    }

    /// gradient of integral(L) with respect to all nodal values
    Eigen::VectorXd gradient(const Lagrangian& L, const Eigen::VectorXd& y) const {
        const CellSlots s = slots(y);
        Eigen::VectorXd g2(n), g3(n), g4(n), g5(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            g2[j] = L.d2(tc[j], s.yc[j], s.uc[j], s.vc[j], s.wc[j]);
            g3[j] = L.d3(tc[j], s.yc[j], s.uc[j], s.vc[j], s.wc[j]);
            g4[j] = L.d4(tc[j], s.yc[j], s.uc[j], s.vc[j], s.wc[j]);
            g5[j] = L.d5(tc[j], s.yc[j], s.uc[j], s.vc[j], s.wc[j]);
        }
        Eigen::VectorXd g = Eigen::VectorXd::Zero(n + 1);
        for (Eigen::Index j = 0; j < n; ++j) {
            g[j] += 0.5 * g2[j] - g3[j] / h;
            g[j + 1] += 0.5 * g2[j] + g3[j] / h;
        }
        g.noalias() += Mv.transpose() * g4;
        g.noalias() += Mw.transpose() * g5;
        return g * h;
    }

    Eigen::VectorXd restrict_free(const Eigen::VectorXd& full) const {
        Eigen::VectorXd r(free_idx.size());
        for (std::size_t k = 0; k < free_idx.size(); ++k) r[k] = full[free_idx[k]];
        return r;
    }

    void inject_free(const Eigen::VectorXd& xf, Eigen::VectorXd& y) const {
        for (std::size_t k = 0; k < free_idx.size(); ++k) y[free_idx[k]] = xf[k];
    }
};

struct InnerResult {
    Eigen::VectorXd y;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Spectral-step gradient descent with the Grippo-Lampariello-Lucidi
/// nonmonotone backtracking rule. Strictly monotone Armijo stalls on the
/// stiff quadratic objectives this solver meets, so the sufficient-decrease
/// reference is the largest of the last ten accepted objective values.
InnerResult minimize_bb(const std::function<double(const Eigen::VectorXd&)>& obj,
                        const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
                        Eigen::VectorXd x0, double tol, int max_iter) {
    InnerResult res;
    Eigen::VectorXd x = std::move(x0);
    double J = obj(x);
    Eigen::VectorXd g = grad(x);
    std::deque<double> window{J};
    double step = 1.0 / std::max(1.0, g.lpNorm<Eigen::Infinity>());

    int it = 0;
    for (; it < max_iter; ++it) {
        const double gn = g.lpNorm<Eigen::Infinity>();
        if (gn <= tol) {
            res.converged = true;
            break;
        }
        const double gg = g.squaredNorm();
        const double Jref = *std::max_element(window.begin(), window.end());
        double s = std::clamp(step, 1e-16, 1e16);
        bool accepted = false;
        Eigen::VectorXd xt;
        double Jt = 0.0;
        for (int back = 0; back < 80; ++back) {
            xt = x - s * g;
            Jt = obj(xt);
            if (std::isfinite(Jt) && Jt <= Jref - 1e-4 * s * gg) {
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted)
            throw StalledError("solver: line search failed to find a descent step");
        Eigen::VectorXd gt = grad(xt);
        const Eigen::VectorXd dx = xt - x;
        const Eigen::VectorXd dg = gt - g;
        const double den = dx.dot(dg);
        step = den > 1e-300 ? dx.squaredNorm() / den : 2.0 * s;
        x = std::move(xt);
        J = Jt;
        g = std::move(gt);
        window.push_back(J);
        if (window.size() > 10) window.pop_front();
    }
    res.y = std::move(x);
    res.grad_norm = g.lpNorm<Eigen::Infinity>();
    res.iterations = it;
    return res;
}

Eigen::VectorXd initial_guess(const VariationalProblem& prob, Eigen::Index n) {
    Eigen::VectorXd y(n + 1);
    const double ya = prob.bc.type == BoundaryCondition::Type::Fixed ? prob.bc.ya : prob.bc.yb;
    for (Eigen::Index i = 0; i <= n; ++i) {
        const double w = static_cast<double>(i) / static_cast<double>(n);
        y[i] = ya * (1.0 - w) + prob.bc.yb * w;
    }
    return y;
}

} // namespace

SolveResult solve_fundamental(const VariationalProblem& prob, Eigen::Index n, double tol,
                              int max_iter) {
    prob.validate();
    if (prob.constraint)
        throw PreconditionError("solve_fundamental: the problem carries a constraint; use solve_isoperimetric");

    DiscreteFunctional model;
    model.build(prob, n, DerivativeScheme::OneSided2AtEnds);
    Eigen::VectorXd y = initial_guess(prob, n);

    auto obj = [&](const Eigen::VectorXd& xf) {
        Eigen::VectorXd yy = y;
        model.inject_free(xf, yy);
        return model.integral(prob.F, yy);
    };
    auto grad = [&](const Eigen::VectorXd& xf) {
        Eigen::VectorXd yy = y;
        model.inject_free(xf, yy);
        return model.restrict_free(model.gradient(prob.F, yy));
    };

    InnerResult inner = minimize_bb(obj, grad, model.restrict_free(y), tol, max_iter);
    model.inject_free(inner.y, y);

    SolveResult out;
    out.y = GridFunction(prob.a, prob.b, y.array());
    out.el_residual = inner.grad_norm;
    out.objective = model.integral(prob.F, y);
    out.iterations = inner.iterations;
    out.converged = inner.converged;
    return out;
}

SolveResult solve_isoperimetric(const VariationalProblem& prob, Eigen::Index n, double tol,
                                int max_iter) {
    prob.validate();
    if (!prob.constraint)
        throw PreconditionError("solve_isoperimetric: the problem carries no constraint");
    const Lagrangian& G = prob.constraint->G;
    const double xi = prob.constraint->xi;

    DiscreteFunctional model;
    model.build(prob, n, DerivativeScheme::OneSided2AtEnds);
    Eigen::VectorXd y = initial_guess(prob, n);

    int total_iterations = 0;
    auto inner_solve = [&](double lambda) {
        auto obj = [&](const Eigen::VectorXd& xf) {
            Eigen::VectorXd yy = y;
            model.inject_free(xf, yy);
            return model.integral(prob.F, yy) - lambda * model.integral(G, yy);
        };
        auto grad = [&](const Eigen::VectorXd& xf) {
            Eigen::VectorXd yy = y;
            model.inject_free(xf, yy);
            Eigen::VectorXd g = model.gradient(prob.F, yy) - lambda * model.gradient(G, yy);
            return model.restrict_free(g);
        };
        InnerResult r = minimize_bb(obj, grad, model.restrict_free(y), tol, max_iter);
        model.inject_free(r.y, y);
        total_iterations += r.iterations;
        return r;
    };
    auto defect = [&]() { return model.integral(G, y) - xi; };

    // abnormal sentinel: the constraint gradient vanished along the iterates
    auto check_abnormal = [&](double d) {
        const Eigen::VectorXd gI = model.restrict_free(model.gradient(G, y));
        const Eigen::VectorXd gJ = model.restrict_free(model.gradient(prob.F, y));
        if (gI.lpNorm<Eigen::Infinity>() <= 1e-11 * (1.0 + gJ.lpNorm<Eigen::Infinity>()) &&
            std::abs(d) > tol)
            throw AbnormalCaseError(
                "solve_isoperimetric: the candidate is an extremal of the constraint functional; "
                "the normal multiplier rule does not apply");
    };

    double lam_a = 0.0;
    InnerResult inner = inner_solve(lam_a);
    double d_a = defect();
    double lambda = lam_a;
    double d_cur = d_a;

    if (std::abs(d_a) > tol) {
        check_abnormal(d_a);
        double lam_b = 1.0;
        inner = inner_solve(lam_b);
        double d_b = defect();
        lambda = lam_b;
        d_cur = d_b;
        for (int k = 0; k < 30 && std::abs(d_cur) > tol; ++k) {
            if (d_b == d_a) {
                check_abnormal(d_cur);
                throw StalledError("solve_isoperimetric: constraint defect is insensitive to the multiplier");
            }
            const double lam_new = lam_b - d_b * (lam_b - lam_a) / (d_b - d_a);
            lam_a = lam_b;
            d_a = d_b;
            lam_b = lam_new;
            inner = inner_solve(lam_b);
            d_b = defect();
            lambda = lam_b;
            d_cur = d_b;
            check_abnormal(d_cur);
        }
    }

    SolveResult out;
    out.y = GridFunction(prob.a, prob.b, y.array());
    out.lambda = lambda;
    out.el_residual = inner.grad_norm;
    out.constraint_residual = std::abs(d_cur);
    out.objective = model.integral(prob.F, y);
    out.iterations = total_iterations;
    out.converged = inner.converged && std::abs(d_cur) <= tol;
    return out;
}

IdentityReport coherence_check(const Kernel& kernel, double p, const Lagrangian& F,
                               const GridFunction& y, const OperatorConfig& cfg, double tol) {
    const ParamSet P{y.a, y.b, p, -p};
    const GridFunction w = k_op(P, kernel, y, cfg);

    // the reduced form depends on (t, y, w) only: the u and v slots must be dead
    for (Eigen::Index i = 0; i < y.values.size(); i += std::max<Eigen::Index>(1, y.n() / 16)) {
        const double t = y.node(i);
        if (std::abs(F.d3(t, y.values[i], 0.3, -0.7, w.values[i])) > 1e-12 ||
            std::abs(F.d4(t, y.values[i], 0.3, -0.7, w.values[i])) > 1e-12)
            throw HypothesisViolationError(
                "coherence_check: the integrand must not depend on the u or v slot");
    }

    Eigen::ArrayXd d2(y.values.size()), d5(y.values.size());
    for (Eigen::Index i = 0; i < y.values.size(); ++i) {
        const double t = y.node(i);
        d2[i] = F.d2(t, y.values[i], 0.0, 0.0, w.values[i]);
        d5[i] = F.d5(t, y.values[i], 0.0, 0.0, w.values[i]);
    }
    const GridFunction field5(y.a, y.b, d5);
    const GridFunction Kp = k_op(P, kernel, field5, cfg);
    const GridFunction Kps = k_op(dual(P), kernel, field5, cfg);

    // direct embedding: d2 - K_P d5 ; least action: d2 + K_{P*} d5
    double worst = 0.0;
    for (Eigen::Index i = 0; i < y.values.size(); ++i) {
        const double direct = d2[i] - Kp.values[i];
        const double least_action = d2[i] + Kps.values[i];
        worst = std::max(worst, std::abs(direct - least_action));
    }

    IdentityReport rep;
    rep.name = "coherence";
    rep.grid_n = static_cast<int>(y.n());
    rep.residual = worst;
    rep.apply_tolerance(tol);
    return rep;
}

} // namespace genfrac
