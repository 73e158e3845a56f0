#include "genfrac/grid.hpp"

#include <algorithm>
#include <cmath>

namespace genfrac {

GridFunction::GridFunction(double a_, double b_, Eigen::ArrayXd v)
    : a(a_), b(b_), values(std::move(v)) {
    if (!(a < b)) throw InvalidDomainError("GridFunction: requires a < b");
    if (values.size() < 2) throw InvalidDomainError("GridFunction: needs at least two nodes");
    if (!values.allFinite()) throw NumericalOverflowError("GridFunction: non-finite nodal value");
}

Eigen::ArrayXd GridFunction::nodes() const {
    return Eigen::ArrayXd::LinSpaced(values.size(), a, b);
}

double GridFunction::interpolate(double t) const {
    const double h = step();
    double x = (t - a) / h;
    auto nn = n();
    Eigen::Index j = static_cast<Eigen::Index>(std::floor(x));
    j = std::clamp<Eigen::Index>(j, 0, nn - 1);
    const double w = x - static_cast<double>(j);
    return values[j] * (1.0 - w) + values[j + 1] * w;
}

GridFunction GridFunction::sample(double a, double b, Eigen::Index n,
                                  const std::function<double(double)>& f) {
    if (!(a < b)) throw InvalidDomainError("sample: requires a < b");
    Eigen::ArrayXd v(n + 1);
    const double h = (b - a) / static_cast<double>(n);
    for (Eigen::Index i = 0; i <= n; ++i) v[i] = f(a + static_cast<double>(i) * h);
    return GridFunction(a, b, std::move(v));
}

GridFunction GridFunction::zeros(double a, double b, Eigen::Index n) {
    return GridFunction(a, b, Eigen::ArrayXd::Zero(n + 1));
}

GridFunction GridFunction::constant(double a, double b, Eigen::Index n, double c) {
    return GridFunction(a, b, Eigen::ArrayXd::Constant(n + 1, c));
}

GridFunction derivative(const GridFunction& f, DerivativeScheme scheme) {
    const auto n = f.n();
    const double h = f.step();
    Eigen::ArrayXd d(n + 1);
    for (Eigen::Index i = 1; i < n; ++i) d[i] = (f.values[i + 1] - f.values[i - 1]) / (2.0 * h);
    if (scheme == DerivativeScheme::OneSided2AtEnds && n >= 2) {
        d[0] = (-3.0 * f.values[0] + 4.0 * f.values[1] - f.values[2]) / (2.0 * h);
        d[n] = (3.0 * f.values[n] - 4.0 * f.values[n - 1] + f.values[n - 2]) / (2.0 * h);
    } else {
        d[0] = (f.values[1] - f.values[0]) / h;
        d[n] = (f.values[n] - f.values[n - 1]) / h;
    }
    return GridFunction(f.a, f.b, std::move(d));
}

Eigen::MatrixXd derivative_matrix(Eigen::Index n, double h, DerivativeScheme scheme) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (Eigen::Index i = 1; i < n; ++i) {
        D(i, i - 1) = -1.0 / (2.0 * h);
        D(i, i + 1) = 1.0 / (2.0 * h);
    }
    if (scheme == DerivativeScheme::OneSided2AtEnds && n >= 2) {
        D(0, 0) = -3.0 / (2.0 * h);
        D(0, 1) = 4.0 / (2.0 * h);
        D(0, 2) = -1.0 / (2.0 * h);
        D(n, n) = 3.0 / (2.0 * h);
        D(n, n - 1) = -4.0 / (2.0 * h);
        D(n, n - 2) = 1.0 / (2.0 * h);
    } else {
        D(0, 0) = -1.0 / h;
        D(0, 1) = 1.0 / h;
        D(n, n) = 1.0 / h;
        D(n, n - 1) = -1.0 / h;
    }
    return D;
}

double trapezoid(const GridFunction& f) {
    const double h = f.step();
    const auto n = f.n();
    double s = 0.5 * (f.values[0] + f.values[n]);
    for (Eigen::Index i = 1; i < n; ++i) s += f.values[i];
    return s * h;
}

GridFunction fill_masked(const GridFunction& f, const NodeMask& mask) {
    if (mask.empty()) return f;
    const auto n = f.n();
    std::vector<Eigen::Index> good;
    good.reserve(n + 1);
    for (Eigen::Index i = 0; i <= n; ++i)
        if (!mask[static_cast<std::size_t>(i)]) good.push_back(i);
    if (good.size() < 3)
        throw QuadratureFailureError("fill_masked: fewer than three trusted nodes");
    GridFunction out = f;
    for (Eigen::Index i = 0; i <= n; ++i) {
        if (!mask[static_cast<std::size_t>(i)]) continue;
        // three nearest unmasked nodes, quadratic Lagrange extrapolation
        std::vector<Eigen::Index> near = good;
        std::partial_sort(near.begin(), near.begin() + 3, near.end(),
                          [i](Eigen::Index l, Eigen::Index r) {
                              return std::abs(l - i) < std::abs(r - i);
                          });
        near.resize(3);
        const double ti = f.node(i);
        double acc = 0.0;
        for (int m = 0; m < 3; ++m) {
            double w = 1.0;
            for (int l = 0; l < 3; ++l) {
                if (l == m) continue;
                w *= (ti - f.node(near[l])) / (f.node(near[m]) - f.node(near[l]));
            }
            acc += w * f.values[near[m]];
        }
        out.values[i] = acc;
    }
    return out;
}

double masked_trapezoid(const GridFunction& f, const NodeMask& mask) {
    if (mask.empty()) return trapezoid(f);
    return trapezoid(fill_masked(f, mask));
}

double l2_norm(const GridFunction& f) {
    const double h = f.step();
    const auto n = f.n();
    double s = 0.5 * (f.values[0] * f.values[0] + f.values[n] * f.values[n]);
    for (Eigen::Index i = 1; i < n; ++i) s += f.values[i] * f.values[i];
    return std::sqrt(s * h);
}

double max_norm(const GridFunction& f) { return f.values.abs().maxCoeff(); }

double masked_max_diff(const GridFunction& f, const GridFunction& g, const NodeMask& mask) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < f.values.size(); ++i) {
        if (!mask.empty() && mask[static_cast<std::size_t>(i)]) continue;
        m = std::max(m, std::abs(f.values[i] - g.values[i]));
    }
    return m;
}

GridFunction restrict_to_coarse(const GridFunction& fine, int factor) {
    const auto nf = fine.n();
    if (nf % factor != 0) throw PreconditionError("restrict_to_coarse: incompatible factor");
    const auto nc = nf / factor;
    Eigen::ArrayXd v(nc + 1);
    for (Eigen::Index i = 0; i <= nc; ++i) v[i] = fine.values[i * factor];
    return GridFunction(fine.a, fine.b, std::move(v));
}

GridFunction refine_linear(const GridFunction& f, int factor) {
    const auto n = f.n();
    const auto nr = n * factor;
    Eigen::ArrayXd v(nr + 1);
    for (Eigen::Index i = 0; i <= nr; ++i) {
        const Eigen::Index j = i / factor;
        const Eigen::Index r = i % factor;
        if (r == 0) {
            v[i] = f.values[j];
        } else {
            const double w = static_cast<double>(r) / factor;
            v[i] = f.values[j] * (1.0 - w) + f.values[j + 1] * w;
        }
    }
    return GridFunction(f.a, f.b, std::move(v));
}

} // namespace genfrac
