#include "pexstab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pexstab/error.hpp"
#include "pexstab/parallel.hpp"

namespace pexstab {
namespace {

int poly_unknowns(int d) { return 1 + d + d * (d + 1) / 2; }

Eigen::VectorXd monomials(const Point& z) {
    const int d = static_cast<int>(z.size());
    Eigen::VectorXd m(poly_unknowns(d));
    m[0] = 1.0;
    for (int i = 0; i < d; ++i) m[1 + i] = static_cast<double>(z[static_cast<std::size_t>(i)]);
    int idx = 1 + d;
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j)
            m[idx++] = static_cast<double>(z[static_cast<std::size_t>(i)]) * static_cast<double>(z[static_cast<std::size_t>(j)]);
    return m;
}

std::vector<Point> grid_points(int dim) {
    std::vector<Point> out;
    std::size_t total = 1;
    for (int i = 0; i < dim; ++i) total *= 3;
    for (std::size_t t = 0; t < total; ++t) {
        Point p(static_cast<std::size_t>(dim));
        std::size_t rest = t;
        for (int i = 0; i < dim; ++i) {
            p[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(rest % 3) - 1;
            rest /= 3;
        }
        out.push_back(std::move(p));
    }
    return out;
}

FuncRep poly_from_coefficients(const Carrier& c, const Eigen::VectorXd& v) {
    const int d = c.dim();
    PolyPlusTable t;
    t.constant = Value::Constant(1, v[0]);
    t.linear = Eigen::MatrixXd(1, d);
    for (int i = 0; i < d; ++i) t.linear(0, i) = v[1 + i];
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
    int idx = 1 + d;
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            if (i == j) {
                a(i, i) = v[idx];
            } else {
                a(i, j) = 0.5 * v[idx];
                a(j, i) = 0.5 * v[idx];
            }
            ++idx;
        }
    t.quadratic = {a};
    return FuncRep::poly(c, std::move(t));
}

FuncRep dense_from_vector(const Carrier& c, const Eigen::VectorXd& v) {
    std::vector<Value> vals;
    vals.reserve(c.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) vals.push_back(Value::Constant(1, v[i]));
    return FuncRep::dense(c, std::move(vals));
}

enum class Law { Quadratic, Jensen };

// Rows: 1/|K| sum_k u(x + k.y) - u(x) [- u(y)], optionally followed by the
// side-condition rows 1/|K| sum_k u(k.x).
Eigen::MatrixXd build_constraints(const GroupK& group, Law law, bool side) {
    const Carrier& c = group.carrier();
    const double inv = 1.0 / static_cast<double>(group.order());
    std::vector<Eigen::VectorXd> rows;

    if (c.is_modular()) {
        const auto& pts = c.points();
        const auto n = static_cast<Eigen::Index>(pts.size());
        for (const auto& x : pts)
            for (const auto& y : pts) {
                Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
                for (const auto& k : group.elements())
                    row[static_cast<Eigen::Index>(*c.index_of(c.add(x, act(k, y, c))))] += inv;
                row[static_cast<Eigen::Index>(*c.index_of(x))] -= 1.0;
                if (law == Law::Quadratic) row[static_cast<Eigen::Index>(*c.index_of(y))] -= 1.0;
                rows.push_back(std::move(row));
            }
        if (side)
            for (const auto& x : pts) {
                Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
                for (const auto& k : group.elements()) row[static_cast<Eigen::Index>(*c.index_of(act(k, x, c)))] += inv;
                rows.push_back(std::move(row));
            }
    } else {
        const int d = c.dim();
        for (const auto& xy : grid_points(2 * d)) {
            const Point x(xy.begin(), xy.begin() + d);
            const Point y(xy.begin() + d, xy.end());
            Eigen::VectorXd row = Eigen::VectorXd::Zero(poly_unknowns(d));
            for (const auto& k : group.elements()) row += inv * monomials(c.add(x, act(k, y, c)));
            row -= monomials(x);
            if (law == Law::Quadratic) row -= monomials(y);
            rows.push_back(std::move(row));
        }
        if (side)
            for (const auto& x : grid_points(d)) {
                Eigen::VectorXd row = Eigen::VectorXd::Zero(poly_unknowns(d));
                for (const auto& k : group.elements()) row += inv * monomials(act(k, x, c));
                rows.push_back(std::move(row));
            }
    }
    Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) a.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    return a;
}

SolutionBasis basis_from(const GroupK& group, const Eigen::MatrixXd& constraints) {
    const Carrier& c = group.carrier();
    const Eigen::MatrixXd kernel = nullspace(constraints);
    SolutionBasis out;
    for (Eigen::Index col = 0; col < kernel.cols(); ++col) {
        const Eigen::VectorXd v = kernel.col(col);
        out.max_residual = std::max(out.max_residual, (constraints * v).cwiseAbs().maxCoeff());
        out.elements.push_back(c.is_modular() ? dense_from_vector(c, v) : poly_from_coefficients(c, v));
    }
    return out;
}

double function_scale(const FuncRep& f, BetaParam beta) {
    double s = 1.0;
    for (const auto& x : f.carrier().points()) s = std::max(s, beta_norm(f.eval(x), beta));
    return s;
}

}  // namespace

Eigen::MatrixXd nullspace(const Eigen::MatrixXd& a, double pivot_tol) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(pivot_tol);
    const Eigen::Index dim = a.cols() - lu.rank();
    if (dim == 0) return Eigen::MatrixXd(a.cols(), 0);
    const Eigen::MatrixXd k = lu.kernel();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(k);
    return qr.householderQ() * Eigen::MatrixXd::Identity(a.cols(), dim);
}

Eigen::MatrixXd quadratic_constraints(const GroupK& group) {
    return build_constraints(group, Law::Quadratic, false);
}

Eigen::MatrixXd jensen_constraints(const GroupK& group, bool with_side_condition) {
    return build_constraints(group, Law::Jensen, with_side_condition);
}

SolutionBasis quadratic_solution_space(const GroupK& group) {
    return basis_from(group, quadratic_constraints(group));
}

SolutionBasis jensen_solution_space(const GroupK& group, bool with_side_condition) {
    return basis_from(group, jensen_constraints(group, with_side_condition));
}

PexiderTriple make_exact_triple(const FuncRep& q, const FuncRep& j, const Value& a, const Value& b,
                                const GroupK& group, BetaParam beta) {
    const Carrier& c = group.carrier();
    const auto& pts = c.points();
    const std::size_t n = pts.size();
    const double q_tol = 1e-9 * function_scale(q, beta);
    const double j_tol = 1e-9 * function_scale(j, beta);

    const auto pair_worst = [&](auto&& fn) {
        return parallel_max(n * n, [&](std::size_t i) { return fn(pts[i / n], pts[i % n]); }).value;
    };
    if (pair_worst([&](const Point& x, const Point& y) { return residual_quadratic(q, group, x, y, beta); }) > q_tol)
        throw Error(ErrorKind::LawViolation, "q does not solve the quadratic equation on the enumeration");
    if (pair_worst([&](const Point& x, const Point& y) { return residual_jensen(j, group, x, y, beta); }) > j_tol)
        throw Error(ErrorKind::LawViolation, "j does not solve the Jensen equation on the enumeration");
    for (const auto& x : pts)
        if (side_condition_defect(j, group, x, beta) > j_tol)
            throw Error(ErrorKind::LawViolation, "j violates the side condition 1/|K| sum_k j(k.x) = 0");

    FuncRep g = q + j;
    g.add_constant(a);
    FuncRep f = g;
    f.add_constant(b);
    FuncRep h = q;
    h.add_constant(b);
    PexiderTriple triple(std::move(f), std::move(g), std::move(h));

    const double tol = 1e-12 * function_scale(triple.f, beta);
    const double worst = pair_worst([&](const Point& x, const Point& y) {
        return residual_pexider(triple.f, triple.g, triple.h, group, x, y, beta);
    });
    if (worst > tol) throw Error(ErrorKind::LawViolation, "composed triple does not solve the Pexider equation");
    return triple;
}

Perturbed perturb(const PexiderTriple& triple, const GroupK& group, BetaParam beta, const PerturbOptions& options) {
    const Carrier& c = group.carrier();
    if (!(options.delta >= 0.0)) throw Error(ErrorKind::Config, "delta must be >= 0");

    std::set<std::size_t> support;
    for (const auto& x : c.points()) {
        if (point_norm(x, c) > options.support_radius) continue;
        for (const auto& y : group.orbit(x)) {
            const auto idx = c.index_of(y);
            if (!idx) throw Error(ErrorKind::Config, "noise support is not closed under K inside the window");
            support.insert(*idx);
        }
    }
    if (options.zero_at_origin) support.erase(*c.index_of(c.zero()));

    SplitMix64 rng(options.seed);
    const int r = triple.f.r();
    const auto noisy = [&](const FuncRep& base) {
        std::vector<std::pair<std::size_t, Value>> draws;
        for (auto idx : support) {
            Value v(r);
            for (int i = 0; i < r; ++i) v[i] = options.delta * (2.0 * rng.uniform() - 1.0);
            draws.emplace_back(idx, std::move(v));
        }
        if (options.delta == 0.0) return base;
        if (c.is_modular()) {
            std::vector<Value> vals = base.dense_table().values;
            for (const auto& [idx, v] : draws) vals[idx] += v;
            return FuncRep::dense(c, std::move(vals));
        }
        PolyPlusTable t;
        t.constant = Value::Zero(r);
        for (const auto& [idx, v] : draws) t.noise.emplace(c.points()[idx], v);
        return base + FuncRep::poly(c, std::move(t));
    };
    FuncRep f = options.targets.f ? noisy(triple.f) : triple.f;
    FuncRep g = options.targets.g ? noisy(triple.g) : triple.g;
    FuncRep h = options.targets.h ? noisy(triple.h) : triple.h;
    PexiderTriple out(std::move(f), std::move(g), std::move(h));

    const auto& pts = c.points();
    const std::size_t n = pts.size();
    double theta = 0.0;
    if (options.power) {
        const double p = *options.power;
        const auto worst = parallel_max(n * n, [&](std::size_t i) {
            const Point& x = pts[i / n];
            const Point& y = pts[i % n];
            const double res = residual_pexider(out.f, out.g, out.h, group, x, y, beta);
            const double shape = std::pow(point_norm(x, c), p) + std::pow(point_norm(y, c), p);
            if (shape > 0.0) return res / shape;
            return res > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        });
        if (std::isinf(worst.value))
            throw Error(ErrorKind::CertificateImpossible,
                        "residual is nonzero where the power control vanishes");
        // Headroom for the rounding in theta * shape.
        theta = std::max(worst.value, 0.0) * (1.0 + 1e-12);
        return {std::move(out), ControlFn(c, PowerControl{theta, p}), theta, theta == 0.0};
    }
    const auto worst = parallel_max(n * n, [&](std::size_t i) {
        return residual_pexider(out.f, out.g, out.h, group, pts[i / n], pts[i % n], beta);
    });
    theta = std::max(worst.value, 0.0);
    return {std::move(out), ControlFn(c, ConstantControl{theta}), theta, theta == 0.0};
}

}  // namespace pexstab
