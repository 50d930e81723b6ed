#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "nonloc/assemble.hpp"
#include "nonloc/errors.hpp"
#include "nonloc/problem.hpp"

namespace nonloc {

struct SolveInfo {
    double residual_inf = 0.0;
    double condition_estimate = 0.0;
    std::vector<int> frozen_cells;  // global indices of decoupled cells pinned to zero
};

namespace detail {

// LU of the interior block with decoupled rows replaced by identity rows
// (their value is pinned to zero and flagged non-physical).
struct LinearCore {
    std::shared_ptr<const Mesh> mesh;
    AssembledOperator op;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    double condition_estimate = 0.0;
    std::vector<int> frozen;  // omega-local

    explicit LinearCore(const ProblemSpec& p, std::shared_ptr<const Mesh> m)
        : mesh(m), op(assemble(p.kernel, m)) {
        Eigen::MatrixXd A = op.A;
        frozen = op.decoupled;
        const double scale = op.row_mass.maxCoeff();
        for (int i : frozen) {
            A.row(i).setZero();
            A(i, i) = scale;
        }
        lu.compute(A);
        const Eigen::VectorXd d = lu.matrixLU().diagonal().cwiseAbs();
        const double dmin = d.minCoeff(), dmax = d.maxCoeff();
        condition_estimate = dmin > 0.0 ? dmax / dmin : std::numeric_limits<double>::infinity();
        if (!(condition_estimate < 1e12))
            throw NumericError("linear solve: matrix is singular or ill-conditioned "
                               "(condition estimate " + std::to_string(condition_estimate) +
                               ", smallest pivot " + std::to_string(dmin) + ")");
    }

    // solve A u = f_Omega - B g_Gamma and return the field glued to g
    Field solve(const Field& f, const Field& g, SolveInfo* info) const {
        const int n0 = mesh->omega_begin(), n = mesh->omega_cells();
        Eigen::VectorXd g_gamma(mesh->gamma_cells());
        for (int i = 0; i < mesh->cells(); ++i)
            if (!mesh->in_omega(i)) g_gamma[op.gamma_local(i)] = g[i];
        Eigen::VectorXd rhs = f.values().segment(n0, n) - op.B * g_gamma;
        for (int i : frozen) rhs[i] = 0.0;
        Eigen::VectorXd u_omega = lu.solve(rhs);

        Field u = g;
        u.values().segment(n0, n) = u_omega;
        if (info) {
            // residual of the unmodified discrete equation on live rows
            Eigen::VectorXd r = op.A * u_omega + op.B * g_gamma - f.values().segment(n0, n);
            for (int i : frozen) r[i] = 0.0;
            info->residual_inf = r.cwiseAbs().maxCoeff();
            info->condition_estimate = condition_estimate;
            info->frozen_cells.clear();
            for (int i : frozen) info->frozen_cells.push_back(n0 + i);
        }
        if (!u.finite()) throw NumericError("linear solve: non-finite solution values");
        return u;
    }
};

}  // namespace detail

inline Field solve_linear(const ProblemSpec& p, std::shared_ptr<const Mesh> mesh,
                          SolveInfo* info = nullptr) {
    if (p.forcing.depends_on_u())
        throw ConfigError("solve_linear: forcing depends on u; use solve_semilinear");
    detail::LinearCore core(p, mesh);
    const Field f = p.sample_forcing(mesh);
    const Field g = p.sample_collar(mesh);
    SolveInfo local;
    Field u = core.solve(f, g, &local);
    const double fmax = f.values().cwiseAbs().maxCoeff();
    if (local.residual_inf >= 1e-9 * (1.0 + fmax))
        throw NumericError("linear solve: residual " + std::to_string(local.residual_inf) +
                           " exceeds contract");
    if (info) *info = local;
    return u;
}

enum class SemilinearMethod { automatic, picard, newton };

struct SemilinearResult {
    Field u;
    int iterations = 0;
    std::vector<double> increments;  // sup-norm of successive updates
    SemilinearMethod used = SemilinearMethod::picard;
    std::vector<std::string> warnings;
};

// Picard iteration u^{k+1} = L^{-1} f(., u^k); one factorization, many
// backsolves. Falls back to (damped-free) Newton when the increments grow,
// which happens outside the contraction regime.
inline SemilinearResult solve_semilinear(const ProblemSpec& p,
                                         std::shared_ptr<const Mesh> mesh,
                                         double tol = 1e-10, int max_iter = 500,
                                         SemilinearMethod method = SemilinearMethod::automatic,
                                         double contraction_bound = -1.0) {
    detail::LinearCore core(p, mesh);
    const Field g = p.sample_collar(mesh);
    SemilinearResult res;
    res.u = g;
    if (contraction_bound >= 1.0)
        res.warnings.push_back("contraction bound C_P * L = " +
                               std::to_string(contraction_bound) +
                               " >= 1; Picard convergence is not certified");

    enum class Outcome { converged, diverged, exhausted };
    auto picard = [&](Field u0, int budget, bool allow_divergence_exit) -> Outcome {
        Field u = std::move(u0);
        int grew = 0;
        res.increments.clear();
        res.iterations = 0;
        for (int k = 0; k < budget; ++k) {
            Field f = p.sample_forcing(mesh, &u);
            if (!f.finite()) throw NumericError("semilinear solve: forcing produced NaN");
            Field next = core.solve(f, g, nullptr);
            const double inc = (next.values() - u.values()).cwiseAbs().maxCoeff();
            res.increments.push_back(inc);
            ++res.iterations;
            u = std::move(next);
            if (inc < tol) {
                res.u = std::move(u);
                return Outcome::converged;
            }
            const size_t m = res.increments.size();
            if (m >= 2 && res.increments[m - 1] > res.increments[m - 2]) {
                if (allow_divergence_exit && (++grew >= 3 || inc > 1e8))
                    return Outcome::diverged;
            } else {
                grew = 0;
            }
        }
        return Outcome::exhausted;
    };

    auto newton = [&]() {
        const int n0 = mesh->omega_begin(), n = mesh->omega_cells();
        Eigen::VectorXd g_gamma(mesh->gamma_cells());
        for (int i = 0; i < mesh->cells(); ++i)
            if (!mesh->in_omega(i)) g_gamma[core.op.gamma_local(i)] = g[i];
        Field u = g;
        for (int k = 0; k < max_iter; ++k) {
            Field f = p.sample_forcing(mesh, &u);
            if (!f.finite()) throw NumericError("semilinear solve: forcing produced NaN");
            Eigen::VectorXd resid = core.op.A * u.values().segment(n0, n) +
                                    core.op.B * g_gamma - f.values().segment(n0, n);
            Eigen::MatrixXd J = core.op.A;
            for (int i = 0; i < n; ++i)
                J(i, i) -= p.forcing.du(mesh->midpoint(n0 + i), u[n0 + i]);
            for (int i : core.frozen) {
                J.row(i).setZero();
                J(i, i) = 1.0;
                resid[i] = u[n0 + i];
            }
            Eigen::VectorXd step = J.partialPivLu().solve(resid);
            u.values().segment(n0, n) -= step;
            const double inc = step.cwiseAbs().maxCoeff();
            res.increments.push_back(inc);
            ++res.iterations;
            if (inc < tol) {
                res.u = std::move(u);
                return;
            }
        }
        throw NumericError("semilinear solve: Newton did not converge within " +
                           std::to_string(max_iter) + " iterations");
    };

    auto fail_exhausted = [&]() -> void {
        throw NumericError("semilinear solve: did not converge within " +
                           std::to_string(max_iter) + " iterations (last increment " +
                           std::to_string(res.increments.empty() ? 0.0
                                                                 : res.increments.back()) +
                           ")");
    };

    if (method == SemilinearMethod::newton) {
        res.used = SemilinearMethod::newton;
        newton();
        return res;
    }
    if (!p.forcing.depends_on_u()) {
        // u-independent forcing: the first Picard step is already the solution
        Field f = p.sample_forcing(mesh);
        Field u = core.solve(f, g, nullptr);
        res.increments.push_back((u.values() - g.values()).cwiseAbs().maxCoeff());
        res.iterations = 1;
        res.u = std::move(u);
        res.used = SemilinearMethod::picard;
        return res;
    }
    if (method == SemilinearMethod::picard) {
        res.used = SemilinearMethod::picard;
        if (picard(g, max_iter, false) != Outcome::converged) fail_exhausted();
        return res;
    }
    res.used = SemilinearMethod::picard;
    switch (picard(g, max_iter, true)) {
        case Outcome::converged:
            return res;
        case Outcome::exhausted:
            fail_exhausted();
            return res;
        case Outcome::diverged:
            break;
    }
    res.warnings.push_back("Picard iteration diverged; switched to Newton");
    res.increments.clear();
    res.iterations = 0;
    res.used = SemilinearMethod::newton;
    newton();
    return res;
}

// Strictly monotone substitution h with a user-supplied inverse on `range`.
struct MonotoneMap {
    std::function<double(double)> h;
    std::function<double(double)> h_inv;
    Interval range;  // invertible range of h (values of h)
    std::string name = "h";
};

inline MonotoneMap sine_map() {
    return {[](double z) { return std::sin(z); },
            [](double v) { return std::asin(v); },
            {-1.0, 1.0},
            "sin"};
}

inline MonotoneMap identity_map() {
    return {[](double z) { return z; },
            [](double v) { return v; },
            {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
            "identity"};
}

// Solve int (h(u(y)) - h(u(x))) mu dy = f by substituting v = h(u): the
// problem is linear in v with collar h(g); u = h^{-1}(v) afterwards.
inline Field solve_with_nonlinearity_in_operator(const ProblemSpec& p, const MonotoneMap& map,
                                                 std::shared_ptr<const Mesh> mesh,
                                                 SolveInfo* info = nullptr) {
    if (p.forcing.depends_on_u())
        throw ConfigError("operator substitution requires u-independent forcing");
    detail::LinearCore core(p, mesh);
    Field g = p.sample_collar(mesh);
    Field hg = g;
    for (int i = 0; i < mesh->cells(); ++i)
        if (!mesh->in_omega(i)) hg[i] = map.h(g[i]);
    const Field f = p.sample_forcing(mesh);
    Field v = core.solve(f, hg, info);

    std::string offenders;
    int bad = 0;
    Field u = v;
    for (int i = 0; i < mesh->cells(); ++i) {
        if (v[i] < map.range.lo || v[i] > map.range.hi) {
            if (++bad <= 8)
                offenders += (offenders.empty() ? "" : ", ") + std::to_string(i);
            continue;
        }
        u[i] = mesh->in_omega(i) ? map.h_inv(v[i]) : g[i];
    }
    if (bad > 0)
        throw NumericError("operator substitution: " + std::to_string(bad) +
                           " cell(s) left the invertible range of " + map.name +
                           " (cells " + offenders + (bad > 8 ? ", ..." : "") + ")");
    return u;
}

}  // namespace nonloc
