#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <vector>

#include "nonloc/errors.hpp"
#include "nonloc/kernels.hpp"
#include "nonloc/mesh.hpp"
#include "nonloc/quadrature.hpp"

namespace nonloc {

namespace detail {

// For translation-invariant kernels the cell-pair integral reduces to a 1-D
// integral of the profile against a hat weight:
//   int int_{c_i x c_j} rho(|x-y|) chi dy dx = int w(t) rho(t) dt
// with w(t) = h - |t - dh| for cell offset d >= 1 and w(t) = 2(h - t) on
// [0, h] for the diagonal. Integration is cut at t = delta, which handles
// horizon-edge pairs exactly.

// int (alpha + beta t) rho(t) dt over [t0, t1] for one linear weight piece
inline double weighted_profile_piece(const KernelSpec& k, double alpha, double beta,
                                     double t0, double t1) {
    if (t1 <= t0) return 0.0;
    if (const auto* c = std::get_if<ConstantKernel>(&k.family())) {
        return c->value * (alpha * (t1 - t0) + 0.5 * beta * (t1 * t1 - t0 * t0));
    }
    if (const auto* p = std::get_if<PowerLawKernel>(&k.family())) {
        const double e = p->exponent;
        auto F = [&](double t) {
            if (t == 0.0) return 0.0;
            return alpha * std::pow(t, 1.0 - e) / (1.0 - e) +
                   beta * std::pow(t, 2.0 - e) / (2.0 - e);
        };
        return p->amplitude * (F(t1) - F(t0));
    }
    if (const auto* g = std::get_if<TruncatedGaussianKernel>(&k.family())) {
        auto f = [&](double t) { return (alpha + beta * t) * g->normalizer * std::exp(-t * t); };
        return quad::fixed(f, t0, t1);
    }
    throw NumericError("weighted_profile_piece: unsupported family");
}

inline double pair_integral_invariant(const KernelSpec& k, double h, int d) {
    const double delta = k.delta();
    if (d == 0) {
        const double hi = std::min(h, delta);
        return weighted_profile_piece(k, 2.0 * h, -2.0, 0.0, hi);
    }
    const double c = d * h;
    double acc = 0.0;
    // rising piece on [(d-1)h, dh]: w = h - (c - t)
    acc += weighted_profile_piece(k, h - c, 1.0, c - h, std::min(c, delta));
    // falling piece on [dh, (d+1)h]: w = h - (t - c)
    if (delta > c)
        acc += weighted_profile_piece(k, h + c, -1.0, c, std::min(c + h, delta));
    return acc;
}

inline bool cell_inside(const Interval& cell, const Interval& region) {
    const double tol = 1e-9 * std::max(1.0, cell.length());
    return cell.lo >= region.lo - tol && cell.hi <= region.hi + tol;
}

inline void check_excision_alignment(const Interval& excised, const Mesh& mesh) {
    for (double e : {excised.lo, excised.hi}) {
        const double t = (e - mesh.edge(0)) / mesh.h();
        if (std::abs(t - std::lround(t)) > 1e-9)
            throw ConfigError("bond removal: excised interval must align with cell edges");
    }
}

}  // namespace detail

// Quadrature of mu over the cell pair, scaled by 1/h (collocation weight):
//   k_ij = (1/h) int_{c_i} int_{c_j} mu(x, y) chi_{|x-y|<delta} dy dx.
// Exact closed forms for constant and power-law families; fixed Gauss in the
// outer variable with an analytic inner slice otherwise.
inline double cell_pair_coupling(const KernelSpec& k, const Mesh& mesh, int i, int j) {
    const int d = std::abs(i - j);
    if (d > mesh.horizon_cells()) return 0.0;
    const double h = mesh.h();

    if (const auto* br = k.bond_removal_family()) {
        detail::check_excision_alignment(br->excised, mesh);
        const bool iin = br->excised.contains(mesh.midpoint(i));
        const bool jin = br->excised.contains(mesh.midpoint(j));
        const bool removed = br->cross_only ? (iin != jin) : (iin || jin);
        if (removed) return 0.0;
        return cell_pair_coupling(*br->base, mesh, i, j);
    }
    if (k.translation_invariant())
        return detail::pair_integral_invariant(k, h, d) / h;

    const Interval ci = mesh.cell(i), cj = mesh.cell(j);
    if (std::holds_alternative<HeterogeneousExpKernel>(k.family())) {
        auto f = [&](double x) { return k.slice_y(x, cj); };
        return quad::fixed(f, ci.lo, ci.hi, quad::rule10()) / h;
    }
    auto f = [&](double x) { return k.slice_y(x, cj); };
    return quad::adaptive(f, ci.lo, ci.hi, 1e-10 * h).value / h;
}

// Discrete nonlocal Laplacian restricted to Omega rows, split into the
// interior block A and the collar coupling B:
//   (L_h u)_i = (A u_Omega + B u_Gamma)_i ~ L_mu u (x_i).
// The diagonal carries minus the total off-diagonal mass, so the operator
// annihilates constants identically.
struct AssembledOperator {
    std::shared_ptr<const Mesh> mesh;
    Eigen::MatrixXd A;         // omega x omega
    Eigen::MatrixXd B;         // omega x gamma
    Eigen::VectorXd row_mass;  // total off-diagonal coupling per omega row
    std::vector<int> decoupled;  // omega-local rows with vanishing coupling

    int gamma_local(int g) const {
        return g < mesh->omega_begin() ? g : g - mesh->omega_cells();
    }
    int gamma_global(int gl) const {
        return gl < mesh->omega_begin() ? gl : gl + mesh->omega_cells();
    }

    double row_sum_residual() const {
        const Eigen::VectorXd r = A.rowwise().sum() + B.rowwise().sum();
        return r.cwiseAbs().maxCoeff();
    }
};

inline AssembledOperator assemble(const KernelSpec& k, std::shared_ptr<const Mesh> mesh) {
    if (std::abs(k.delta() - mesh->domain().delta) > 1e-12 * k.delta())
        throw ConfigError("assemble: kernel horizon must equal the domain delta");
    AssembledOperator op;
    op.mesh = mesh;
    const int n = mesh->omega_cells(), ng = mesh->gamma_cells();
    op.A = Eigen::MatrixXd::Zero(n, n);
    op.B = Eigen::MatrixXd::Zero(n, ng);
    op.row_mass = Eigen::VectorXd::Zero(n);
    const int w = mesh->horizon_cells();
    for (int gi = mesh->omega_begin(); gi < mesh->omega_end(); ++gi) {
        const int il = gi - mesh->omega_begin();
        double mass = 0.0;
        for (int gj = std::max(0, gi - w); gj < std::min(mesh->cells(), gi + w + 1); ++gj) {
            if (gj == gi) continue;
            const double kij = cell_pair_coupling(k, *mesh, gi, gj);
            if (kij == 0.0) continue;
            mass += kij;
            if (mesh->in_omega(gj))
                op.A(il, gj - mesh->omega_begin()) += kij;
            else
                op.B(il, op.gamma_local(gj)) += kij;
        }
        op.A(il, il) = -mass;
        op.row_mass[il] = mass;
    }
    const double max_mass = op.row_mass.maxCoeff();
    for (int i = 0; i < n; ++i)
        if (op.row_mass[i] <= 1e-12 * max_mass) op.decoupled.push_back(i);
    return op;
}

// Coupling matrix over all cell pairs (zero diagonal), treating the kernel
// as restricted to (Omega u Gamma)^2. Used by the identity audits and by
// applications of the operator to collar data.
struct FullOperator {
    std::shared_ptr<const Mesh> mesh;
    Eigen::MatrixXd K;         // cells x cells, zero diagonal
    Eigen::VectorXd row_sum;

    Field apply(const Field& u) const {
        Field out(mesh);
        out.values() = K * u.values() - row_sum.cwiseProduct(u.values());
        return out;
    }
};

inline FullOperator assemble_full(const KernelSpec& k, std::shared_ptr<const Mesh> mesh) {
    FullOperator op;
    op.mesh = mesh;
    const int n = mesh->cells(), w = mesh->horizon_cells();
    op.K = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = std::max(0, i - w); j < std::min(n, i + w + 1); ++j) {
            if (j == i) continue;
            op.K(i, j) = cell_pair_coupling(k, *mesh, i, j);
        }
    op.row_sum = op.K.rowwise().sum();
    return op;
}

}  // namespace nonloc
