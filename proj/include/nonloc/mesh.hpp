#pragma once

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <vector>

#include "nonloc/errors.hpp"
#include "nonloc/interval.hpp"

namespace nonloc {

// Uniform mesh of equal-width cells tiling Omega u Gamma, aligned so that
// a-delta, a, b and b+delta are all cell edges. The requested width is
// snapped to |Omega|/round(|Omega|/h); delta must then be an integer number
// of cells as well.
class Mesh {
public:
    static std::shared_ptr<const Mesh> build(const DomainSpec& dom, double target_h) {
        if (!(target_h > 0.0)) throw ConfigError("mesh: h must be positive");
        if (target_h >= dom.delta)
            throw ConfigError("mesh: h must be smaller than delta (collar needs at least one cell)");
        const double len = dom.omega.length();
        const int n_omega = std::max(1, (int)std::lround(len / target_h));
        const double h = len / n_omega;
        const double cells_per_collar = dom.delta / h;
        const int n_collar = (int)std::lround(cells_per_collar);
        if (n_collar < 1 || std::abs(cells_per_collar - n_collar) > 1e-9 * cells_per_collar)
            throw ConfigError("mesh: delta must be an integer multiple of the snapped cell width");
        return std::shared_ptr<const Mesh>(new Mesh(dom, h, n_collar, n_omega));
    }

    const DomainSpec& domain() const { return dom_; }
    double h() const { return h_; }
    int cells() const { return n_left_ + n_omega_ + n_right_; }
    int omega_cells() const { return n_omega_; }
    int gamma_cells() const { return n_left_ + n_right_; }
    int collar_cells_per_side() const { return n_left_; }
    int omega_begin() const { return n_left_; }
    int omega_end() const { return n_left_ + n_omega_; }
    // number of cells spanned by one horizon
    int horizon_cells() const { return n_left_; }

    double edge(int i) const { return dom_.omega.lo + (i - n_left_) * h_; }
    double midpoint(int i) const { return dom_.omega.lo + (i - n_left_ + 0.5) * h_; }
    Interval cell(int i) const { return {edge(i), edge(i + 1)}; }
    bool in_omega(int i) const { return i >= n_left_ && i < n_left_ + n_omega_; }

private:
    Mesh(const DomainSpec& dom, double h, int n_collar, int n_omega)
        : dom_(dom), h_(h), n_left_(n_collar), n_omega_(n_omega), n_right_(n_collar) {}

    DomainSpec dom_;
    double h_;
    int n_left_, n_omega_, n_right_;
};

enum class Region { omega, gamma, all };

// Piecewise-constant function on a mesh: one value per cell.
class Field {
public:
    Field() = default;
    explicit Field(std::shared_ptr<const Mesh> mesh)
        : mesh_(std::move(mesh)), v_(Eigen::VectorXd::Zero(mesh_->cells())) {}
    Field(std::shared_ptr<const Mesh> mesh, Eigen::VectorXd v)
        : mesh_(std::move(mesh)), v_(std::move(v)) {
        if (v_.size() != mesh_->cells())
            throw ConfigError("field: value count must equal cell count");
    }

    static Field sample(std::shared_ptr<const Mesh> mesh,
                        const std::function<double(double)>& f) {
        Field out(mesh);
        for (int i = 0; i < mesh->cells(); ++i) out.v_[i] = f(mesh->midpoint(i));
        return out;
    }

    const Mesh& mesh() const { return *mesh_; }
    std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
    Eigen::VectorXd& values() { return v_; }
    const Eigen::VectorXd& values() const { return v_; }
    double operator[](int i) const { return v_[i]; }
    double& operator[](int i) { return v_[i]; }

    bool finite() const { return v_.allFinite(); }

    Field operator-(const Field& other) const {
        Field out(mesh_);
        out.v_ = v_ - other.v_;
        return out;
    }

private:
    std::shared_ptr<const Mesh> mesh_;
    Eigen::VectorXd v_;
};

// Exact L^p norm of the piecewise-constant representative; p may be
// infinity. Region selects Omega cells, Gamma cells, or all of them.
inline double field_norm(const Field& u, Region region, double p) {
    const Mesh& m = u.mesh();
    const bool inf_norm = std::isinf(p);
    double acc = 0.0;
    for (int i = 0; i < m.cells(); ++i) {
        const bool om = m.in_omega(i);
        if (region == Region::omega && !om) continue;
        if (region == Region::gamma && om) continue;
        const double a = std::abs(u[i]);
        if (inf_norm)
            acc = std::max(acc, a);
        else
            acc += m.h() * std::pow(a, p);
    }
    return inf_norm ? acc : std::pow(acc, 1.0 / p);
}

inline double l2_omega(const Field& u) { return field_norm(u, Region::omega, 2.0); }

// CSV export: one row per cell, columns midpoint and value.
inline void write_profile_csv(std::ostream& os, const Field& u) {
    os << "x,u\n";
    char buf[80];
    for (int i = 0; i < u.mesh().cells(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g\n", u.mesh().midpoint(i), u[i]);
        os << buf;
    }
}

}  // namespace nonloc
