#pragma once

#include <cmath>
#include <optional>
#include <variant>
#include <vector>

#include "nonloc/errors.hpp"
#include "nonloc/interval.hpp"
#include "nonloc/kernels.hpp"
#include "nonloc/mesh.hpp"

namespace nonloc {

// ---------------------------------------------------------------------------
// Forcing. Variants cover the shipped experiments; Polynomial and Zero are
// the general-purpose members. ArctanForcing is the only u-dependent one:
//   f(x, u) = 2 (eta atan(u) + theta) / (x^2 + 1),
// Lipschitz in u with constant 2 eta (attained at u = 0).
// ---------------------------------------------------------------------------

// 6x + 4 sin(20 eps x) below the breakpoint, 12 x^2 above; continuous at the
// breakpoint only for eps = 0.
struct SinusoidForcing {
    double eps;
    static constexpr double breakpoint = 0.5;
};

// sigmoid((x - 1/2)/eps); the eps -> 0 limit is the unit step at 1/2.
struct SigmoidForcing {
    double eps;
};

struct PolynomialForcing {
    std::vector<double> coeffs;  // c0 + c1 x + c2 x^2 + ...
};

struct ZeroForcing {};

struct ArctanForcing {
    double eta, theta;
};

class ForcingSpec {
public:
    using Variant =
        std::variant<SinusoidForcing, SigmoidForcing, PolynomialForcing, ZeroForcing,
                     ArctanForcing>;

    ForcingSpec(Variant v) : v_(std::move(v)) {
        if (const auto* a = std::get_if<ArctanForcing>(&v_)) {
            if (!(a->eta >= 0.0) || !(a->theta >= 0.0))
                throw ConfigError("forcing: arctan variant requires eta, theta >= 0");
        }
    }

    static ForcingSpec sinusoid(double eps) { return ForcingSpec(SinusoidForcing{eps}); }
    static ForcingSpec sigmoid(double eps) { return ForcingSpec(SigmoidForcing{eps}); }
    static ForcingSpec polynomial(std::vector<double> c) {
        return ForcingSpec(PolynomialForcing{std::move(c)});
    }
    static ForcingSpec zero() { return ForcingSpec(ZeroForcing{}); }
    static ForcingSpec arctan(double eta, double theta) {
        return ForcingSpec(ArctanForcing{eta, theta});
    }

    const Variant& variant() const { return v_; }

    double operator()(double x, double u = 0.0) const {
        if (const auto* s = std::get_if<SinusoidForcing>(&v_)) {
            if (x <= SinusoidForcing::breakpoint)
                return 6.0 * x + 4.0 * std::sin(20.0 * s->eps * x);
            return 12.0 * x * x;
        }
        if (const auto* s = std::get_if<SigmoidForcing>(&v_)) {
            const double t = x - 0.5;
            if (s->eps == 0.0) return t > 0.0 ? 1.0 : (t < 0.0 ? 0.0 : 0.5);
            return 1.0 / (1.0 + std::exp(-t / s->eps));
        }
        if (const auto* s = std::get_if<PolynomialForcing>(&v_)) {
            double acc = 0.0;
            for (size_t i = s->coeffs.size(); i-- > 0;) acc = acc * x + s->coeffs[i];
            return acc;
        }
        if (std::holds_alternative<ZeroForcing>(v_)) return 0.0;
        const auto& a = std::get<ArctanForcing>(v_);
        return 2.0 * (a.eta * std::atan(u) + a.theta) / (x * x + 1.0);
    }

    // d f / d u
    double du(double x, double u) const {
        if (const auto* a = std::get_if<ArctanForcing>(&v_))
            return 2.0 * a->eta / ((1.0 + u * u) * (x * x + 1.0));
        (void)x;
        (void)u;
        return 0.0;
    }

    bool depends_on_u() const {
        const auto* a = std::get_if<ArctanForcing>(&v_);
        return a && a->eta > 0.0;
    }

    double lipschitz_in_u() const {
        if (const auto* a = std::get_if<ArctanForcing>(&v_)) return 2.0 * a->eta;
        return 0.0;
    }

    // sup over x in Omega and u in R of |f2(x,u) - f1(x,u)|, in closed form
    // where the pair admits one. For two arctan forcings the sup is
    // pi |eta2 - eta1| + 2 |theta2 - theta1|, attained as u -> +-inf at x = 0.
    static std::optional<double> sup_difference(const ForcingSpec& f2,
                                                const ForcingSpec& f1) {
        const auto* a2 = std::get_if<ArctanForcing>(&f2.v_);
        const auto* a1 = std::get_if<ArctanForcing>(&f1.v_);
        if (a2 && a1)
            return M_PI * std::abs(a2->eta - a1->eta) + 2.0 * std::abs(a2->theta - a1->theta);
        return std::nullopt;
    }

private:
    Variant v_;
};

// ---------------------------------------------------------------------------
// Collar data on Gamma.
// ---------------------------------------------------------------------------

struct PolynomialPairCollar {
    std::vector<double> left, right;  // coefficients for the two collar sides
};

// 1 on (-delta, -eps); x^4 on [-eps, 0) and on the right collar. Continuous
// exactly when eps = 0 or eps = delta.
struct PiecewiseJumpCollar {
    double eps;
};

struct ZeroCollar {};

struct LinearCollar {};  // g(x) = x

class CollarData {
public:
    using Variant =
        std::variant<PolynomialPairCollar, PiecewiseJumpCollar, ZeroCollar, LinearCollar>;

    CollarData(Variant v) : v_(std::move(v)) {}

    static CollarData polynomial_pair(std::vector<double> l, std::vector<double> r) {
        return CollarData(PolynomialPairCollar{std::move(l), std::move(r)});
    }
    static CollarData piecewise_jump(double eps) {
        return CollarData(PiecewiseJumpCollar{eps});
    }
    static CollarData zero() { return CollarData(ZeroCollar{}); }
    static CollarData linear() { return CollarData(LinearCollar{}); }

    const Variant& variant() const { return v_; }

    double operator()(double x, const DomainSpec& dom) const {
        if (const auto* p = std::get_if<PolynomialPairCollar>(&v_)) {
            const auto& c = x < dom.omega.lo ? p->left : p->right;
            double acc = 0.0;
            for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
            return acc;
        }
        if (const auto* p = std::get_if<PiecewiseJumpCollar>(&v_)) {
            if (x < dom.omega.lo && x < -p->eps) return 1.0;
            return x * x * x * x;
        }
        if (std::holds_alternative<ZeroCollar>(v_)) return 0.0;
        return x;
    }

private:
    Variant v_;
};

// ---------------------------------------------------------------------------

struct ProblemSpec {
    DomainSpec domain;
    KernelSpec kernel;
    ForcingSpec forcing;
    CollarData collar;

    ProblemSpec(DomainSpec d, KernelSpec k, ForcingSpec f, CollarData g)
        : domain(d), kernel(std::move(k)), forcing(std::move(f)), collar(std::move(g)) {
        if (std::abs(kernel.delta() - domain.delta) > 1e-12 * domain.delta)
            throw ConfigError("problem: kernel horizon must equal the domain delta");
    }

    Field sample_collar(std::shared_ptr<const Mesh> mesh) const {
        Field g(mesh);
        for (int i = 0; i < mesh->cells(); ++i)
            if (!mesh->in_omega(i)) g[i] = collar(mesh->midpoint(i), domain);
        return g;
    }

    Field sample_forcing(std::shared_ptr<const Mesh> mesh, const Field* u = nullptr) const {
        Field f(mesh);
        for (int i = mesh->omega_begin(); i < mesh->omega_end(); ++i)
            f[i] = forcing(mesh->midpoint(i), u ? (*u)[i] : 0.0);
        return f;
    }
};

}  // namespace nonloc
