#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nonloc/errors.hpp"
#include "nonloc/interval.hpp"
#include "nonloc/mesh.hpp"
#include "nonloc/quadrature.hpp"

namespace nonloc {

// ---------------------------------------------------------------------------
// Kernel families. All are compactly supported on |x-y| < delta.
// ---------------------------------------------------------------------------

struct ConstantKernel {
    double value;
};

// ((3-eps)/delta^(3-eps)) |x-y|^(-eps). The normalization keeps the second
// moment of the family equal to 2 for every eps, so sweeps over eps compare
// kernels with the same diffusive strength.
struct PowerLawKernel {
    double exponent;
    double amplitude;
};

// (4-x) e^(x y eps) / delta^3: heterogeneous in x, asymmetric.
struct HeterogeneousExpKernel {
    double eps;
    double inv_delta3;
};

// c e^(-(x-y)^2) truncated at the horizon, with c = 1/sqrt(pi), the mass
// normalizer of the untruncated Gaussian.
struct TruncatedGaussianKernel {
    double normalizer;
};

// Values on a uniform node grid, bilinear in between, zero outside the grid.
struct TabulatedKernel {
    Interval x_range, y_range;
    int nx, ny;
    std::vector<double> values;  // row-major: values[i*ny + j] at (x_i, y_j)
    bool symmetric_hint;
};

class KernelSpec;

// Bonds touching the excised interval are removed. Default semantics zero
// mu(x,y) whenever x or y lies in the excised interval (the excised piece is
// fully decoupled); cross_only removes only bonds between the excised piece
// and the rest.
struct BondRemovalKernel {
    std::shared_ptr<const KernelSpec> base;
    Interval excised;
    bool cross_only;
};

class KernelSpec {
public:
    using Family = std::variant<ConstantKernel, PowerLawKernel, HeterogeneousExpKernel,
                                TruncatedGaussianKernel, BondRemovalKernel, TabulatedKernel>;

    static KernelSpec constant(double value, double delta) {
        require(delta > 0.0, "kernel: delta must be positive");
        require(value >= 0.0, "kernel: constant value must be nonnegative");
        return KernelSpec(ConstantKernel{value}, delta, true);
    }

    static KernelSpec power_law(double exponent, double delta) {
        require(delta > 0.0, "kernel: delta must be positive");
        require(exponent >= 0.0, "kernel: power-law exponent must be nonnegative");
        require(exponent < 1.0, "kernel: integrability requires exponent < 1");
        const double amp = (3.0 - exponent) * std::pow(delta, exponent - 3.0);
        return KernelSpec(PowerLawKernel{exponent, amp}, delta, true);
    }

    static KernelSpec heterogeneous_exp(double eps, double delta) {
        require(delta > 0.0, "kernel: delta must be positive");
        require(eps >= 0.0, "kernel: heterogeneous exponent must be nonnegative");
        return KernelSpec(HeterogeneousExpKernel{eps, 1.0 / (delta * delta * delta)}, delta,
                          false);
    }

    static KernelSpec truncated_gaussian(double delta) {
        require(delta > 0.0, "kernel: delta must be positive");
        return KernelSpec(TruncatedGaussianKernel{1.0 / std::sqrt(M_PI)}, delta, true);
    }

    static KernelSpec bond_removal(KernelSpec base, Interval excised, bool cross_only = false) {
        require(!excised.empty(), "kernel: excised interval must be nonempty");
        const double delta = base.delta();
        const bool sym = base.symmetric();
        auto ptr = std::make_shared<const KernelSpec>(std::move(base));
        return KernelSpec(BondRemovalKernel{std::move(ptr), excised, cross_only}, delta, sym);
    }

    static KernelSpec tabulated(Interval x_range, Interval y_range, int nx, int ny,
                                std::vector<double> values, double delta,
                                bool symmetric_hint = false) {
        require(delta > 0.0, "kernel: delta must be positive");
        require(nx >= 2 && ny >= 2, "kernel: tabulated grid needs at least 2x2 nodes");
        require((int)values.size() == nx * ny, "kernel: tabulated value count mismatch");
        for (double v : values)
            require(v >= 0.0, "kernel: tabulated values must be nonnegative");
        return KernelSpec(TabulatedKernel{x_range, y_range, nx, ny, std::move(values),
                                          symmetric_hint},
                          delta, symmetric_hint);
    }

    double delta() const { return delta_; }
    bool symmetric() const { return symmetric_; }
    const Family& family() const { return fam_; }

    bool translation_invariant() const {
        if (std::holds_alternative<ConstantKernel>(fam_) ||
            std::holds_alternative<PowerLawKernel>(fam_) ||
            std::holds_alternative<TruncatedGaussianKernel>(fam_))
            return true;
        return false;
    }

    const BondRemovalKernel* bond_removal_family() const {
        return std::get_if<BondRemovalKernel>(&fam_);
    }

    // mu(x, y): zero outside the horizon and on removed bonds.
    double operator()(double x, double y) const {
        if (std::abs(x - y) >= delta_) return 0.0;
        return unmasked(x, y);
    }

    // Integral of mu(x, .)^q over `region` (clipped to the horizon ball and
    // with removed bonds excluded). q = 1 gives the lambda slice.
    double slice_y(double x, Interval region, double q = 1.0) const {
        return slice(x, region, q, /*slice_in_y=*/true);
    }

    // Integral of mu(., y)^q over `region`.
    double slice_x(double y, Interval region, double q = 1.0) const {
        return slice(y, region, q, /*slice_in_y=*/false);
    }

private:
    KernelSpec(Family fam, double delta, bool symmetric)
        : fam_(std::move(fam)), delta_(delta), symmetric_(symmetric) {}

    static void require(bool ok, const char* msg) {
        if (!ok) throw ConfigError(msg);
    }

    double unmasked(double x, double y) const {
        return std::visit(
            [&](const auto& f) -> double { return eval_family(f, x, y); }, fam_);
    }

    static double eval_family(const ConstantKernel& f, double, double) { return f.value; }

    static double eval_family(const PowerLawKernel& f, double x, double y) {
        const double s = std::abs(x - y);
        if (f.exponent == 0.0) return f.amplitude;
        if (s == 0.0) return std::numeric_limits<double>::infinity();
        return f.amplitude * std::pow(s, -f.exponent);
    }

    static double eval_family(const HeterogeneousExpKernel& f, double x, double y) {
        return (4.0 - x) * std::exp(x * y * f.eps) * f.inv_delta3;
    }

    static double eval_family(const TruncatedGaussianKernel& f, double x, double y) {
        const double s = x - y;
        return f.normalizer * std::exp(-s * s);
    }

    static double eval_family(const BondRemovalKernel& f, double x, double y) {
        const bool xin = f.excised.contains(x), yin = f.excised.contains(y);
        const bool removed = f.cross_only ? (xin != yin) : (xin || yin);
        if (removed) return 0.0;
        return (*f.base)(x, y);
    }

    static double eval_family(const TabulatedKernel& f, double x, double y) {
        if (x < f.x_range.lo || x > f.x_range.hi || y < f.y_range.lo || y > f.y_range.hi)
            return 0.0;
        const double dx = f.x_range.length() / (f.nx - 1);
        const double dy = f.y_range.length() / (f.ny - 1);
        double tx = (x - f.x_range.lo) / dx;
        double ty = (y - f.y_range.lo) / dy;
        int i = std::min((int)tx, f.nx - 2), j = std::min((int)ty, f.ny - 2);
        tx -= i;
        ty -= j;
        auto v = [&](int a, int b) { return f.values[a * f.ny + b]; };
        return (1 - tx) * ((1 - ty) * v(i, j) + ty * v(i, j + 1)) +
               tx * ((1 - ty) * v(i + 1, j) + ty * v(i + 1, j + 1));
    }

    // --- slice machinery ------------------------------------------------

    // integral of |s|^(-e) over [lo, hi] with 0 <= lo < hi
    static double abs_pow_integral(double lo, double hi, double e) {
        if (hi <= lo) return 0.0;
        if (e == 0.0) return hi - lo;
        if (lo <= 0.0) {
            if (e >= 1.0) return std::numeric_limits<double>::infinity();
            return std::pow(hi, 1.0 - e) / (1.0 - e);
        }
        if (e == 1.0) return std::log(hi / lo);
        return (std::pow(hi, 1.0 - e) - std::pow(lo, 1.0 - e)) / (1.0 - e);
    }

    // integral of e^(c t) over [lo, hi], stable as c -> 0
    static double exp_integral(double c, double lo, double hi) {
        if (hi <= lo) return 0.0;
        const double w = c * (hi - lo);
        if (std::abs(w) < 1e-8) {
            const double len = hi - lo;
            return std::exp(c * lo) * len * (1.0 + w * (0.5 + w * (1.0 / 6.0 + w / 24.0)));
        }
        return std::exp(c * lo) * std::expm1(w) / c;
    }

    struct SliceCtx {
        double at;          // the fixed coordinate
        double q;
        bool slice_in_y;    // integrate over y (true) or over x (false)
    };

    double slice(double at, Interval region, double q, bool slice_in_y) const {
        Interval r = region.intersect(ball(at, delta_));
        if (r.empty()) return 0.0;
        SliceCtx c{at, q, slice_in_y};
        return std::visit([&](const auto& f) -> double { return slice_family(f, c, r); },
                          fam_);
    }

    static double slice_family(const ConstantKernel& f, const SliceCtx& c, Interval r) {
        return std::pow(f.value, c.q) * r.length();
    }

    static double slice_family(const PowerLawKernel& f, const SliceCtx& c, Interval r) {
        const double e = f.exponent * c.q;
        const double amp = std::pow(f.amplitude, c.q);
        // split the slice at the singular point
        double acc = 0.0;
        if (r.lo < c.at)
            acc += abs_pow_integral(std::max(0.0, c.at - r.hi), c.at - r.lo, e);
        if (r.hi > c.at)
            acc += abs_pow_integral(std::max(0.0, r.lo - c.at), r.hi - c.at, e);
        return amp * acc;
    }

    static double slice_family(const TruncatedGaussianKernel& f, const SliceCtx& c,
                               Interval r) {
        const double cq = std::pow(f.normalizer, c.q);
        const double s = std::sqrt(c.q);
        const double a = s * (r.lo - c.at), b = s * (r.hi - c.at);
        return cq * 0.5 * std::sqrt(M_PI / c.q) * (std::erf(b) - std::erf(a));
    }

    static double slice_family(const HeterogeneousExpKernel& f, const SliceCtx& c,
                               Interval r) {
        if (c.slice_in_y) {
            // A(x)^q * int e^(q eps x y) dy
            const double x = c.at;
            const double a = std::pow((4.0 - x) * f.inv_delta3, c.q);
            return a * exp_integral(c.q * f.eps * x, r.lo, r.hi);
        }
        const double y = c.at;
        if (c.q == 1.0) {
            // int (4-x) e^(eps x y) dx / delta^3, by parts
            const double cc = f.eps * y;
            if (std::abs(cc) < 1e-8) {
                // series in cc: int (4-x)(1 + cc x + cc^2 x^2/2) dx
                auto F = [&](double x) {
                    const double x2 = x * x, x3 = x2 * x, x4 = x3 * x;
                    return 4.0 * x - x2 / 2.0 + cc * (2.0 * x2 - x3 / 3.0) +
                           cc * cc * (2.0 * x3 / 3.0 - x4 / 8.0);
                };
                return f.inv_delta3 * (F(r.hi) - F(r.lo));
            }
            auto F = [&](double x) {
                return std::exp(cc * x) * ((4.0 - x) / cc + 1.0 / (cc * cc));
            };
            return f.inv_delta3 * (F(r.hi) - F(r.lo));
        }
        auto g = [&](double x) {
            return std::pow((4.0 - x) * f.inv_delta3 * std::exp(f.eps * x * y), c.q);
        };
        return quad::adaptive(g, r.lo, r.hi, 1e-12 * (1.0 + r.length())).value;
    }

    static double slice_family(const TabulatedKernel& f, const SliceCtx& c, Interval r) {
        TabulatedKernel tab = f;
        auto g = [&](double t) {
            double v = c.slice_in_y ? eval_family(tab, c.at, t) : eval_family(tab, t, c.at);
            return std::pow(v, c.q);
        };
        std::vector<double> breaks;
        const auto& rng = c.slice_in_y ? f.y_range : f.x_range;
        const int n = c.slice_in_y ? f.ny : f.nx;
        for (int i = 0; i < n; ++i)
            breaks.push_back(rng.lo + i * rng.length() / (n - 1));
        return quad::adaptive_split(g, r.lo, r.hi, breaks, 1e-11).value;
    }

    static double slice_family(const BondRemovalKernel& f, const SliceCtx& c, Interval r) {
        const bool at_in = f.excised.contains(c.at);
        auto base_slice = [&](Interval piece) {
            if (piece.empty()) return 0.0;
            return c.slice_in_y ? f.base->slice_y(c.at, piece, c.q)
                                : f.base->slice_x(c.at, piece, c.q);
        };
        if (at_in) {
            if (!f.cross_only) return 0.0;
            return base_slice(r.intersect(f.excised));
        }
        // keep everything outside the excised interval
        double acc = base_slice({r.lo, std::min(r.hi, f.excised.lo)});
        acc += base_slice({std::max(r.lo, f.excised.hi), r.hi});
        return acc;
    }

    Family fam_;
    double delta_;
    bool symmetric_;
};

// ---------------------------------------------------------------------------
// Spec-level operations
// ---------------------------------------------------------------------------

inline double evaluate(const KernelSpec& k, double x, double y) { return k(x, y); }

inline double lambda_at(const KernelSpec& k, double x, Interval region) {
    return k.slice_y(x, region);
}

inline double gamma_at(const KernelSpec& k, double y, Interval region) {
    return k.slice_x(y, region);
}

struct KernelSplit {
    std::function<double(double, double)> sym;
    std::function<double(double, double)> asym;
};

inline KernelSplit split_sym_asym(const KernelSpec& k) {
    KernelSplit s;
    s.sym = [k](double x, double y) { return 0.5 * (k(x, y) + k(y, x)); };
    s.asym = [k](double x, double y) { return 0.5 * (k(x, y) - k(y, x)); };
    return s;
}

// ---------------------------------------------------------------------------
// Kernel functionals
// ---------------------------------------------------------------------------

struct KernelStats {
    double p = 2.0;
    double lambda_sup = 0.0;    // sup over Omega of the L1 y-slice
    double gamma_sup = 0.0;     // sup over Omega u Gamma of the L1 x-slice over Omega
    double m_mu_p = 0.0;        // gamma_sup^(1/p) lambda_sup^(1-1/p)
    double l1_restricted = 0.0; // L1 over (Omega u Gamma)^2
    double l2_full = 0.0;       // L2 over (Omega u Gamma)^2
    double l2_omega_gamma = 0.0;// L2 over (Omega u Gamma)^2 minus Omega^2
    double asym_l2 = 0.0;       // L2 of the antisymmetric part
    double m_asym_p = 0.0;      // M_{mu_asym, p}
};

namespace detail {

// Sample points over `range`, densified tenfold within one horizon of the
// domain boundary. The sup of a piecewise-smooth slice functional over these
// points is reported as the sup norm.
inline std::vector<double> sup_samples(Interval range, const DomainSpec& dom, int n_base) {
    std::vector<double> pts;
    pts.reserve(n_base * 3);
    const double len = range.length();
    for (int i = 0; i < n_base; ++i) pts.push_back(range.lo + (i + 0.5) * len / n_base);
    auto refine = [&](Interval zone) {
        zone = zone.intersect(range);
        if (zone.empty()) return;
        const int n = std::max(2, (int)std::lround(10.0 * n_base * zone.length() / len));
        for (int i = 0; i <= n; ++i)
            pts.push_back(zone.lo + i * zone.length() / n);
    };
    refine(ball(dom.omega.lo, dom.delta));
    refine(ball(dom.omega.hi, dom.delta));
    return pts;
}

inline std::vector<double> domain_breakpoints(const DomainSpec& dom, const KernelSpec& k) {
    const double a = dom.omega.lo, b = dom.omega.hi, d = dom.delta;
    std::vector<double> br = {a - d, a, a + d, b - d, b, b + d};
    if (const auto* f = k.bond_removal_family()) {
        for (double e : {f->excised.lo, f->excised.hi})
            for (double off : {-d, 0.0, d}) br.push_back(e + off);
    }
    return br;
}

// iterated integral of mu^q over {x in xr, y in region(x)}
inline double double_integral(const KernelSpec& k, const DomainSpec& dom, Interval xr,
                              Interval yr, double q, double tol = 1e-9) {
    auto outer = [&](double x) { return k.slice_y(x, yr, q); };
    auto breaks = domain_breakpoints(dom, k);
    return quad::adaptive_split(outer, xr.lo, xr.hi, breaks, tol).value;
}

inline bool lq_is_infinite(const KernelSpec& k, double q) {
    if (const auto* pl = std::get_if<PowerLawKernel>(&k.family()))
        return pl->exponent * q >= 1.0;
    if (const auto* br = k.bond_removal_family()) return lq_is_infinite(*br->base, q);
    return false;
}

}  // namespace detail

// L^q norm of the kernel over (Omega u Gamma)^2; +inf when the singularity is
// not q-integrable.
inline double lq_restricted(const KernelSpec& k, const DomainSpec& dom, double q) {
    if (detail::lq_is_infinite(k, q)) return std::numeric_limits<double>::infinity();
    const Interval full = dom.full();
    return std::pow(detail::double_integral(k, dom, full, full, q), 1.0 / q);
}

inline KernelStats kernel_stats(const KernelSpec& k, const DomainSpec& dom, double p,
                                int n_samples = 400) {
    if (!(p >= 1.0)) throw ConfigError("kernel_stats: p must be >= 1");
    KernelStats st;
    st.p = p;
    const Interval full = dom.full();

    for (double x : detail::sup_samples(dom.omega, dom, n_samples))
        st.lambda_sup = std::max(st.lambda_sup, k.slice_y(x, ball(x, k.delta())));
    if (k.symmetric()) {
        // gamma(y) = lambda(x) pointwise; the sup over y in Omega u Gamma of
        // the Omega-restricted x-slice is attained in the interior.
        st.gamma_sup = st.lambda_sup;
    } else {
        for (double y : detail::sup_samples(full, dom, n_samples))
            st.gamma_sup = std::max(st.gamma_sup, k.slice_x(y, dom.omega));
    }
    st.m_mu_p = std::pow(st.gamma_sup, 1.0 / p) * std::pow(st.lambda_sup, 1.0 - 1.0 / p);

    st.l1_restricted = detail::double_integral(k, dom, full, full, 1.0);
    if (detail::lq_is_infinite(k, 2.0)) {
        st.l2_full = std::numeric_limits<double>::infinity();
        st.l2_omega_gamma = std::numeric_limits<double>::infinity();
    } else {
        const double sq_full = detail::double_integral(k, dom, full, full, 2.0);
        const double sq_omega = detail::double_integral(k, dom, dom.omega, dom.omega, 2.0);
        st.l2_full = std::sqrt(sq_full);
        st.l2_omega_gamma = std::sqrt(std::max(0.0, sq_full - sq_omega));
    }

    if (k.symmetric()) {
        st.asym_l2 = 0.0;
        st.m_asym_p = 0.0;
        return st;
    }

    auto asym_abs = [&](double x, double y) { return 0.5 * std::abs(k(x, y) - k(y, x)); };
    auto asym_slice_y = [&](double x, Interval r, double q) {
        r = r.intersect(ball(x, k.delta()));
        if (r.empty()) return 0.0;
        auto g = [&](double y) { return std::pow(asym_abs(x, y), q); };
        return quad::adaptive_split(g, r.lo, r.hi, {x}, 1e-11).value;
    };
    auto outer = [&](double x) { return asym_slice_y(x, full, 2.0); };
    const double sq = quad::adaptive_split(outer, full.lo, full.hi,
                                           detail::domain_breakpoints(dom, k), 1e-9)
                          .value;
    st.asym_l2 = std::sqrt(sq);

    double lam_sup = 0.0, gam_sup = 0.0;
    for (double x : detail::sup_samples(dom.omega, dom, n_samples / 2))
        lam_sup = std::max(lam_sup, asym_slice_y(x, ball(x, k.delta()), 1.0));
    for (double y : detail::sup_samples(full, dom, n_samples / 2)) {
        Interval r = dom.omega.intersect(ball(y, k.delta()));
        if (r.empty()) continue;
        auto g = [&](double x) { return asym_abs(x, y); };
        gam_sup = std::max(gam_sup, quad::adaptive_split(g, r.lo, r.hi, {y}, 1e-11).value);
    }
    st.m_asym_p = std::pow(gam_sup, 1.0 / p) * std::pow(lam_sup, 1.0 - 1.0 / p);
    return st;
}

// Largest mu0 such that mu(x,y) >= mu0/|y-x|^p on the annulus
// eps < |y-x| < delta, for all x in Omega (assumption (M3) lower bound;
// sampled inf, exact for profiles with |z|^p mu monotone in |z|).
inline double m3_lower_bound(const KernelSpec& k, const DomainSpec& dom, double p,
                             double eps, int n_x = 201, int n_z = 128) {
    if (!(eps > 0.0 && eps < k.delta()))
        throw ConfigError("m3_lower_bound: need 0 < eps < delta");
    std::vector<double> xs;
    if (k.translation_invariant()) {
        xs.push_back(0.5 * (dom.omega.lo + dom.omega.hi));
    } else {
        for (int i = 0; i < n_x; ++i)
            xs.push_back(dom.omega.lo + (i + 0.5) * dom.omega.length() / n_x);
    }
    const double hi = k.delta() * (1.0 - 1e-9);
    double mu0 = std::numeric_limits<double>::infinity();
    for (double x : xs) {
        for (int j = 0; j <= n_z; ++j) {
            const double z = eps + (hi - eps) * j / n_z;
            for (double s : {-z, z})
                mu0 = std::min(mu0, k(x, x + s) * std::pow(z, p));
        }
    }
    return mu0;
}

// ---------------------------------------------------------------------------
// Normalized kernel mu~(x, y) = mu(x, y)/lambda(x) on Omega, 0 elsewhere.
// ---------------------------------------------------------------------------

class NormalizedKernel {
public:
    NormalizedKernel(KernelSpec k, DomainSpec dom)
        : k_(std::move(k)), dom_(dom) {
        double scale = 0.0;
        for (double x : detail::sup_samples(dom_.omega, dom_, 64))
            scale = std::max(scale, k_.slice_y(x, ball(x, k_.delta())));
        floor_ = 1e-12 * scale;
    }

    double lambda(double x) const {
        const double l = k_.slice_y(x, ball(x, k_.delta()));
        if (!(l > floor_))
            throw DegenerateKernelError("normalize: lambda vanishes at x = " +
                                        std::to_string(x));
        return l;
    }

    double operator()(double x, double y) const {
        if (!dom_.omega.contains(x)) return 0.0;
        return k_(x, y) / lambda(x);
    }

    const KernelSpec& base() const { return k_; }

private:
    KernelSpec k_;
    DomainSpec dom_;
    double floor_;
};

inline NormalizedKernel normalize(const KernelSpec& k, const DomainSpec& dom) {
    return NormalizedKernel(k, dom);
}

// ---------------------------------------------------------------------------
// Mesh-sampled functionals of normalized kernel differences. These are the
// quantities entering the kernel-perturbation bounds; midpoint sampling with
// the diagonal pair excluded regularizes weakly singular families the same
// way the assembled tables do.
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<double> row_lambdas(const KernelSpec& k, const Mesh& mesh) {
    std::vector<double> lam(mesh.cells(), 0.0);
    for (int i = mesh.omega_begin(); i < mesh.omega_end(); ++i) {
        const double x = mesh.midpoint(i);
        lam[i] = k.slice_y(x, ball(x, k.delta()));
    }
    return lam;
}

}  // namespace detail

// Squared discrete L2 norm over {x in Omega} x {|x-y| < delta} of
// mu2~ - mu1~; take_sqrt chooses the norm itself.
inline double normalized_kernel_l2_diff(const KernelSpec& k1, const KernelSpec& k2,
                                        const Mesh& mesh, bool take_sqrt) {
    const auto lam1 = detail::row_lambdas(k1, mesh);
    const auto lam2 = detail::row_lambdas(k2, mesh);
    const int w = mesh.horizon_cells();
    const double h = mesh.h();
    double acc = 0.0;
    for (int i = mesh.omega_begin(); i < mesh.omega_end(); ++i) {
        const double x = mesh.midpoint(i);
        if (!(lam1[i] > 0.0) || !(lam2[i] > 0.0))
            throw DegenerateKernelError("normalized kernel difference: vanishing lambda row");
        for (int j = std::max(0, i - w); j < std::min(mesh.cells(), i + w + 1); ++j) {
            if (j == i) continue;
            const double y = mesh.midpoint(j);
            const double d = k2(x, y) / lam2[i] - k1(x, y) / lam1[i];
            acc += d * d * h * h;
        }
    }
    return take_sqrt ? std::sqrt(acc) : acc;
}

// sup over Omega rows of the discrete L1 y-slice of mu2~ - mu1~.
inline double normalized_kernel_l1_slice_sup(const KernelSpec& k1, const KernelSpec& k2,
                                             const Mesh& mesh) {
    const auto lam1 = detail::row_lambdas(k1, mesh);
    const auto lam2 = detail::row_lambdas(k2, mesh);
    const int w = mesh.horizon_cells();
    const double h = mesh.h();
    double sup = 0.0;
    for (int i = mesh.omega_begin(); i < mesh.omega_end(); ++i) {
        const double x = mesh.midpoint(i);
        double row = 0.0;
        for (int j = std::max(0, i - w); j < std::min(mesh.cells(), i + w + 1); ++j) {
            if (j == i) continue;
            const double y = mesh.midpoint(j);
            row += std::abs(k2(x, y) / lam2[i] - k1(x, y) / lam1[i]) * h;
        }
        sup = std::max(sup, row);
    }
    return sup;
}

// Slice sup norms of nu = mu2~ - mu1~ in both variables; combined into
// M_{nu,p} = gamma_sup^(1/p) lambda_sup^(1-1/p).
inline double normalized_kernel_m_p(const KernelSpec& k1, const KernelSpec& k2,
                                    const Mesh& mesh, double p) {
    const auto lam1 = detail::row_lambdas(k1, mesh);
    const auto lam2 = detail::row_lambdas(k2, mesh);
    const int w = mesh.horizon_cells();
    const double h = mesh.h();
    double lam_sup = 0.0;
    std::vector<double> col(mesh.cells(), 0.0);
    for (int i = mesh.omega_begin(); i < mesh.omega_end(); ++i) {
        const double x = mesh.midpoint(i);
        double row = 0.0;
        for (int j = std::max(0, i - w); j < std::min(mesh.cells(), i + w + 1); ++j) {
            if (j == i) continue;
            const double y = mesh.midpoint(j);
            const double a = std::abs(k2(x, y) / lam2[i] - k1(x, y) / lam1[i]);
            row += a * h;
            col[j] += a * h;
        }
        lam_sup = std::max(lam_sup, row);
    }
    const double gam_sup = *std::max_element(col.begin(), col.end());
    return std::pow(gam_sup, 1.0 / p) * std::pow(lam_sup, 1.0 - 1.0 / p);
}

// Discrete L2 norm over Omega x Omega of the antisymmetric part of the
// normalized kernel. Only interior pairs enter the energy estimates (the
// solution difference vanishes on the collar), so the cutoff of mu~ outside
// Omega contributes nothing here.
inline double normalized_kernel_asym_l2(const KernelSpec& k, const Mesh& mesh) {
    // row normalization of a translation-invariant kernel keeps lambda
    // constant across Omega rows, so the interior block stays symmetric
    if (k.translation_invariant() && k.symmetric()) return 0.0;
    const auto lam = detail::row_lambdas(k, mesh);
    const int w = mesh.horizon_cells();
    const double h = mesh.h();
    // rows with vanishing lambda (fully decoupled cells) carry no normalized
    // kernel mass
    auto ntilde = [&](int i, int j) {
        if (!(lam[i] > 0.0)) return 0.0;
        return k(mesh.midpoint(i), mesh.midpoint(j)) / lam[i];
    };
    double acc = 0.0;
    for (int i = mesh.omega_begin(); i < mesh.omega_end(); ++i) {
        for (int j = std::max(mesh.omega_begin(), i - w);
             j < std::min(mesh.omega_end(), i + w + 1); ++j) {
            if (j == i) continue;
            const double a = 0.5 * (ntilde(i, j) - ntilde(j, i));
            acc += a * a * h * h;
        }
    }
    return std::sqrt(acc);
}

// Kernel-difference statistic for bond removal: the worst squared L2 y-slice
// of the removed-bond density (mu_excised - mu_base)/lambda_base over rows
// outside the excised region (rows inside it are non-physical).
inline double bond_removal_diff_sq(const KernelSpec& base, const KernelSpec& excised_kernel,
                                   Interval excised, const Mesh& mesh) {
    const int w = mesh.horizon_cells();
    const double h = mesh.h();
    double sup = 0.0;
    for (int i = mesh.omega_begin(); i < mesh.omega_end(); ++i) {
        const double x = mesh.midpoint(i);
        if (excised.contains(x)) continue;
        const double lam0 = base.slice_y(x, ball(x, base.delta()));
        double row = 0.0;
        for (int j = std::max(0, i - w); j < std::min(mesh.cells(), i + w + 1); ++j) {
            if (j == i) continue;
            const double y = mesh.midpoint(j);
            const double d = (excised_kernel(x, y) - base(x, y)) / lam0;
            row += d * d * h;
        }
        sup = std::max(sup, row);
    }
    return sup;
}

}  // namespace nonloc
