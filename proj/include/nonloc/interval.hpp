#pragma once

#include <algorithm>
#include <cmath>

#include "nonloc/errors.hpp"

namespace nonloc {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi > lo ? hi - lo : 0.0; }
    bool empty() const { return hi <= lo; }
    bool contains(double x) const { return x > lo && x < hi; }

    Interval intersect(const Interval& other) const {
        return {std::max(lo, other.lo), std::min(hi, other.hi)};
    }
};

inline Interval ball(double center, double radius) {
    return {center - radius, center + radius};
}

// Domain Omega = (a, b) with a collar of width delta glued on each side, so
// that the horizon of any interior point stays inside Omega u Gamma.
struct DomainSpec {
    Interval omega;
    double delta = 0.0;

    DomainSpec(Interval omega_, double delta_) : omega(omega_), delta(delta_) {
        if (!(omega.hi > omega.lo))
            throw ConfigError("domain: omega must satisfy b > a");
        if (!(delta > 0.0))
            throw ConfigError("domain: delta must be positive");
    }

    Interval gamma_left() const { return {omega.lo - delta, omega.lo}; }
    Interval gamma_right() const { return {omega.hi, omega.hi + delta}; }
    Interval full() const { return {omega.lo - delta, omega.hi + delta}; }

    double diameter() const { return omega.length(); }

    bool in_gamma(double x) const {
        return gamma_left().contains(x) || gamma_right().contains(x);
    }
};

}  // namespace nonloc
