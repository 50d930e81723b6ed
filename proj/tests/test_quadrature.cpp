#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "nonloc/quadrature.hpp"

using namespace nonloc;

TEST_CASE("gauss-legendre rule integrates polynomials exactly") {
    const auto& r = quad::rule15();
    // degree 29 is the highest exact degree for 15 points
    auto f = [](double x) { return std::pow(x, 28.0) - 3.0 * std::pow(x, 13.0) + x; };
    const double got = quad::fixed(f, -1.0, 1.0, r);
    CHECK(got == Catch::Approx(2.0 / 29.0).epsilon(1e-13));
}

TEST_CASE("adaptive quadrature handles smooth and peaked integrands") {
    auto gauss = [](double x) { return std::exp(-x * x); };
    const double erf1 = quad::adaptive(gauss, 0.0, 1.0, 1e-12).value;
    CHECK(erf1 == Catch::Approx(0.5 * std::sqrt(M_PI) * std::erf(1.0)).epsilon(1e-12));

    auto peak = [](double x) { return 1.0 / (1e-6 + x * x); };
    const double got = quad::adaptive(peak, -1.0, 1.0, 1e-9).value;
    const double expect = 2.0 * std::atan(1.0 / 1e-3) / 1e-3;
    CHECK(got == Catch::Approx(expect).epsilon(1e-9));
}

TEST_CASE("adaptive quadrature reports non-convergence with the achieved estimate") {
    // a discontinuity placed off the bisection lattice defeats refinement
    auto jump = [](double x) { return x > 1.0 / 3.0 ? 1.0 : 0.0; };
    CHECK_THROWS_AS(quad::adaptive(jump, 0.0, 1.0, 1e-15, 8), QuadratureError);
    try {
        quad::adaptive(jump, 0.0, 1.0, 1e-15, 8);
    } catch (const QuadratureError& e) {
        CHECK(e.achieved_estimate > 1e-15);
    }
}

TEST_CASE("breakpoint splitting integrates piecewise definitions") {
    auto f = [](double x) { return x < 0.25 ? 1.0 : 2.0; };
    const double got = quad::adaptive_split(f, 0.0, 1.0, {0.25}, 1e-12).value;
    CHECK(got == Catch::Approx(1.75).epsilon(1e-12));
}
