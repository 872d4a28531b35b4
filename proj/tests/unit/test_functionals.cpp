#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nldiff/functionals.hpp"
#include "oracles.hpp"

using namespace nldiff;
using Catch::Approx;

namespace {

RadialField sampled(const BarenblattProfile& b, const RadialGrid& g, double t) {
    return RadialField::sample(g, t, [&](double r) { return b.density(t, r); });
}

}  // namespace

TEST_CASE("u on the porous medium Barenblatt matches its closed form", "[functionals]") {
    // P = C - alpha r^2 / 2 at t = 1, so max P (alpha r)^2 = alpha C^2 / 2 at r^2 = C / alpha.
    const double g = 0.5;
    const int d = 2;
    const DiffusionParams p(g, d);
    const double a = p.alpha();
    const double c = oracle::barenblatt_constant(g, d, 1.0);
    const BarenblattProfile b(p, 1.0);
    const RadialField f = sampled(b, RadialGrid(4096, 1.2 * b.support_radius(1.0), d), 1.0);
    const auto res = lipschitz_u_detail(f, p, 1.0);
    CHECK(res.value == Approx(a * c * c / 2.0).epsilon(1e-3));
    CHECK(res.argmax_r == Approx(std::sqrt(c / a)).epsilon(1e-3));
    CHECK_FALSE(res.excluded_cells);
}

TEST_CASE("b = 0 gives the squared Lipschitz constant of p", "[functionals]") {
    const DiffusionParams p(1.0, 2);
    const BarenblattProfile b(p, 1.0);
    const double t = 2.0, rs = b.support_radius(t);
    double prev_err = INFINITY;
    for (std::size_t n : {256, 1024}) {
        const RadialField f = sampled(b, RadialGrid(n, 1.5 * rs, 2), t);
        const double want = std::pow(p.alpha() * rs / t, 2);
        const double err = std::abs(lipschitz_u(f, p, 0.0) - want) / want;
        CHECK(err < 0.05);
        CHECK(err < prev_err);  // the supremum gap closes with dr
        prev_err = err;
    }
}

TEST_CASE("b <= 0 on a compactly supported field raises the excluded-cell flag", "[functionals]") {
    const DiffusionParams p(1.0, 2);
    const BarenblattProfile b(p, 1.0);
    const RadialField f = sampled(b, RadialGrid(128, 3.0, 2), 1.0);
    CHECK(lipschitz_u_detail(f, p, -0.5).excluded_cells);
    CHECK(lipschitz_u_detail(f, p, 0.0).excluded_cells);
    CHECK_FALSE(lipschitz_u_detail(f, p, 0.5).excluded_cells);
}

TEST_CASE("fast diffusion b = -1 stays under 2 alpha / t", "[functionals]") {
    const DiffusionParams p(-0.5, 3);
    const BarenblattProfile b(p, std::numbers::pi * std::numbers::pi);
    for (double t : {1.0, 3.0}) {
        const RadialField f = sampled(b, RadialGrid(1024, 40.0, 3), t);
        const double u = lipschitz_u(f, p, -1.0);
        CHECK(t * u <= 2.0 * p.alpha() * 1.01);
        CHECK(t * u >= 2.0 * p.alpha() * 0.9);  // approached in the tail
        // |grad sqrt p|^2 = |grad p|^2 / (4 |p|)
        const double r = 7.0;
        const double sq = std::pow(b.pressure_gradient(t, r), 2) / (4.0 * std::abs(b.pressure(t, r)));
        const double h = 1e-5;
        const double ds = (std::sqrt(std::abs(b.pressure(t, r + h))) - std::sqrt(std::abs(b.pressure(t, r - h)))) / (2 * h);
        CHECK(sq == Approx(ds * ds).epsilon(1e-6));
    }
}

TEST_CASE("weighted gradient gap on exact profiles", "[functionals]") {
    const double g = 0.5, t = 2.0;
    const DiffusionParams p(g, 2);
    const double a = p.alpha();
    const BarenblattProfile b(p, 1.0);
    const RadialField f = sampled(b, RadialGrid(4096, 1.1 * b.support_radius(t), 2), t);
    // Literal reference x/t leaves (1 - alpha)^2 r^2 / t^2 |P|^b
    const double c = oracle::barenblatt_constant(g, 2, 1.0);
    double want = 0.0;
    for (int k = 0; k <= 20000; ++k) {
        const double r = b.support_radius(t) * k / 20000.0;
        const double P = std::pow(t, -a * g * 2) * std::max(c - a * r * r / 2.0 * std::pow(t, -2 * a), 0.0);
        want = std::max(want, P * std::pow((1.0 - a) * r / t, 2));
    }
    CHECK(weighted_gradient_gap(f, p, t, 1.0, GapReference::Literal) == Approx(want).epsilon(2e-3));
    // The self-similar reference cancels the gradient of the quadratic pressure.
    // Central differences are exact on it; only the one-sided stencil at the
    // last positive cell errs, by O(dr) in the gradient where |P| = O(dr).
    CHECK(weighted_gradient_gap(f, p, t, 1.0) < 1e-10 * lipschitz_u(f, p, 1.0));
    // frozen field, t -> infinity: the gap tends to max |p|^b |p'|^2
    CHECK(weighted_gradient_gap(f, p, 1e12, 1.0) == Approx(lipschitz_u(f, p, 1.0)).epsilon(1e-9));
    CHECK_THROWS_AS(weighted_gradient_gap(f, p, 0.0, 1.0), DomainError);
}

TEST_CASE("Fisher information vanishes at the confined stationary state", "[functionals]") {
    const DiffusionParams p(1.0, 2);
    const double a = p.alpha();
    const BarenblattProfile b(p, 1.0);
    const RadialField f = sampled(b, RadialGrid(1024, 1.5 * b.support_radius(a), 2), a);
    double scale = 0.0;  // int n r^2 sets the size of a generic value
    for (std::size_t i = 0; i < f.size(); ++i) scale += f[i] * std::pow(f.grid.center(i), 2) * f.grid.volume(i);
    scale *= f.grid.sphere_area();
    CHECK(fisher_information(f, 1.0) < 1e-3 * scale);
    const RadialField zero = RadialField::sample(f.grid, 0.0, [](double) { return 0.0; });
    CHECK(fisher_information(zero, 1.0) == 0.0);
}

TEST_CASE("discrete Aronson-Benilan minimum", "[functionals]") {
    for (double g : {0.5, 1.0}) {
        const DiffusionParams p(g, 2);
        const BarenblattProfile b(p, 1.0);
        const double t = 3.0;
        const RadialField f = sampled(b, RadialGrid(512, 1.3 * b.support_radius(t), 2), t);
        CHECK(aronson_benilan_min(f, g) == Approx(-2 * p.alpha() / t).margin(1e-6));
        // Equality case: the quadratic pressure hits the bound up to the roundoff of
        // a second difference, eps max|p| / dr^2.
        const auto pr = detail::pressures(f, g);
        const double dr = f.grid.spacing();
        const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * *std::max_element(pr.begin(), pr.end()) / (dr * dr);
        CHECK(aronson_benilan_min(f, g) >= aronson_benilan_bound(g, 2, t) - roundoff);
    }
    const RadialField u = RadialField::sample(RadialGrid(32, 1.0, 3), 1.0, [](double) { return 2.0; });
    CHECK(aronson_benilan_min(u, 0.5) == 0.0);
    CHECK(aronson_benilan_bound(0.5, 2, 2.0) == Approx(-1.0 / 3.0));
}

TEST_CASE("relative error and L1 error against exact data", "[functionals]") {
    const DiffusionParams p(-0.5, 3);
    const BarenblattProfile b(p, 1.0);
    const RadialField f = sampled(b, RadialGrid(256, 8.0, 3), 1.5);
    CHECK(relative_error(f, b) <= 1e-15);
    RadialField bumped = f;
    bumped.values[10] *= 1.01;
    CHECK(relative_error(bumped, b) == Approx(0.01).epsilon(1e-9));
    RadialField holed = f;
    holed.values[3] = 0.0;
    CHECK_THROWS_AS(relative_error(holed, b), DomainError);

    // L1 of a piecewise-constant sample: first order in dr
    const BarenblattProfile q(DiffusionParams(1.0, 2), 1.0);
    const double e1 = l1_error(sampled(q, RadialGrid(200, 3.0, 2), 1.0), q);
    const double e2 = l1_error(sampled(q, RadialGrid(400, 3.0, 2), 1.0), q);
    CHECK(e1 / e2 == Approx(2.0).margin(0.2));
}

TEST_CASE("x-norm: finite for Barenblatt tails, infinite for r^-d tails", "[functionals]") {
    const DiffusionParams p(-0.5, 3);
    const BarenblattProfile b(p, 1.0);
    const RadialField f = sampled(b, RadialGrid(512, 10.0, 3), 1.0);
    const double x = x_norm(f, -0.5, TailModel::barenblatt(b));
    CHECK(std::isfinite(x));
    CHECK(x > 0.0);
    // heavier tail n ~ r^-d is not integrable
    CHECK(std::isinf(x_norm(f, -0.5, TailModel::power_law(1.0, 3.0))));
    // r^-2/g - d weights the Barenblatt tail mass; it tends to a finite constant
    const double far = 1e3;
    CHECK(std::pow(far, 4.0 - 3.0) * b.mass_beyond(1.0, far) <= x * (1.0 + 1e-9));
}

TEST_CASE("density gradient and L-infinity", "[functionals]") {
    const RadialGrid g(100, 1.0, 2);
    const RadialField f = RadialField::sample(g, 0.0, [](double r) { return 3.0 - 2.0 * r; });
    CHECK(max_density_gradient_sq(f) == Approx(4.0));
    CHECK(linf(f) == Approx(3.0 - 2.0 * g.center(0)));
}

TEST_CASE("requests, labels and series", "[functionals]") {
    CHECK(FunctionalRequest::lipschitz(1.0).label() == "lipschitz_u_b1");
    CHECK(FunctionalRequest::gap(-1.2).label() == "weighted_gap_b-1.2");
    CHECK(FunctionalRequest::gap(-1.2, GapReference::Literal).label() == "weighted_gap_b-1.2_literal");
    CHECK(FunctionalRequest::simple(FunctionalKind::DensityGradient).label() == "lip_n");
    CHECK(FunctionalRequest::simple(FunctionalKind::ABmin).label() == "ab_min");

    const DiffusionParams p(1.0, 2);
    const RadialField f = RadialField::sample(RadialGrid(50, 1.0, 2), 1.0, [](double r) { return 1.0 - 0.5 * r; });
    CHECK(evaluate(FunctionalRequest::simple(FunctionalKind::Mass), f, p) == Approx(f.mass()));
    CHECK_THROWS_AS(evaluate(FunctionalRequest::simple(FunctionalKind::RelativeError), f, p), DomainError);

    FunctionalSeries s;
    s.push(1.0, 2.0);
    CHECK_THROWS_AS(s.push(1.0, 3.0), DomainError);
    CHECK_THROWS_AS(s.push(0.5, 3.0), DomainError);
}
