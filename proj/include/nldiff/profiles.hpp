#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include "nldiff/errors.hpp"
#include "nldiff/params.hpp"

namespace nldiff {

namespace detail {

inline constexpr double kProfileTolerance = 1e-12;
inline constexpr std::uintmax_t kProfileMaxIterations = 200;

// Self-similar shape F(xi): (C - a xi^2/2)_+^{1/g} for g > 0, (C + a xi^2/2)^{1/g} for g < 0.
inline double shape(double gamma, double alpha, double c, double xi) {
    if (gamma > 0.0) {
        const double base = c - 0.5 * alpha * xi * xi;
        return base > 0.0 ? std::pow(base, 1.0 / gamma) : 0.0;
    }
    return std::pow(c + 0.5 * alpha * xi * xi, 1.0 / gamma);
}

// Fraction of the fat-tail integrand that the power-law asymptote may miss at the
// start of the analytic tail.
inline constexpr double kTailAsymptoteGap = 0.01;

// Radius past which (C + a xi^2/2)^{1/g} is within 1% of (a xi^2/2)^{1/g}.
inline double fde_tail_cut(double gamma, double alpha, double c) {
    const double x = std::pow(1.0 - kTailAsymptoteGap, gamma) - 1.0;  // gamma < 0 so x > 0
    return std::sqrt(2.0 * c / (alpha * x));
}

// Integral of xi^{d-1} (C + a xi^2/2)^{1/g} over (cut, inf), expanded in 2C/(a xi^2) < 1.
inline double fde_tail_integral(double gamma, int dim, double alpha, double c, double cut) {
    const double q = 1.0 / gamma;
    const double x0 = 2.0 * c / (alpha * cut * cut);
    if (x0 >= 1.0) throw NumericalFailure("tail expansion outside its radius of convergence");
    const double lead = std::pow(0.5 * alpha, q);
    const double lead_power = std::pow(cut, 2.0 * q + dim);
    double binom = 1.0;
    double ratio = 1.0;  // x0^k
    double sum = 0.0;
    for (int k = 0; k < 400; ++k) {
        const double e = 2.0 * q + dim - 2.0 * k;  // exponent after integration, negative
        const double term = binom * ratio * lead_power / (-e);
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
        binom *= (q - k) / (k + 1.0);
        ratio *= x0;
    }
    return lead * sum;
}

// Mass of the shape outside radius xi0 (xi0 = 0 gives the total mass).
inline double shape_mass_beyond(double gamma, int dim, double c, double xi0) {
    const double alpha = 1.0 / (dim * gamma + 2.0);
    const double omega = unit_sphere_area(dim);
    auto integrand = [&](double xi) { return shape(gamma, alpha, c, xi) * std::pow(xi, dim - 1); };
    if (gamma > 0.0) {
        const double edge = std::sqrt(2.0 * c / alpha);
        if (xi0 >= edge) return 0.0;
        boost::math::quadrature::tanh_sinh<double> integrator;
        return omega * integrator.integrate(integrand, xi0, edge, 1e-15);
    }
    const double cut = fde_tail_cut(gamma, alpha, c);
    double core = 0.0;
    if (xi0 < cut) {
        double err = 0.0;
        core = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, xi0, cut, 20,
                                                                              1e-15, &err);
    }
    return omega * (core + fde_tail_integral(gamma, dim, alpha, c, std::max(cut, xi0)));
}

}  // namespace detail

/// Constant C that gives the Barenblatt shape F total mass M.
///
/// Bisection on C against an adaptive radial quadrature of F; the fat tail of the
/// fast-diffusion shape is integrated analytically past the 1% asymptote radius.
inline double profile_constant(double gamma, int dim, double mass) {
    const DiffusionParams params(gamma, dim);  // validates the range
    if (!(mass > 0.0) || !std::isfinite(mass)) throw DomainError("mass must be positive");
    auto excess = [&](double c) { return detail::shape_mass_beyond(gamma, dim, c, 0.0) - mass; };

    // mass(C) is increasing for gamma > 0 and decreasing for gamma < 0; bracket by scanning.
    double lo = 1.0;
    double hi = 1.0;
    double flo = excess(lo);
    if (flo == 0.0) return 1.0;
    const bool increasing = params.porous_medium();
    for (int i = 0; i < 400 && ((flo > 0.0) == increasing); ++i) {
        lo *= 0.25;
        flo = excess(lo);
    }
    double fhi = excess(hi);
    for (int i = 0; i < 400 && ((fhi < 0.0) == increasing); ++i) {
        hi *= 4.0;
        fhi = excess(hi);
    }
    if ((flo > 0.0) == (fhi > 0.0) && flo != 0.0 && fhi != 0.0)
        throw NumericalFailure("could not bracket the profile constant");

    std::uintmax_t iterations = detail::kProfileMaxIterations;
    auto done = [](double a, double b) {
        return std::abs(b - a) <= detail::kProfileTolerance * std::max(1.0, std::abs(a));
    };
    const auto [a, b] = boost::math::tools::bisect(excess, lo, hi, done, iterations);
    if (!done(a, b)) throw NumericalFailure("profile constant bisection did not converge");
    return 0.5 * (a + b);
}

/// Self-similar source solution of  d_t n = |g|/(g+1) Lap n^{g+1}  with mass M,
/// evaluated at the shifted time t + tau.
class BarenblattProfile {
public:
    BarenblattProfile(const DiffusionParams& params, double mass, double time_offset = 0.0)
        : gamma_(params.gamma()), dim_(params.dim()), mass_(mass), offset_(time_offset),
          c_(nldiff::profile_constant(params.gamma(), params.dim(), mass)) {
        if (time_offset < 0.0 || !std::isfinite(time_offset))
            throw DomainError("time offset must be finite and >= 0");
    }

    double gamma() const noexcept { return gamma_; }
    int dim() const noexcept { return dim_; }
    double mass() const noexcept { return mass_; }
    double profile_constant() const noexcept { return c_; }
    double time_offset() const noexcept { return offset_; }
    double alpha() const noexcept { return 1.0 / (dim_ * gamma_ + 2.0); }
    double sign() const noexcept { return gamma_ > 0.0 ? 1.0 : -1.0; }

    /// The same mass with a different time offset.
    BarenblattProfile shifted(double time_offset) const {
        BarenblattProfile p = *this;
        if (time_offset < 0.0) throw DomainError("time offset must be >= 0");
        p.offset_ = time_offset;
        return p;
    }

    double density(double t, double r) const {
        const double tt = shifted_time(t);
        const double a = alpha();
        return std::pow(tt, -a * dim_) * detail::shape(gamma_, a, c_, r * std::pow(tt, -a));
    }

    /// Signed pressure sign(g) B^g.  Zero outside the porous-medium support.
    double pressure(double t, double r) const {
        const double tt = shifted_time(t);
        const double a = alpha();
        const double inner = c_ - sign() * 0.5 * a * r * r * std::pow(tt, -2.0 * a);
        if (gamma_ > 0.0) return inner > 0.0 ? std::pow(tt, -a * gamma_ * dim_) * inner : 0.0;
        return -std::pow(tt, -a * gamma_ * dim_) * inner;
    }

    /// Radial derivative of the signed pressure: -alpha r / t on the positivity set.
    double pressure_gradient(double t, double r) const {
        const double tt = shifted_time(t);
        if (gamma_ > 0.0 && r > support_radius(t)) return 0.0;
        return -alpha() * r / tt;
    }

    /// Laplacian of the signed pressure on the positivity set, -d alpha / t.
    double pressure_laplacian(double t, double r) const {
        const double tt = shifted_time(t);
        if (gamma_ > 0.0 && r > support_radius(t)) return 0.0;
        return -dim_ * alpha() / tt;
    }

    /// sqrt(2C/alpha) t^alpha for gamma > 0, infinity for fast diffusion.
    double support_radius(double t) const {
        if (gamma_ < 0.0) return std::numeric_limits<double>::infinity();
        const double a = alpha();
        return std::sqrt(2.0 * c_ / a) * std::pow(shifted_time(t), a);
    }

    /// Mass outside the ball of radius r at time t.
    double mass_beyond(double t, double r) const {
        const double xi = r * std::pow(shifted_time(t), -alpha());
        return detail::shape_mass_beyond(gamma_, dim_, c_, xi);
    }

    double shifted_time(double t) const {
        const double tt = t + offset_;
        if (!(tt > 0.0)) throw DomainError("profile evaluated at t + tau <= 0");
        return tt;
    }

private:
    double gamma_;
    int dim_;
    double mass_;
    double offset_;
    double c_;
};

/// Decay exponent -1 - g d (b+1) alpha of max |p|^b |grad p|^2 without drift.
inline double sharp_exponent_trivial(double gamma, int dim, double b) {
    const DiffusionParams params(gamma, dim);
    return -1.0 - gamma * dim * (b + 1.0) * params.alpha();
}

/// Exponent beta - C/(d g + 2) of the weighted gradient gap, with
/// beta = -alpha g d b - 2 + 2 alpha and C = 1 - g b d / 2.
inline double weighted_gap_exponent(double gamma, int dim, double b) {
    const DiffusionParams params(gamma, dim);
    const double a = params.alpha();
    const double beta = -a * gamma * dim * b - 2.0 + 2.0 * a;
    const double rate = 1.0 - gamma * b * dim / 2.0;
    return beta - rate * a;
}

/// Exponential rate 1 - g b d / 2 with the quadratic potential.
inline double quadratic_decay_rate(double gamma, int dim, double b) {
    return 1.0 - gamma * b * dim / 2.0;
}

}  // namespace nldiff
