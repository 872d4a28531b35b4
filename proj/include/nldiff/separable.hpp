#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "nldiff/errors.hpp"
#include "nldiff/grid.hpp"

namespace nldiff {

/// Separable solution n = a(r) b(t) of the porous-medium equation on the ball
/// of radius R with homogeneous Dirichlet data.
///
/// b solves b' = -(|g|/(g+1)) b^{g+1}; the spatial part a~ = a^{g+1} solves
/// -Lap a~ = a~^{1/(g+1)}, a~'(0) = 0, a~(R) = 0 and is found by shooting
/// on a~(0).
class DirichletSeparable {
public:
    static constexpr int kSteps = 4096;

    DirichletSeparable(double gamma, int dim, double radius, double b0)
        : gamma_(gamma), dim_(dim), radius_(radius), b0_(b0) {
        if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("separable solution needs gamma > 0");
        if (dim < 1) throw DomainError("dimension must be >= 1");
        if (!(radius > 0.0)) throw DomainError("ball radius must be positive");
        if (!(b0 > 0.0)) throw DomainError("b0 must be positive");
        shoot();
    }

    double gamma() const noexcept { return gamma_; }
    int dim() const noexcept { return dim_; }
    double radius() const noexcept { return radius_; }
    double central_value() const noexcept { return central_; }  // a~(0)

    double time_factor(double t) const {
        const double base = std::pow(b0_, -gamma_) + gamma_ * gamma_ * t / (gamma_ + 1.0);
        if (!(base > 0.0)) throw DomainError("time factor evaluated before its blow-up time");
        return std::pow(base, -1.0 / gamma_);
    }

    /// a~ = a^{g+1} by cubic Hermite interpolation of the shooting table.
    double transformed(double r) const {
        if (r < 0.0 || r > radius_ * (1.0 + 1e-12)) throw DomainError("radius outside the ball");
        const double h = radius_ / kSteps;
        double s = r / h;
        auto k = static_cast<std::size_t>(s);
        if (k >= static_cast<std::size_t>(kSteps)) k = kSteps - 1;
        s -= static_cast<double>(k);
        const double s2 = s * s, s3 = s2 * s;
        const double v = (2 * s3 - 3 * s2 + 1) * y_[k] + (s3 - 2 * s2 + s) * h * z_[k] +
                         (-2 * s3 + 3 * s2) * y_[k + 1] + (s3 - s2) * h * z_[k + 1];
        return std::max(v, 0.0);
    }

    /// Radial derivative of a~ at r = R (negative: outward normal derivative).
    double boundary_slope() const { return z_.back(); }
    double boundary_value() const { return y_.back(); }

    double spatial(double r) const { return std::pow(transformed(r), 1.0 / (gamma_ + 1.0)); }

    double density(double t, double r) const { return spatial(r) * time_factor(t); }

    RadialField sample(const RadialGrid& grid, double t) const {
        if (grid.outer_radius() > radius_ * (1.0 + 1e-12))
            throw DomainError("grid extends past the Dirichlet ball");
        return RadialField::sample(grid, t, [&](double r) { return density(t, r); });
    }

private:
    // RK4 on (y, z) = (a~, a~') from r = 0; returns y(R).  The source uses y_+
    // so a trajectory that crosses zero keeps decreasing and y(R) < 0.
    double integrate(double a0, bool store) {
        const double q = 1.0 / (gamma_ + 1.0);
        const double h = radius_ / kSteps;
        const int d = dim_;
        auto rhs = [&](double r, double y, double z) -> std::array<double, 2> {
            const double src = y > 0.0 ? std::pow(y, q) : 0.0;
            if (r == 0.0) return {z, -src / d};
            return {z, -(d - 1) * z / r - src};
        };
        double y = a0, z = 0.0;
        if (store) {
            y_.assign(kSteps + 1, 0.0);
            z_.assign(kSteps + 1, 0.0);
            y_[0] = y;
        }
        for (int k = 0; k < kSteps; ++k) {
            const double r = k * h;
            const auto k1 = rhs(r, y, z);
            const auto k2 = rhs(r + 0.5 * h, y + 0.5 * h * k1[0], z + 0.5 * h * k1[1]);
            const auto k3 = rhs(r + 0.5 * h, y + 0.5 * h * k2[0], z + 0.5 * h * k2[1]);
            const auto k4 = rhs(r + h, y + h * k3[0], z + h * k3[1]);
            y += h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
            z += h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
            if (store) {
                y_[k + 1] = y;
                z_[k + 1] = z;
            }
        }
        if (!std::isfinite(y)) throw NumericalFailure("shooting produced a non-finite value");
        return y;
    }

    void shoot() {
        // The first zero sits at R1 * a~(0)^{(1-q)/2}: small a~(0) crosses before R.
        double lo = 1.0, hi = 1.0;
        double flo = integrate(lo, false);
        for (int i = 0; i < 200 && flo >= 0.0; ++i) flo = integrate(lo *= 0.5, false);
        double fhi = integrate(hi, false);
        for (int i = 0; i < 200 && fhi <= 0.0; ++i) fhi = integrate(hi *= 2.0, false);
        if (flo >= 0.0 || fhi <= 0.0) throw NumericalFailure("could not bracket the shooting parameter");
        for (int it = 0; it < 300; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double f = integrate(mid, false);
            if (std::abs(f) < 1e-9 * mid) {
                central_ = mid;
                integrate(mid, true);
                y_.back() = std::max(y_.back(), 0.0);
                return;
            }
            (f < 0.0 ? lo : hi) = mid;
        }
        throw NumericalFailure("shooting for the separable profile did not converge");
    }

    double gamma_;
    int dim_;
    double radius_;
    double b0_;
    double central_ = 0.0;
    std::vector<double> y_;
    std::vector<double> z_;
};

}  // namespace nldiff
