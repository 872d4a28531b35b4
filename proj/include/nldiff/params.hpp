#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "nldiff/errors.hpp"

namespace nldiff {

/// Value, radial derivative and Laplacian of a radial potential at one radius.
struct PotentialSample {
    double value = 0.0;
    double radial_derivative = 0.0;
    double laplacian = 0.0;
};

enum class PotentialKind { Trivial, Quadratic, BoundedGeneric };

/// Radial confinement potential V(|x|).
///
/// Trivial is V = 0 and Quadratic is V = |x|^2/2. BoundedGeneric delegates to a
/// callback that must return V, V' and the d-dimensional Laplacian analytically.
class Potential {
public:
    using Callback = std::function<PotentialSample(double r, int dim)>;

    Potential() = default;

    static Potential trivial() { return Potential{}; }

    static Potential quadratic() {
        Potential v;
        v.kind_ = PotentialKind::Quadratic;
        return v;
    }

    static Potential bounded(Callback cb) {
        if (!cb) throw DomainError("bounded potential requires a callback");
        Potential v;
        v.kind_ = PotentialKind::BoundedGeneric;
        v.callback_ = std::move(cb);
        return v;
    }

    /// V(r) = sqrt(1 + r^2); gradient and Hessian are globally bounded.
    static Potential soft_cone() {
        return bounded([](double r, int dim) {
            const double s = std::sqrt(1.0 + r * r);
            return PotentialSample{s, r / s, 1.0 / (s * s * s) + (dim - 1) / s};
        });
    }

    PotentialKind kind() const noexcept { return kind_; }

    PotentialSample sample(double r, int dim) const {
        switch (kind_) {
            case PotentialKind::Trivial:
                return {};
            case PotentialKind::Quadratic:
                return {0.5 * r * r, r, static_cast<double>(dim)};
            case PotentialKind::BoundedGeneric:
                return callback_(r, dim);
        }
        return {};
    }

    double radial_derivative(double r, int dim) const {
        if (kind_ == PotentialKind::Trivial) return 0.0;
        if (kind_ == PotentialKind::Quadratic) return r;
        return callback_(r, dim).radial_derivative;
    }

    std::string name() const {
        switch (kind_) {
            case PotentialKind::Trivial: return "trivial";
            case PotentialKind::Quadratic: return "quadratic";
            case PotentialKind::BoundedGeneric: return "bounded";
        }
        return "unknown";
    }

private:
    PotentialKind kind_ = PotentialKind::Trivial;
    Callback callback_;
};

/// Problem instance: pressure exponent gamma, space dimension and potential.
///
/// gamma > 0 is the porous medium regime, -2/d < gamma < 0 fast diffusion.
/// d = 1 is accepted for solver sanity checks even though the decay theory
/// is stated for d >= 2; `outside_theory_range()` reports it.
class DiffusionParams {
public:
    DiffusionParams(double gamma, int dim, Potential potential = Potential::trivial())
        : gamma_(gamma), dim_(dim), potential_(std::move(potential)) {
        if (dim_ < 1) throw DomainError("dimension must be >= 1");
        if (!std::isfinite(gamma_) || gamma_ == 0.0)
            throw DomainError("gamma must be finite and nonzero");
        if (gamma_ <= -2.0 / dim_)
            throw DomainError("gamma must exceed -2/d (got gamma=" + std::to_string(gamma_) +
                              ", d=" + std::to_string(dim_) + ")");
    }

    double gamma() const noexcept { return gamma_; }
    int dim() const noexcept { return dim_; }
    const Potential& potential() const noexcept { return potential_; }

    /// Self-similar exponent 1/(d gamma + 2).
    double alpha() const noexcept { return 1.0 / (dim_ * gamma_ + 2.0); }
    double sign() const noexcept { return gamma_ > 0.0 ? 1.0 : -1.0; }
    bool porous_medium() const noexcept { return gamma_ > 0.0; }
    bool fast_diffusion() const noexcept { return gamma_ < 0.0; }
    bool outside_theory_range() const noexcept { return dim_ < 2; }

    /// Coefficient |gamma|/(gamma+1) of the flux form  d_t n = c Lap n^{gamma+1}.
    double diffusion_coefficient() const noexcept { return std::abs(gamma_) / (gamma_ + 1.0); }

    /// p = sign(gamma) n^gamma.
    double pressure_of(double n) const {
        if (n <= 0.0) {
            if (gamma_ > 0.0) return 0.0;
            throw DomainError("fast-diffusion pressure needs positive density");
        }
        return sign() * std::pow(n, gamma_);
    }

    DiffusionParams with_potential(Potential v) const { return {gamma_, dim_, std::move(v)}; }

private:
    double gamma_;
    int dim_;
    Potential potential_;
};

/// Surface area of the unit sphere in R^d; d = 1 counts the two endpoints.
inline double unit_sphere_area(int dim) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

}  // namespace nldiff
