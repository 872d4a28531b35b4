#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nldiff/errors.hpp"
#include "nldiff/grid.hpp"
#include "nldiff/params.hpp"
#include "nldiff/profiles.hpp"

namespace nldiff {

namespace detail {

inline std::vector<double> pressures(const RadialField& f, double gamma) {
    std::vector<double> p(f.size());
    const double s = gamma > 0.0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double n = f[i];
        if (n > 0.0) p[i] = s * std::pow(n, gamma);
        else if (gamma > 0.0) p[i] = 0.0;
        else throw DomainError("fast-diffusion field has a nonpositive cell");
    }
    return p;
}

// Radial derivative at cell centres.  Mirror ghost at r = 0, second-order
// backward difference at the outer cell, one-sided from the positive side at a
// free boundary.  Cells with n = 0 get 0.
inline std::vector<double> radial_gradient(const std::vector<double>& v, const std::vector<double>& n,
                                           double dr) {
    const std::size_t m = v.size();
    std::vector<double> g(m, 0.0);
    auto pos = [&](std::size_t i) { return n[i] > 0.0; };
    for (std::size_t i = 0; i < m; ++i) {
        if (!pos(i)) continue;
        const bool left = i > 0 ? pos(i - 1) : true;  // mirror cell is the cell itself
        const bool right = i + 1 < m ? pos(i + 1) : false;
        const double vl = i > 0 ? v[i - 1] : v[0];
        if (i + 1 == m) {
            if (m >= 3 && pos(i - 1) && pos(i - 2))
                g[i] = (3.0 * v[i] - 4.0 * v[i - 1] + v[i - 2]) / (2.0 * dr);
            else if (pos(i - 1))
                g[i] = (v[i] - v[i - 1]) / dr;
        } else if (left && right) {
            g[i] = (v[i + 1] - vl) / (2.0 * dr);
        } else if (left) {
            g[i] = i > 0 ? (v[i] - v[i - 1]) / dr : 0.0;
        } else if (right) {
            g[i] = (v[i + 1] - v[i]) / dr;
        }
    }
    return g;
}

inline double abs_pow(double p, double b) {
    if (b == 0.0) return 1.0;
    if (b == 1.0) return std::abs(p);
    return std::pow(std::abs(p), b);
}

}  // namespace detail

/// Value of a max-type functional plus where it was attained.
struct MaxResult {
    double value = 0.0;
    double argmax_r = 0.0;
    bool excluded_cells = false;  // b <= 0 and zero-pressure cells bordered positive ones
};

/// max |p|^b |p' + k(r)|^2 over cells, with k supplied per radius.
template <class Shift>
MaxResult weighted_pressure_max(const RadialField& f, double gamma, double b, Shift&& shift) {
    const auto p = detail::pressures(f, gamma);
    const auto g = detail::radial_gradient(p, f.values, f.grid.spacing());
    MaxResult res;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!(f[i] > 0.0)) {
            if (b <= 0.0) {
                const bool borders = (i > 0 && f[i - 1] > 0.0) || (i + 1 < f.size() && f[i + 1] > 0.0);
                res.excluded_cells = res.excluded_cells || borders;
            }
            continue;
        }
        const double r = f.grid.center(i);
        const double q = g[i] + shift(r);
        const double v = detail::abs_pow(p[i], b) * q * q;
        if (v > res.value) {
            res.value = v;
            res.argmax_r = r;
        }
    }
    return res;
}

/// u(t) = max |p|^b |grad p + grad V|^2.
inline MaxResult lipschitz_u_detail(const RadialField& f, const DiffusionParams& params, double b) {
    const auto& v = params.potential();
    const int d = params.dim();
    return weighted_pressure_max(f, params.gamma(), b, [&](double r) { return v.radial_derivative(r, d); });
}

inline double lipschitz_u(const RadialField& f, const DiffusionParams& params, double b) {
    return lipschitz_u_detail(f, params, b).value;
}

/// Reference drift in the weighted gap.  SelfSimilar uses alpha x/t, which
/// vanishes on the Barenblatt profile; Literal uses x/t.
enum class GapReference { SelfSimilar, Literal };

/// max |p|^b |grad p + c x/t|^2 with c = alpha (SelfSimilar) or 1 (Literal).
inline MaxResult weighted_gradient_gap_detail(const RadialField& f, const DiffusionParams& params, double t,
                                              double b, GapReference ref = GapReference::SelfSimilar) {
    if (!(t > 0.0)) throw DomainError("weighted gap needs t > 0");
    const double c = ref == GapReference::SelfSimilar ? params.alpha() : 1.0;
    return weighted_pressure_max(f, params.gamma(), b, [&](double r) { return c * r / t; });
}

inline double weighted_gradient_gap(const RadialField& f, const DiffusionParams& params, double t, double b,
                                    GapReference ref = GapReference::SelfSimilar) {
    return weighted_gradient_gap_detail(f, params, t, b, ref).value;
}

/// I(n) = int n |x + grad p|^2.
inline double fisher_information(const RadialField& f, double gamma) {
    const auto p = detail::pressures(f, gamma);
    const auto g = detail::radial_gradient(p, f.values, f.grid.spacing());
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!(f[i] > 0.0)) continue;
        const double q = f.grid.center(i) + g[i];
        s += f[i] * q * q * f.grid.volume(i);
    }
    return f.grid.sphere_area() * s;
}

/// Minimum of the discrete radial Laplacian p'' + (d-1) p'/r over cells whose
/// stencil lies in the positivity set.  The outer cell is skipped.
inline double aronson_benilan_min(const RadialField& f, double gamma) {
    const auto p = detail::pressures(f, gamma);
    const double dr = f.grid.spacing();
    const int d = f.grid.dim();
    double best = std::numeric_limits<double>::infinity();
    if (f[0] > 0.0 && f[1] > 0.0) best = d * (p[1] - p[0]) / (dr * dr);
    for (std::size_t i = 1; i + 1 < f.size(); ++i) {
        if (!(f[i - 1] > 0.0 && f[i] > 0.0 && f[i + 1] > 0.0)) continue;
        const double r = f.grid.center(i);
        const double lap = (p[i + 1] - 2.0 * p[i] + p[i - 1]) / (dr * dr) +
                           (d - 1) * (p[i + 1] - p[i - 1]) / (2.0 * dr * r);
        best = std::min(best, lap);
    }
    return std::isfinite(best) ? best : 0.0;
}

/// Lower bound -1/((g + 2/d) t) on the Laplacian of the pressure.
inline double aronson_benilan_bound(double gamma, int dim, double t) {
    return -1.0 / ((gamma + 2.0 / dim) * t);
}

inline double relative_error(const RadialField& f, const BarenblattProfile& profile) {
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double ref = profile.density(f.time, f.grid.center(i));
        if (!(ref > 0.0) || !(f[i] > 0.0)) throw DomainError("relative error needs positive densities");
        worst = std::max(worst, std::abs(f[i] - ref) / ref);
    }
    return worst;
}

/// L1 distance between the piecewise-constant field and the exact profile,
/// integrated cell by cell, plus the profile mass beyond the grid.
inline double l1_error(const RadialField& f, const BarenblattProfile& profile) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    const auto& g = f.grid;
    const int d = g.dim();
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto h = [&](double r) { return std::abs(f[i] - profile.density(f.time, r)) * std::pow(r, d - 1); };
        s += GK::integrate(h, g.face(i), g.face(i + 1), 10, 1e-12);
    }
    return g.sphere_area() * s + profile.mass_beyond(f.time, g.outer_radius());
}

inline double linf(const RadialField& f) { return f.max(); }

/// max (n')^2 over cells.
inline double max_density_gradient_sq(const RadialField& f) {
    const auto g = detail::radial_gradient(f.values, f.values, f.grid.spacing());
    double m = 0.0;
    for (double v : g) m = std::max(m, v * v);
    return m;
}

/// What lies beyond the outer radius when measuring tails.
struct TailModel {
    enum class Kind { Truncated, Barenblatt, PowerLaw };
    Kind kind = Kind::Truncated;
    std::optional<BarenblattProfile> profile;  // Barenblatt: exact tail of this profile
    double coefficient = 0.0;                  // PowerLaw: n = coefficient r^{-exponent}
    double exponent = 0.0;

    static TailModel truncated() { return {}; }
    static TailModel barenblatt(const BarenblattProfile& p) { return {Kind::Barenblatt, p, 0.0, 0.0}; }
    static TailModel power_law(double k, double e) { return {Kind::PowerLaw, std::nullopt, k, e}; }

    /// Mass outside radius r >= grid radius at time t; infinite if the tail is not integrable.
    double mass_beyond(double t, double r, int dim) const {
        switch (kind) {
            case Kind::Truncated: return 0.0;
            case Kind::Barenblatt: return profile->mass_beyond(t, r);
            case Kind::PowerLaw:
                if (exponent <= dim) return std::numeric_limits<double>::infinity();
                return unit_sphere_area(dim) * coefficient * std::pow(r, dim - exponent) / (exponent - dim);
        }
        return 0.0;
    }
};

/// sup_R R^{-2/g - d} * (mass outside B_R), over face radii and, with a tail
/// model, a geometric set of radii past the grid.  Infinity flags divergence.
inline double x_norm(const RadialField& f, double gamma, const TailModel& tail = TailModel::truncated()) {
    const int d = f.grid.dim();
    const double w = -2.0 / gamma - d;
    const double outer = f.grid.outer_radius();
    const double beyond = tail.mass_beyond(f.time, outer, d);
    if (!std::isfinite(beyond)) return std::numeric_limits<double>::infinity();
    double inside = beyond;
    double best = std::pow(outer, w) * beyond;
    for (std::size_t j = f.size(); j-- > 1;) {
        inside += f.grid.sphere_area() * f[j] * f.grid.volume(j);
        best = std::max(best, std::pow(f.grid.face(j), w) * inside);
    }
    if (tail.kind != TailModel::Kind::Truncated) {
        for (double r = outer * 1.25; r < outer * 1e4; r *= 1.25) {
            const double m = tail.mass_beyond(f.time, r, d);
            if (!std::isfinite(m)) return std::numeric_limits<double>::infinity();
            best = std::max(best, std::pow(r, w) * m);
        }
    }
    return best;
}

enum class FunctionalKind {
    LipschitzU,
    LinfDensity,
    Mass,
    Fisher,
    ABmin,
    RelativeError,
    Xnorm,
    WeightedGap,
    DensityGradient,
};

inline std::string kind_name(FunctionalKind k) {
    switch (k) {
        case FunctionalKind::LipschitzU: return "lipschitz_u";
        case FunctionalKind::LinfDensity: return "linf";
        case FunctionalKind::Mass: return "mass";
        case FunctionalKind::Fisher: return "fisher";
        case FunctionalKind::ABmin: return "ab_min";
        case FunctionalKind::RelativeError: return "relative_error";
        case FunctionalKind::Xnorm: return "x_norm";
        case FunctionalKind::WeightedGap: return "weighted_gap";
        case FunctionalKind::DensityGradient: return "lip_n";
    }
    return "unknown";
}

/// A functional to record along a run.
struct FunctionalRequest {
    FunctionalKind kind = FunctionalKind::LipschitzU;
    double b = 0.0;
    std::optional<BarenblattProfile> profile;  // RelativeError
    GapReference reference = GapReference::SelfSimilar;
    TailModel tail;

    static FunctionalRequest lipschitz(double b) { return {FunctionalKind::LipschitzU, b, {}, {}, {}}; }
    static FunctionalRequest gap(double b, GapReference ref = GapReference::SelfSimilar) {
        return {FunctionalKind::WeightedGap, b, {}, ref, {}};
    }
    static FunctionalRequest simple(FunctionalKind k) { return {k, 0.0, {}, {}, {}}; }
    static FunctionalRequest relative(const BarenblattProfile& p) {
        return {FunctionalKind::RelativeError, 0.0, p, {}, {}};
    }

    std::string label() const {
        std::ostringstream os;
        os << kind_name(kind);
        if (kind == FunctionalKind::LipschitzU || kind == FunctionalKind::WeightedGap) os << "_b" << b;
        if (kind == FunctionalKind::WeightedGap && reference == GapReference::Literal) os << "_literal";
        return os.str();
    }
};

inline double evaluate(const FunctionalRequest& q, const RadialField& f, const DiffusionParams& params) {
    switch (q.kind) {
        case FunctionalKind::LipschitzU: return lipschitz_u(f, params, q.b);
        case FunctionalKind::LinfDensity: return linf(f);
        case FunctionalKind::Mass: return f.mass();
        case FunctionalKind::Fisher: return fisher_information(f, params.gamma());
        case FunctionalKind::ABmin: return aronson_benilan_min(f, params.gamma());
        case FunctionalKind::RelativeError:
            if (!q.profile) throw DomainError("relative error needs a reference profile");
            return relative_error(f, *q.profile);
        case FunctionalKind::Xnorm: return x_norm(f, params.gamma(), q.tail);
        case FunctionalKind::WeightedGap: return weighted_gradient_gap(f, params, f.time, q.b, q.reference);
        case FunctionalKind::DensityGradient: return max_density_gradient_sq(f);
    }
    return 0.0;
}

/// Time-ordered samples of one functional.
struct FunctionalSeries {
    std::string label;
    std::vector<double> t;
    std::vector<double> value;

    void push(double time, double v) {
        if (!t.empty() && !(time > t.back())) throw DomainError("series times must increase strictly");
        t.push_back(time);
        value.push_back(v);
    }
    std::size_t size() const noexcept { return t.size(); }
    bool empty() const noexcept { return t.empty(); }
};

}  // namespace nldiff
