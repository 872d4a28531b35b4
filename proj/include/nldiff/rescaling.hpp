#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "nldiff/errors.hpp"
#include "nldiff/functionals.hpp"
#include "nldiff/grid.hpp"
#include "nldiff/params.hpp"

namespace nldiff {

enum class ScalingDirection { ToFokkerPlanck, ToDriftless };

/// Conjugation between  d_s n = div(n grad p)  and  d_t m = div(m grad(p + |x|^2/2)):
///   m(t, x) = phi^d n(psi(t), phi x),  phi = e^t,  psi = alpha e^{t/alpha}.
/// psi' = e^{(d g + 2) t} is what the change of variables requires; the
/// additive normalisation psi(t) = alpha e^{t/alpha} makes B(alpha, .) the
/// stationary state.
class ScalingMap {
public:
    ScalingMap(const DiffusionParams& params, ScalingDirection dir) : params_(params), dir_(dir) {}

    ScalingDirection direction() const noexcept { return dir_; }
    const DiffusionParams& params() const noexcept { return params_; }
    ScalingMap inverse() const {
        return {params_, dir_ == ScalingDirection::ToDriftless ? ScalingDirection::ToFokkerPlanck
                                                               : ScalingDirection::ToDriftless};
    }

    /// Drift-less time of a Fokker-Planck time.
    double psi(double t) const {
        const double a = params_.alpha();
        return a * std::exp(t / a);
    }
    /// Fokker-Planck time of a drift-less time.
    double psi_inverse(double s) const {
        if (!(s > 0.0)) throw DomainError("drift-less time must be positive");
        const double a = params_.alpha();
        return a * std::log(s / a);
    }
    double phi(double t) const { return std::exp(t); }

    double map_time(double t) const {
        return dir_ == ScalingDirection::ToDriftless ? psi(t) : psi_inverse(t);
    }

    /// Spatial dilation applied to radii when going in this direction: y = phi x
    /// toward the drift-less frame, x = y / phi toward Fokker-Planck.
    double radius_factor(double source_time) const {
        if (dir_ == ScalingDirection::ToDriftless) return phi(source_time);
        return 1.0 / phi(psi_inverse(source_time));
    }

    /// Map a field, linearly interpolating n in r.  The default target grid is
    /// the source grid dilated by the radius factor.
    RadialField map_field(const RadialField& src, std::optional<RadialGrid> target = std::nullopt) const {
        const double k = radius_factor(src.time);
        const RadialGrid grid = target ? *target : src.grid.rescaled(k);
        const int d = grid.dim();
        if (d != src.grid.dim()) throw DomainError("dimension mismatch in map_field");
        const double out_time = map_time(src.time);
        const double amp = std::pow(k, -d);  // mass preserving amplitude
        const double src_r = src.grid.outer_radius();

        // Every positive source cell must land inside the target grid.
        std::size_t last_pos = src.size();
        for (std::size_t i = src.size(); i-- > 0;)
            if (src[i] > 0.0) {
                last_pos = i;
                break;
            }
        if (last_pos < src.size() && src.grid.center(last_pos) * k > grid.outer_radius() * (1.0 + 1e-12))
            throw CoverageError("target grid does not cover the mapped support");

        std::vector<double> v(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double r = grid.center(i) / k;
            if (r > src_r) {
                if (src.values.back() > 0.0)
                    throw CoverageError("target grid reaches past the source data at r=" + std::to_string(r));
                v[i] = 0.0;
                continue;
            }
            v[i] = amp * src.interpolate(r);
        }
        return {grid, std::move(v), out_time};
    }

    /// Turn a lipschitz_u series with b recorded on a Fokker-Planck run into the
    /// drift-less weighted gap  max |p|^b |grad p + alpha y/s|^2  at s = psi(t).
    /// Under the map the gap is (s/alpha)^beta times u, beta = -alpha g d b - 2 + 2 alpha.
    FunctionalSeries transfer_series(const FunctionalSeries& fp, double b) const {
        const double a = params_.alpha();
        const double beta = -a * params_.gamma() * params_.dim() * b - 2.0 + 2.0 * a;
        FunctionalSeries out;
        out.label = "weighted_gap_b" + std::to_string(b) + "_transferred";
        for (std::size_t k = 0; k < fp.size(); ++k) {
            const double s = psi(fp.t[k]);
            out.push(s, std::pow(s / a, beta) * fp.value[k]);
        }
        return out;
    }

private:
    DiffusionParams params_;
    ScalingDirection dir_;
};

}  // namespace nldiff
