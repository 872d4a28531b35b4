#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nldiff/errors.hpp"
#include "nldiff/functionals.hpp"
#include "nldiff/grid.hpp"
#include "nldiff/params.hpp"
#include "nldiff/profiles.hpp"

namespace nldiff {

/// Ghost-cell data for a truncated fast-diffusion run: a nonnegative
/// combination of Barenblatt profiles evaluated just outside R.
struct FarField {
    std::vector<std::pair<double, BarenblattProfile>> mixture;

    explicit FarField(const BarenblattProfile& p) { mixture.emplace_back(1.0, p); }
    FarField() = default;

    double density(double t, double r) const {
        double s = 0.0;
        for (const auto& [w, p] : mixture) s += w * p.density(t, r);
        return s;
    }
};

enum class BoundaryMode { NeumannZeroFlux, FarFieldBarenblatt };

/// Upwind: drift flux n_upwind * (-V') added to the diffusive flux.
/// WellBalanced: total flux -m (q_j - q_{j-1}) / dr with q = p + V and the
/// mobility m = c (w_j - w_{j-1}) / (p_j - p_{j-1}) implied by the diffusive
/// flux, so discrete states with q constant are exactly stationary.  With
/// V = 0 both reduce to the same two-point flux of n^{g+1}.
enum class DriftScheme { Upwind, WellBalanced };

/// Ghost value beyond the outer face: the far-field density at R + dr/2.
inline double far_field_boundary(const FarField& ff, const RadialGrid& grid, double t) {
    return ff.density(t, grid.outer_radius() + 0.5 * grid.spacing());
}

/// Initial data recipes.
struct InitialCondition {
    enum class Kind { Barenblatt, TruncatedBarenblatt, Annulus, Table };
    Kind kind = Kind::Barenblatt;
    double mass = 1.0;
    double profile_time = 1.0;   // Barenblatt kinds: B(profile_time, .)
    double truncate_at = 0.0;    // TruncatedBarenblatt: zero beyond this radius
    double inner = 1.0;          // Annulus support [inner, outer]
    double outer = 2.0;
    std::vector<double> table_r;  // Table: (r, n) pairs, linearly interpolated
    std::vector<double> table_n;

    static InitialCondition barenblatt(double mass, double time) {
        InitialCondition ic;
        ic.mass = mass;
        ic.profile_time = time;
        return ic;
    }
    static InitialCondition annulus(double mass, double inner, double outer) {
        InitialCondition ic;
        ic.kind = Kind::Annulus;
        ic.mass = mass;
        ic.inner = inner;
        ic.outer = outer;
        return ic;
    }

    RadialField build(const DiffusionParams& params, const RadialGrid& grid, double t0) const {
        switch (kind) {
            case Kind::Barenblatt:
            case Kind::TruncatedBarenblatt: {
                const BarenblattProfile p(params, mass);
                const double cut = kind == Kind::TruncatedBarenblatt ? truncate_at
                                                                     : std::numeric_limits<double>::infinity();
                return RadialField::sample(grid, t0, [&](double r) {
                    return r <= cut ? p.density(profile_time, r) : 0.0;
                });
            }
            case Kind::Annulus: {
                // Smooth bump (1 - s^2)^2 across the annulus, scaled to the requested mass.
                if (!(outer > inner) || inner < 0.0) throw DomainError("annulus needs 0 <= inner < outer");
                if (params.fast_diffusion()) throw DomainError("annulus data has zeros; not valid for fast diffusion");
                const double mid = 0.5 * (inner + outer), half = 0.5 * (outer - inner);
                auto f = RadialField::sample(grid, t0, [&](double r) {
                    const double s = (r - mid) / half;
                    return std::abs(s) < 1.0 ? (1.0 - s * s) * (1.0 - s * s) : 0.0;
                });
                const double m = f.mass();
                if (!(m > 0.0)) throw DomainError("annulus not resolved by the grid");
                for (double& v : f.values) v *= mass / m;
                return f;
            }
            case Kind::Table: {
                if (table_r.size() < 2 || table_r.size() != table_n.size())
                    throw DomainError("initial table needs matching r and n columns");
                return RadialField::sample(grid, t0, [&](double r) {
                    auto it = std::upper_bound(table_r.begin(), table_r.end(), r);
                    if (it == table_r.begin()) return table_n.front();
                    if (it == table_r.end()) return table_n.back();
                    const std::size_t k = static_cast<std::size_t>(it - table_r.begin());
                    const double w = (r - table_r[k - 1]) / (table_r[k] - table_r[k - 1]);
                    return (1.0 - w) * table_n[k - 1] + w * table_n[k];
                });
            }
        }
        throw DomainError("unknown initial condition");
    }
};

struct SolverConfig {
    DiffusionParams params{1.0, 2};
    RadialGrid grid{256, 1.0, 2};
    std::optional<RadialField> initial;  // overrides initial_condition when set
    InitialCondition initial_condition;
    double t_start = 1.0;
    double t_end = 2.0;
    double cfl = 0.9;
    BoundaryMode boundary = BoundaryMode::NeumannZeroFlux;
    DriftScheme drift = DriftScheme::Upwind;
    FarField far_field;
    std::vector<FunctionalRequest> record;
    int samples_per_decade = 32;
    std::vector<double> sample_times;  // explicit sample times replace the geometric cadence
    bool keep_fields = true;

    void validate() const {
        if (!(cfl > 0.0 && cfl <= 1.0)) throw DomainError("CFL safety factor must lie in (0, 1]");
        if (!(t_end > t_start)) throw DomainError("end time must exceed start time");
        if (grid.dim() != params.dim()) throw DomainError("grid and problem dimension differ");
        if (boundary == BoundaryMode::FarFieldBarenblatt) {
            if (!params.fast_diffusion()) throw DomainError("far-field boundary is only for fast diffusion");
            if (params.potential().kind() != PotentialKind::Trivial)
                throw DomainError("far-field boundary needs a trivial potential");
            if (far_field.mixture.empty()) throw DomainError("far-field boundary needs a profile");
        }
        if (samples_per_decade < 1) throw DomainError("samples per decade must be positive");
        if (initial && !(initial->grid == grid)) throw DomainError("initial field lives on another grid");
    }
};

/// Inside mass and cumulative outflow through R at one sample.
struct MassRecord {
    double t;
    double inside;
    double outflow;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<RadialField> fields;
    std::vector<FunctionalSeries> series;
    std::vector<MassRecord> ledger;
    std::size_t steps = 0;
    bool excluded_cell_warning = false;

    const FunctionalSeries& find(const std::string& label) const {
        for (const auto& s : series)
            if (s.label == label) return s;
        throw DomainError("no series named " + label);
    }
};

/// Explicit finite-volume stepper; holds face data that depend only on the
/// grid and potential so repeated steps do not recompute them.
class Stepper {
public:
    Stepper(const SolverConfig& cfg)
        : params_(cfg.params), grid_(cfg.grid), cfl_(cfg.cfl), mode_(cfg.boundary), drift_(cfg.drift),
          far_(cfg.far_field) {
        const std::size_t n = grid_.size();
        velocity_.assign(n + 1, 0.0);
        const auto& v = params_.potential();
        max_speed_ = 0.0;
        for (std::size_t j = 1; j <= n; ++j) {
            velocity_[j] = -v.radial_derivative(grid_.face(j), grid_.dim());
            max_speed_ = std::max(max_speed_, std::abs(velocity_[j]));
        }
        // The outer face is closed in Neumann mode, but its drift still bounds dt.
        if (mode_ == BoundaryMode::NeumannZeroFlux) velocity_[n] = 0.0;
        flux_.assign(n + 1, 0.0);
        w_.assign(n, 0.0);
        p_.assign(n, 0.0);
        potential_.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) potential_[i] = v.sample(grid_.center(i), grid_.dim()).value;
        trivial_ = v.kind() == PotentialKind::Trivial;
        limit_.assign(n, 1.0);
        const double e = params_.gamma() + 1.0;
        power_kind_ = e == 2.0 ? 2 : e == 1.5 ? 1 : e == 0.5 ? 3 : 0;
    }

    double power(double n) const {
        switch (power_kind_) {
            case 2: return n * n;
            case 1: return n * std::sqrt(n);
            case 3: return std::sqrt(n);
            default: return std::pow(n, params_.gamma() + 1.0);
        }
    }

    /// dt = cfl / (1/dt_diff + 1/dt_drift); infinity when nothing constrains it.
    double cfl_dt(const RadialField& f) const {
        const double ag = std::abs(params_.gamma());
        double dmax = 0.0;
        auto diff = [&](double n) { return n > 0.0 ? ag * power(n) / n : 0.0; };
        for (std::size_t i = 0; i < f.size(); ++i) dmax = std::max(dmax, diff(f[i]));
        if (mode_ == BoundaryMode::FarFieldBarenblatt)
            dmax = std::max(dmax, diff(far_field_boundary(far_, grid_, f.time)));
        const double dr = grid_.spacing();
        const double inv = (dmax > 0.0 ? 2.0 * grid_.dim() * dmax / (dr * dr) : 0.0) +
                           (max_speed_ > 0.0 ? max_speed_ / dr : 0.0);
        if (inv == 0.0) return std::numeric_limits<double>::infinity();
        return cfl_ / inv;
    }

    /// Advance in place by dt; returns the mass that left through R (d-dim measure).
    double step(RadialField& f, double dt) {
        const std::size_t n = f.size();
        const double c = params_.diffusion_coefficient();
        const double dr = grid_.spacing();
        auto& u = f.values;
        for (std::size_t i = 0; i < n; ++i) w_[i] = power(u[i]);

        flux_[0] = 0.0;
        if (drift_ == DriftScheme::WellBalanced && !trivial_) {
            const double g = params_.gamma();
            for (std::size_t i = 0; i < n; ++i) p_[i] = u[i] > 0.0 ? w_[i] / u[i] * (g > 0.0 ? 1.0 : -1.0) : 0.0;
            for (std::size_t j = 1; j < n; ++j) {
                const double dp = p_[j] - p_[j - 1];
                const double dw = w_[j] - w_[j - 1];
                // Mean-value mobility; equal pressures fall back to the shared density.
                const double m = std::abs(dp) > 1e-14 * (std::abs(p_[j]) + std::abs(p_[j - 1]))
                                     ? c * dw / dp
                                     : 0.5 * (u[j] + u[j - 1]);
                flux_[j] = -m * (dp + potential_[j] - potential_[j - 1]) / dr;
            }
        } else {
            for (std::size_t j = 1; j < n; ++j) {
                const double v = velocity_[j];
                const double up = v > 0.0 ? u[j - 1] : u[j];
                flux_[j] = -c * (w_[j] - w_[j - 1]) / dr + v * up;
            }
        }
        if (mode_ == BoundaryMode::FarFieldBarenblatt) {
            const double ghost = far_field_boundary(far_, grid_, f.time);
            flux_[n] = -c * (power(ghost) - w_[n - 1]) / dr;
        } else {
            flux_[n] = 0.0;
        }

        // Cap each donor's outflow at its content.
        for (std::size_t i = 0; i < n; ++i) {
            const double out = dt * (grid_.face_area(i + 1) * std::max(flux_[i + 1], 0.0) +
                                     grid_.face_area(i) * std::max(-flux_[i], 0.0));
            const double have = u[i] * grid_.volume(i);
            limit_[i] = out > have ? (out > 0.0 ? have / out : 1.0) : 1.0;
        }
        for (std::size_t j = 1; j <= n; ++j) {
            if (flux_[j] > 0.0) flux_[j] *= limit_[j - 1];
            else if (j < n) flux_[j] *= limit_[j];
        }

        const double tol = 1e-13 * std::max(1.0, f.max());
        for (std::size_t i = 0; i < n; ++i) {
            const double div = grid_.face_area(i + 1) * flux_[i + 1] - grid_.face_area(i) * flux_[i];
            double v = u[i] - dt * div / grid_.volume(i);
            if (!std::isfinite(v)) throw NumericalFailure("non-finite density at cell " + std::to_string(i));
            if (v < 0.0) {
                if (v < -tol) throw InstabilityError("negative density " + std::to_string(v), i);
                v = 0.0;
            }
            if (params_.fast_diffusion() && !(v > 0.0))
                throw InstabilityError("fast-diffusion density lost positivity", i);
            u[i] = v;
        }
        f.time += dt;
        return grid_.sphere_area() * dt * grid_.face_area(n) * flux_[n];
    }

private:
    DiffusionParams params_;
    RadialGrid grid_;
    double cfl_;
    BoundaryMode mode_;
    DriftScheme drift_;
    FarField far_;
    std::vector<double> velocity_;
    std::vector<double> p_;
    std::vector<double> potential_;
    bool trivial_ = true;
    std::vector<double> flux_;
    std::vector<double> w_;
    std::vector<double> limit_;
    double max_speed_ = 0.0;
    int power_kind_ = 0;
};

inline double cfl_dt(const RadialField& f, const SolverConfig& cfg) { return Stepper(cfg).cfl_dt(f); }

/// One explicit step; throws if dt exceeds the CFL limit.
inline RadialField step(const RadialField& f, double dt, const SolverConfig& cfg) {
    Stepper s(cfg);
    if (dt > s.cfl_dt(f) * (1.0 + 1e-12)) throw DomainError("time step exceeds the CFL limit");
    RadialField out = f;
    s.step(out, dt);
    return out;
}

/// Geometric sample times t0 * 10^{k/m} in [t0, t1], always including both ends.
inline std::vector<double> geometric_times(double t0, double t1, int per_decade) {
    if (!(t0 > 0.0) || !(t1 > t0)) throw DomainError("geometric cadence needs 0 < t0 < t1");
    std::vector<double> ts{t0};
    for (int k = 1;; ++k) {
        const double t = t0 * std::pow(10.0, static_cast<double>(k) / per_decade);
        if (t >= t1 * (1.0 - 1e-12)) break;
        ts.push_back(t);
    }
    ts.push_back(t1);
    return ts;
}

using SampleCallback = std::function<void(const RadialField&)>;

/// Integrate from the initial data to t_end, sampling functionals on the cadence.
inline Trajectory run(const SolverConfig& cfg, const SampleCallback& on_sample = {}) {
    cfg.validate();
    RadialField f = cfg.initial ? *cfg.initial : cfg.initial_condition.build(cfg.params, cfg.grid, cfg.t_start);
    f.time = cfg.t_start;
    std::vector<double> ts = cfg.sample_times.empty()
                                 ? geometric_times(cfg.t_start, cfg.t_end, cfg.samples_per_decade)
                                 : cfg.sample_times;
    if (!std::is_sorted(ts.begin(), ts.end()) || ts.front() < cfg.t_start || ts.back() > cfg.t_end)
        throw DomainError("sample times must be sorted inside [t_start, t_end]");

    Trajectory tr;
    for (const auto& q : cfg.record) tr.series.push_back({q.label(), {}, {}});
    Stepper stepper(cfg);
    double outflow = 0.0;

    auto sample = [&] {
        tr.times.push_back(f.time);
        for (std::size_t k = 0; k < cfg.record.size(); ++k) {
            const auto& q = cfg.record[k];
            if (q.kind == FunctionalKind::LipschitzU && q.b <= 0.0 && cfg.params.porous_medium())
                tr.excluded_cell_warning =
                    tr.excluded_cell_warning || lipschitz_u_detail(f, cfg.params, q.b).excluded_cells;
            tr.series[k].push(f.time, evaluate(q, f, cfg.params));
        }
        tr.ledger.push_back({f.time, f.mass(), outflow});
        if (cfg.keep_fields) tr.fields.push_back(f);
        if (on_sample) on_sample(f);
    };

    for (double target : ts) {
        while (f.time < target) {
            double dt = stepper.cfl_dt(f);
            const double remaining = target - f.time;
            // Land exactly on the sample time; avoid a sliver step right before it.
            if (dt >= remaining) dt = remaining;
            else if (dt > 0.5 * remaining) dt = 0.5 * remaining;
            if (!(dt > 0.0)) throw NumericalFailure("time step collapsed to zero");
            outflow += stepper.step(f, dt);
            if (dt == remaining) f.time = target;
            ++tr.steps;
        }
        sample();
    }
    return tr;
}

}  // namespace nldiff
