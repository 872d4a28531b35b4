#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nldiff/admissibility.hpp"
#include "nldiff/config.hpp"
#include "nldiff/errors.hpp"
#include "nldiff/functionals.hpp"
#include "nldiff/io.hpp"
#include "nldiff/profiles.hpp"
#include "nldiff/ratefit.hpp"
#include "nldiff/solver.hpp"

namespace nldiff {

/// One [check.NAME] section.
struct CheckSpec {
    enum class Kind { PowerFit, ExponentialFit, UpperBound, LowerBound, Nonincreasing };
    enum class Compare { Within, AtMost, AtLeast };

    std::string name;
    int line = 0;
    Kind kind = Kind::PowerFit;
    std::string series_token;
    std::size_t series_index = 0;  // into ExperimentSpec::record
    std::string expect;            // fits: sharp | gap | attr | lipn | number
    Compare compare = Compare::Within;
    double tolerance = 0.05;
    double min_r2 = 0.999;
    std::optional<Window> window;
    std::string bound;             // bounds: 2alpha/t | ab | <exponent>@T | number
    double margin_dr = 0.0;        // bound shifted outward by margin * dr
    std::optional<double> slack;
};

struct ExperimentSpec {
    std::string name;
    std::string source;
    SolverConfig solver;
    double mass = 1.0;
    std::vector<std::string> record_tokens;
    bool admissibility_override = false;
    bool write_final_snapshot = true;
    std::vector<CheckSpec> checks;

    const std::vector<FunctionalRequest>& record() const { return solver.record; }
};

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double expected = 0.0;
    std::string detail;
};

struct ExperimentResult {
    std::string name;
    Trajectory trajectory;
    std::vector<CheckResult> checks;
    std::vector<RateFit> fits;
    std::vector<std::string> fit_series;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
    }
};

namespace detail {

inline BoundaryMode parse_boundary(const IniDocument& doc) {
    const auto* e = doc.find("boundary", "mode");
    if (!e || e->value == "neumann") return BoundaryMode::NeumannZeroFlux;
    if (e->value == "farfield") return BoundaryMode::FarFieldBarenblatt;
    doc.fail("boundary mode must be neumann or farfield", e->line);
}

inline DriftScheme parse_drift(const IniDocument& doc) {
    const auto* e = doc.find("boundary", "drift");
    if (!e || e->value == "upwind") return DriftScheme::Upwind;
    if (e->value == "well_balanced") return DriftScheme::WellBalanced;
    doc.fail("drift must be upwind or well_balanced", e->line);
}

inline Potential parse_potential(const IniDocument& doc) {
    const auto* e = doc.find("problem", "potential");
    if (!e || e->value == "none") return Potential::trivial();
    if (e->value == "quadratic") return Potential::quadratic();
    if (e->value == "soft_cone") return Potential::soft_cone();
    doc.fail("potential must be none, quadratic or soft_cone", e->line);
}

/// "lipschitz_u:1", "weighted_gap:gb=0.6", "linf", ...  gb=x means b = x / gamma.
inline FunctionalRequest parse_request(const std::string& token, double gamma, const IniDocument& doc, int line) {
    const auto colon = token.find(':');
    const std::string kind = IniDocument::trim(token.substr(0, colon));
    double b = 0.0;
    if (colon != std::string::npos) {
        std::string arg = IniDocument::trim(token.substr(colon + 1));
        bool scaled = false;
        if (arg.rfind("gb=", 0) == 0) {
            scaled = true;
            arg = arg.substr(3);
        }
        IniDocument::Entry e{token, arg, line};
        b = doc.to_double(e);
        if (scaled) b /= gamma;
    }
    const bool needs_b = kind == "lipschitz_u" || kind == "weighted_gap" || kind == "weighted_gap_literal";
    if (needs_b != (colon != std::string::npos))
        doc.fail(needs_b ? "'" + kind + "' needs a b argument" : "'" + kind + "' takes no argument", line);
    if (kind == "lipschitz_u") return FunctionalRequest::lipschitz(b);
    if (kind == "weighted_gap") return FunctionalRequest::gap(b);
    if (kind == "weighted_gap_literal") return FunctionalRequest::gap(b, GapReference::Literal);
    if (kind == "linf") return FunctionalRequest::simple(FunctionalKind::LinfDensity);
    if (kind == "mass") return FunctionalRequest::simple(FunctionalKind::Mass);
    if (kind == "fisher") return FunctionalRequest::simple(FunctionalKind::Fisher);
    if (kind == "ab_min") return FunctionalRequest::simple(FunctionalKind::ABmin);
    if (kind == "lip_n") return FunctionalRequest::simple(FunctionalKind::DensityGradient);
    if (kind == "relative_error") return FunctionalRequest::simple(FunctionalKind::RelativeError);
    if (kind == "x_norm") return FunctionalRequest::simple(FunctionalKind::Xnorm);
    doc.fail("unknown functional '" + kind + "'", line);
}

inline RadialField perturbed_stationary(const IniDocument& doc, const DiffusionParams& params,
                                        const RadialGrid& grid, double t0, double mass) {
    const int line = doc.require("initial", "kind").line;
    if (params.potential().kind() != PotentialKind::Quadratic)
        doc.fail("stationary data needs the quadratic potential", line);
    // B(alpha, .) is the stationary state of the confined problem.
    const BarenblattProfile base(params.with_potential(Potential::trivial()), mass);
    const double a = params.alpha();
    const double eps = doc.get_double("initial", "amplitude", 0.5);
    const std::string shape = doc.get_string("initial", "perturbation", params.porous_medium() ? "cosine" : "gaussian");
    std::function<double(double)> bump;
    if (shape == "cosine") {
        if (!params.porous_medium()) doc.fail("cosine perturbation needs compact support (gamma > 0)", line);
        const double rs = base.support_radius(a);
        bump = [=](double r) { return 1.0 + eps * std::cos(2.0 * std::numbers::pi * r / rs); };
    } else if (shape == "gaussian") {
        bump = [=](double r) { return 1.0 + eps * std::exp(-0.5 * r * r); };
    } else {
        doc.fail("perturbation must be cosine or gaussian", doc.require("initial", "perturbation").line);
    }
    auto f = RadialField::sample(grid, t0, [&](double r) { return base.density(a, r) * bump(r); });
    const double m = f.mass();
    if (!(m > 0.0)) doc.fail("perturbed stationary data has no mass on this grid", line);
    for (double& v : f.values) v *= mass / m;
    return f;
}

inline bool is_number(const std::string& s) {
    double v;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && end == s.data() + s.size();
}

inline bool valid_expect(const std::string& e) {
    return e == "sharp" || e == "gap" || e == "attr" || e == "lipn" || e == "dalpha" || is_number(e);
}

inline bool valid_bound(const std::string& b) {
    if (b == "2alpha/t" || b == "ab" || is_number(b)) return true;
    const auto at = b.find('@');
    if (at == std::string::npos) return false;
    const std::string e = b.substr(0, at);
    return (e == "sharp" || e == "linf" || is_number(e)) && is_number(b.substr(at + 1));
}

inline CheckSpec parse_check(const IniDocument& doc, const IniDocument::Section& sec, const ExperimentSpec& spec) {
    CheckSpec c;
    c.name = sec.name.substr(6);
    c.line = sec.line;
    if (c.name.empty()) doc.fail("check section needs a name", sec.line);
    const std::string& s = sec.name;
    doc.expect_only(s, {"kind", "series", "expect", "compare", "tolerance", "min_r2", "window", "bound",
                        "margin_dr", "slack"});
    const auto& kind = doc.require(s, "kind");
    if (kind.value == "power") c.kind = CheckSpec::Kind::PowerFit;
    else if (kind.value == "exponential") c.kind = CheckSpec::Kind::ExponentialFit;
    else if (kind.value == "upper_bound") c.kind = CheckSpec::Kind::UpperBound;
    else if (kind.value == "lower_bound") c.kind = CheckSpec::Kind::LowerBound;
    else if (kind.value == "nonincreasing") c.kind = CheckSpec::Kind::Nonincreasing;
    else doc.fail("check kind must be power, exponential, upper_bound, lower_bound or nonincreasing", kind.line);

    const auto& series = doc.require(s, "series");
    c.series_token = series.value;
    const FunctionalRequest q = parse_request(series.value, spec.solver.params.gamma(), doc, series.line);
    auto it = std::find_if(spec.record().begin(), spec.record().end(),
                           [&](const FunctionalRequest& r) { return r.label() == q.label(); });
    if (it == spec.record().end()) doc.fail("series '" + series.value + "' is not in [record]", series.line);
    c.series_index = static_cast<std::size_t>(it - spec.record().begin());

    const bool fit = c.kind == CheckSpec::Kind::PowerFit || c.kind == CheckSpec::Kind::ExponentialFit;
    if (fit) {
        const auto& ex = doc.require(s, "expect");
        if (!valid_expect(ex.value)) doc.fail("expect must be sharp, gap, attr, lipn, dalpha or a number", ex.line);
        c.expect = ex.value;
        const std::string cmp = doc.get_string(s, "compare", "within");
        if (cmp == "within") c.compare = CheckSpec::Compare::Within;
        else if (cmp == "at_most") c.compare = CheckSpec::Compare::AtMost;
        else if (cmp == "at_least") c.compare = CheckSpec::Compare::AtLeast;
        else doc.fail("compare must be within, at_most or at_least", doc.require(s, "compare").line);
        c.min_r2 = doc.get_double(s, "min_r2", 0.999);
    } else if (c.kind != CheckSpec::Kind::Nonincreasing) {
        const auto& bd = doc.require(s, "bound");
        if (!valid_bound(bd.value)) doc.fail("bound must be 2alpha/t, ab, a number, or X@T with X sharp, linf or a number", bd.line);
        c.bound = bd.value;
        c.margin_dr = doc.get_double(s, "margin_dr", 0.0);
        if (doc.has(s, "slack")) c.slack = doc.get_double(s, "slack");
    }
    c.tolerance = doc.get_double(s, "tolerance", c.kind == CheckSpec::Kind::Nonincreasing ? 1e-8 : 0.05);
    if (doc.has(s, "window")) {
        const auto w = doc.get_doubles(s, "window");
        if (w.size() != 2 || !(w[1] > w[0])) doc.fail("window needs two increasing times", doc.require(s, "window").line);
        c.window = Window{w[0], w[1]};
    }
    return c;
}

}  // namespace detail

/// Build an experiment from a parsed config.  Every semantic error names its line.
inline ExperimentSpec parse_experiment(const IniDocument& doc) {
    for (const auto& sec : doc.sections()) {
        static const std::vector<std::string> known{"experiment", "problem", "grid", "time",
                                                    "initial", "boundary", "record"};
        if (sec.name.rfind("check.", 0) != 0 && std::find(known.begin(), known.end(), sec.name) == known.end())
            doc.fail("unknown section [" + sec.name + "]", sec.line);
    }
    doc.expect_only("experiment", {"name", "description"});
    doc.expect_only("problem", {"gamma", "dim", "potential"});
    doc.expect_only("grid", {"cells", "radius"});
    doc.expect_only("time", {"start", "end", "cfl", "cadence", "samples_per_decade", "step", "sample_from"});
    doc.expect_only("initial", {"kind", "mass", "time", "truncate_at", "inner", "outer", "perturbation", "amplitude"});
    doc.expect_only("boundary", {"mode", "drift"});
    doc.expect_only("record", {"series", "admissibility_override", "snapshot"});

    ExperimentSpec spec;
    spec.source = doc.source();
    spec.name = doc.get_string("experiment", "name",
                               std::filesystem::path(doc.source()).stem().string());
    auto guard = [&](const std::string& sec, const std::string& key, auto&& fn) {
        try {
            return fn();
        } catch (const DomainError& e) {
            const auto* en = doc.find(sec, key);
            doc.fail(e.what(), en ? en->line : 0);
        }
    };

    SolverConfig& cfg = spec.solver;
    const double gamma = doc.get_double("problem", "gamma");
    const long dim = doc.get_int("problem", "dim");
    cfg.params = guard("problem", "gamma", [&] {
        return DiffusionParams(gamma, static_cast<int>(dim), detail::parse_potential(doc));
    });
    const long cells = doc.get_int("grid", "cells");
    const double radius = doc.get_double("grid", "radius");
    cfg.grid = guard("grid", "cells", [&] { return RadialGrid(static_cast<std::size_t>(std::max(cells, 0L)), radius,
                                                              static_cast<int>(dim)); });

    cfg.t_start = doc.get_double("time", "start");
    cfg.t_end = doc.get_double("time", "end");
    if (!(cfg.t_end > cfg.t_start)) doc.fail("end time must exceed start time", doc.require("time", "end").line);
    cfg.cfl = doc.get_double("time", "cfl", 0.9);
    const std::string cadence = doc.get_string("time", "cadence", "geometric");
    if (cadence == "geometric") {
        cfg.samples_per_decade = static_cast<int>(doc.get_int("time", "samples_per_decade", 32));
        // Data started at t = 0 is sampled geometrically from sample_from on.
        if (doc.has("time", "sample_from")) {
            const auto& e = doc.require("time", "sample_from");
            const double t0 = doc.to_double(e);
            if (!(t0 > 0.0 && t0 >= cfg.t_start && t0 < cfg.t_end)) doc.fail("sample_from must lie in (start, end)", e.line);
            cfg.sample_times = guard("time", "sample_from", [&] { return geometric_times(t0, cfg.t_end, cfg.samples_per_decade); });
        } else if (!(cfg.t_start > 0.0)) {
            doc.fail("geometric cadence needs start > 0 or sample_from", doc.require("time", "start").line);
        }
    } else if (cadence == "linear") {
        const double h = doc.get_double("time", "step");
        if (!(h > 0.0)) doc.fail("step must be positive", doc.require("time", "step").line);
        for (long k = 0;; ++k) {
            const double t = cfg.t_start + static_cast<double>(k) * h;
            if (t > cfg.t_end * (1.0 + 1e-12)) break;
            cfg.sample_times.push_back(std::min(t, cfg.t_end));
        }
    } else {
        doc.fail("cadence must be geometric or linear", doc.require("time", "cadence").line);
    }

    const std::string kind = doc.get_string("initial", "kind");
    spec.mass = doc.get_double("initial", "mass", 1.0);
    const double profile_time = doc.get_double("initial", "time", cfg.t_start);
    auto& ic = cfg.initial_condition;
    if (kind == "barenblatt" || kind == "truncated") {
        ic = InitialCondition::barenblatt(spec.mass, profile_time);
        if (kind == "truncated") {
            ic.kind = InitialCondition::Kind::TruncatedBarenblatt;
            ic.truncate_at = doc.get_double("initial", "truncate_at");
        }
    } else if (kind == "annulus") {
        ic = InitialCondition::annulus(spec.mass, doc.get_double("initial", "inner", 1.0),
                                       doc.get_double("initial", "outer", 2.0));
    } else if (kind == "stationary") {
        cfg.initial = guard("initial", "kind", [&] {
            return detail::perturbed_stationary(doc, cfg.params, cfg.grid, cfg.t_start, spec.mass);
        });
    } else {
        doc.fail("initial kind must be barenblatt, truncated, annulus or stationary", doc.require("initial", "kind").line);
    }

    cfg.boundary = detail::parse_boundary(doc);
    cfg.drift = detail::parse_drift(doc);

    // Reference Barenblatt with the data's mass and time shift; the far field
    // and the relative error both use it.
    std::optional<BarenblattProfile> reference;
    const bool barenblatt_data = kind == "barenblatt" || kind == "truncated";
    if (barenblatt_data && cfg.params.potential().kind() == PotentialKind::Trivial) {
        reference = guard("initial", "time", [&] {
            return BarenblattProfile(cfg.params, spec.mass, profile_time - cfg.t_start);
        });
    }
    if (cfg.boundary == BoundaryMode::FarFieldBarenblatt) {
        if (!reference) doc.fail("far-field boundary needs Barenblatt data and no potential", doc.require("boundary", "mode").line);
        cfg.far_field = FarField(*reference);
    }

    const auto& rec = doc.require("record", "series");
    spec.admissibility_override = doc.get_bool("record", "admissibility_override", false);
    const std::string snap = doc.get_string("record", "snapshot", "final");
    if (snap != "final" && snap != "none") doc.fail("snapshot must be final or none", doc.require("record", "snapshot").line);
    spec.write_final_snapshot = snap == "final";
    cfg.keep_fields = false;
    for (const auto& token : IniDocument::split(rec.value, ',')) {
        FunctionalRequest q = detail::parse_request(token, gamma, doc, rec.line);
        if (q.kind == FunctionalKind::RelativeError) {
            if (!reference) doc.fail("relative_error needs Barenblatt data and no potential", rec.line);
            q.profile = *reference;
        }
        if (q.kind == FunctionalKind::Xnorm && cfg.params.fast_diffusion()) {
            if (!reference) doc.fail("x_norm on fast diffusion needs a Barenblatt tail", rec.line);
            q.tail = TailModel::barenblatt(*reference);
        }
        if (q.kind == FunctionalKind::LipschitzU || q.kind == FunctionalKind::WeightedGap) {
            if (q.kind == FunctionalKind::WeightedGap && cfg.params.potential().kind() != PotentialKind::Trivial)
                doc.fail("weighted_gap is defined for runs without potential", rec.line);
            const auto rep = check(gamma, q.b, static_cast<int>(dim), cfg.params.potential());
            if (!rep.admissible() && !spec.admissibility_override) {
                std::ostringstream os;
                os << "b = " << q.b << " is not admissible under " << assumption_name(rep.assumption)
                   << " for gamma = " << gamma << ", d = " << dim << " (set admissibility_override = true to force)";
                doc.fail(os.str(), rec.line);
            }
        }
        for (const auto& have : cfg.record)
            if (have.label() == q.label()) doc.fail("series '" + token + "' listed twice", rec.line);
        cfg.record.push_back(q);
        spec.record_tokens.push_back(token);
    }

    for (const auto& sec : doc.sections())
        if (sec.name.rfind("check.", 0) == 0) spec.checks.push_back(detail::parse_check(doc, sec, spec));

    try {
        cfg.validate();
    } catch (const DomainError& e) {
        doc.fail(e.what(), 0);
    }
    return spec;
}

inline ExperimentSpec load_experiment(const std::string& path) { return parse_experiment(IniDocument::load(path)); }

namespace detail {

inline double expected_exponent(const CheckSpec& c, const ExperimentSpec& spec) {
    const auto& p = spec.solver.params;
    const double b = spec.record()[c.series_index].b;
    if (c.expect == "sharp") return sharp_exponent_trivial(p.gamma(), p.dim(), b);
    if (c.expect == "gap") return weighted_gap_exponent(p.gamma(), p.dim(), b);
    if (c.expect == "attr") return quadratic_decay_rate(p.gamma(), p.dim(), b);
    if (c.expect == "lipn") return -1.0 - p.alpha() * p.dim() * (2.0 - p.gamma());
    if (c.expect == "dalpha") return -p.dim() * p.alpha();
    try {
        std::size_t used = 0;
        const double v = std::stod(c.expect, &used);
        if (used == c.expect.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("check '" + c.name + "': unknown expectation '" + c.expect + "'", c.line);
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

inline CheckResult run_fit(const CheckSpec& c, const ExperimentSpec& spec, const FunctionalSeries& s,
                           ExperimentResult& out) {
    CheckResult r;
    r.name = c.name;
    const bool power = c.kind == CheckSpec::Kind::PowerFit;
    const RateFit fit = power ? fit_power(s, c.window) : fit_exponential(s, c.window);
    out.fits.push_back(fit);
    out.fit_series.push_back(s.label);
    const double want = expected_exponent(c, spec);
    r.measured = fit.exponent;
    r.expected = want;
    bool ok = fit.r2 >= c.min_r2;
    switch (c.compare) {
        case CheckSpec::Compare::Within: ok = ok && std::abs(fit.exponent - want) <= c.tolerance; break;
        case CheckSpec::Compare::AtMost: ok = ok && fit.exponent <= want + c.tolerance; break;
        case CheckSpec::Compare::AtLeast: ok = ok && fit.exponent >= want - c.tolerance; break;
    }
    r.pass = ok;
    const char* rel = c.compare == CheckSpec::Compare::Within ? "within" :
                      c.compare == CheckSpec::Compare::AtMost ? "at most" : "at least";
    r.detail = model_name(fit.model) + " fit of " + s.label + ": exponent " + fmt(fit.exponent) + " " + rel + " " +
               fmt(want) + " +- " + fmt(c.tolerance) + ", r2 " + fmt(fit.r2) + " (min " + fmt(c.min_r2) + "), " +
               std::to_string(fit.samples) + " samples on [" + fmt(fit.t_min) + ", " + fmt(fit.t_max) + "]";
    return r;
}

inline CheckResult run_bound(const CheckSpec& c, const ExperimentSpec& spec, const FunctionalSeries& full,
                             double default_slack) {
    CheckResult r;
    r.name = c.name;
    const auto& p = spec.solver.params;
    const double shift = c.margin_dr * spec.solver.grid.spacing();
    const bool lower = c.kind == CheckSpec::Kind::LowerBound;
    FunctionalSeries s = full;
    std::function<double(double)> base;

    const auto at = c.bound.find('@');
    if (c.bound == "2alpha/t") {
        base = [a = p.alpha()](double t) { return 2.0 * a / t; };
    } else if (c.bound == "ab") {
        base = [g = p.gamma(), d = p.dim()](double t) { return aronson_benilan_bound(g, d, t); };
    } else if (at != std::string::npos) {
        // Power law calibrated on the first sample at or after T, checked from there on.
        const std::string e = c.bound.substr(0, at);
        const double t_cal = std::stod(c.bound.substr(at + 1));
        double expo;
        if (e == "sharp") expo = sharp_exponent_trivial(p.gamma(), p.dim(), spec.record()[c.series_index].b);
        else if (e == "linf") expo = -p.dim() * p.alpha();
        else expo = std::stod(e);
        FunctionalSeries tail{s.label, {}, {}};
        for (std::size_t k = 0; k < s.size(); ++k)
            if (s.t[k] >= t_cal * (1.0 - 1e-12)) tail.push(s.t[k], s.value[k]);
        if (tail.empty()) throw ConfigError("check '" + c.name + "': no samples after the calibration time", c.line);
        s = tail;
        base = [t0 = s.t.front(), v0 = s.value.front(), expo](double t) { return v0 * std::pow(t / t0, expo); };
    } else {
        try {
            const double v = std::stod(c.bound);
            base = [v](double) { return v; };
        } catch (const std::exception&) {
            throw ConfigError("check '" + c.name + "': unknown bound '" + c.bound + "'", c.line);
        }
    }
    auto bound = [&](double t) { return lower ? base(t) - shift : base(t) + shift; };
    const double slack = c.slack ? *c.slack : default_slack;
    const BoundReport rep = lower ? verify_lower_bound(s, bound, slack) : verify_bound(s, bound, slack);
    r.pass = rep.holds;
    r.measured = rep.worst_ratio;
    r.expected = 1.0 + slack;
    r.detail = std::string(lower ? "lower" : "upper") + " bound " + c.bound + " on " + s.label +
               ": worst ratio " + fmt(rep.worst_ratio) + " at t=" + fmt(rep.worst_t) + ", slack " + fmt(slack);
    return r;
}

inline CheckResult run_monotone(const CheckSpec& c, const FunctionalSeries& s) {
    CheckResult r;
    r.name = c.name;
    double worst = -std::numeric_limits<double>::infinity();
    double worst_t = 0.0;
    for (std::size_t k = 1; k < s.size(); ++k) {
        const double inc = s.value[k] - s.value[k - 1];
        if (inc > worst) {
            worst = inc;
            worst_t = s.t[k];
        }
    }
    r.pass = worst <= c.tolerance;
    r.measured = worst;
    r.expected = c.tolerance;
    r.detail = s.label + " largest increase " + fmt(worst) + " at t=" + fmt(worst_t) + ", tolerance " + fmt(c.tolerance);
    return r;
}

}  // namespace detail

/// Evaluate the checks of an experiment against an existing trajectory.
inline std::vector<CheckResult> evaluate_checks(const ExperimentSpec& spec, ExperimentResult& out,
                                                double default_slack = 0.05) {
    std::vector<CheckResult> results;
    for (const auto& c : spec.checks) {
        const FunctionalSeries& s = out.trajectory.series.at(c.series_index);
        CheckResult r;
        try {
            switch (c.kind) {
                case CheckSpec::Kind::PowerFit:
                case CheckSpec::Kind::ExponentialFit: r = detail::run_fit(c, spec, s, out); break;
                case CheckSpec::Kind::UpperBound:
                case CheckSpec::Kind::LowerBound: r = detail::run_bound(c, spec, s, default_slack); break;
                case CheckSpec::Kind::Nonincreasing: r = detail::run_monotone(c, s); break;
            }
        } catch (const DomainError& e) {
            // A fit that cannot be formed (too few samples, nonpositive data) is a failed check.
            r = CheckResult{c.name, false, 0.0, 0.0, std::string("cannot evaluate: ") + e.what()};
        }
        results.push_back(r);
    }
    return results;
}

/// Run the solver and the checks.  Writes series, the final snapshot, fits.csv and
/// summary.txt into out_dir when it is non-empty.
inline ExperimentResult run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir = {},
                                       double default_slack = 0.05) {
    ExperimentResult res;
    res.name = spec.name;
    std::optional<RadialField> last;
    res.trajectory = run(spec.solver, [&](const RadialField& f) { last = f; });
    res.checks = evaluate_checks(spec, res, default_slack);
    if (out_dir.empty()) return res;

    for (const auto& s : res.trajectory.series) write_series_csv(out_dir / (s.label + ".csv"), s);
    {
        CsvWriter w(out_dir / "mass_ledger.csv");
        w.header({"t", "inside", "outflow"});
        for (const auto& m : res.trajectory.ledger) w.row({m.t, m.inside, m.outflow});
        w.close();
    }
    if (spec.write_final_snapshot && last)
        write_snapshot_csv(out_dir / "snapshot_final.csv", *last, spec.solver.params.gamma());
    {
        CsvWriter w(out_dir / "fits.csv");
        w.header({"series", "model", "exponent", "prefactor", "r2", "t_min", "t_max", "samples"});
        for (std::size_t k = 0; k < res.fits.size(); ++k) {
            const auto& f = res.fits[k];
            w.row_text({res.fit_series[k], model_name(f.model), format_double(f.exponent), format_double(f.prefactor),
                        format_double(f.r2), format_double(f.t_min), format_double(f.t_max),
                        std::to_string(f.samples)});
        }
        w.close();
    }
    std::ofstream sum(out_dir / "summary.txt");
    if (!sum) throw IoError("cannot open " + (out_dir / "summary.txt").string() + " for writing");
    sum << "experiment " << spec.name << "\n";
    sum << "steps " << res.trajectory.steps << ", samples " << res.trajectory.times.size() << "\n";
    if (res.trajectory.excluded_cell_warning) sum << "warning: zero-density cells excluded from a b <= 0 maximum\n";
    for (const auto& c : res.checks) sum << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    sum << (res.passed() ? "ALL PASS" : "SOME CHECKS FAILED") << "\n";
    if (!sum) throw IoError("write failed for " + (out_dir / "summary.txt").string());
    return res;
}

}  // namespace nldiff
