#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nldiff/errors.hpp"
#include "nldiff/params.hpp"

namespace nldiff {

/// c1, c2, c0 = c1 + c2 of the pointwise differential inequality, and c3 of
/// the quadratic-potential term.
struct CoefficientSet {
    double c1 = 0.0;
    double c2 = 0.0;
    double c0 = 0.0;
    double c3 = 0.0;
    bool sign_convention = true;  // g b > 0
};

inline CoefficientSet coefficients(double gamma, double b, int dim) {
    const double ab = std::abs(b), ag = std::abs(gamma);
    CoefficientSet c;
    c.c1 = -ab / 2.0 + ag * b * b / 2.0 + gamma * ab / 2.0;
    c.c2 = -gamma * ab / 2.0 + ag * (dim - 1) / 4.0 - ag * b * b / 4.0;
    c.c0 = c.c1 + c.c2;
    c.c3 = gamma * b * dim / 2.0 - 1.0;
    c.sign_convention = gamma * b > 0.0;
    return c;
}

/// The three coefficient assumptions: bounded potential, quadratic potential, no potential.
enum class Assumption { BoundedV = 3, QuadraticV = 4, NoPotential = 5 };

inline std::string assumption_name(Assumption a) {
    switch (a) {
        case Assumption::BoundedV: return "bounded-V";
        case Assumption::QuadraticV: return "quadratic-V";
        case Assumption::NoPotential: return "V=0";
    }
    return "?";
}

/// The assumption that governs a potential class.
inline Assumption assumption_for(PotentialKind kind) {
    switch (kind) {
        case PotentialKind::Trivial: return Assumption::NoPotential;
        case PotentialKind::Quadratic: return Assumption::QuadraticV;
        case PotentialKind::BoundedGeneric: return Assumption::BoundedV;
    }
    return Assumption::NoPotential;
}

enum class Regime { Positive, Negative };  // gamma > 0, gamma < 0
enum class Term { Gamma, AbsGamma, GammaB, B };
enum class Side { Lower, Upper };           // bound < term  or  term < bound

/// One printed inequality:  bound (<|<=) term  or  term (<|<=) bound.
struct Inequality {
    Term term;
    Side side;
    bool strict;
    double (*bound)(double gamma, int dim);
    const char* text;
};

struct Clause {
    Assumption assumption;
    Regime regime;
    int index;  // 1, 2, 3 for (i), (ii), (iii)
    std::array<std::optional<Inequality>, 2> parts;
};

namespace detail {

inline double root_gap(double g, int d) {
    const double disc = 1.0 - g * g * (d - 1);
    return disc >= 0.0 ? std::sqrt(disc) : std::numeric_limits<double>::quiet_NaN();
}
inline double lower_root(double g, int d) { return 1.0 - root_gap(g, d); }
inline double upper_root(double g, int d) { return 1.0 + root_gap(g, d); }

}  // namespace detail

/// Every clause exactly as printed, strictness included.  Assumption 5 has no
/// clause (iii); its negative regime adds b < -1, recorded as part of (i).
inline std::span<const Clause> clause_table() {
    using detail::lower_root;
    using detail::upper_root;
    using A = Assumption;
    using R = Regime;
    static const std::array<Clause, 15> table{{
        {A::BoundedV, R::Positive, 1,
         {Inequality{Term::Gamma, Side::Upper, false,
                     [](double, int d) { return std::min({1.0 / std::sqrt(d), 2.0 / d, 0.5}); },
                     "gamma <= min(1/sqrt(d), 2/d, 1/2)"},
          std::nullopt}},
        {A::BoundedV, R::Negative, 1,
         {Inequality{Term::AbsGamma, Side::Upper, true,
                     [](double, int d) { return std::min(2.0 / d, 4.0 / (3.0 + d)); },
                     "|gamma| < min(2/d, 4/(3+d))"},
          std::nullopt}},
        {A::BoundedV, R::Positive, 2,
         {Inequality{Term::GammaB, Side::Lower, true, lower_root, "1 - sqrt(1 - gamma^2 (d-1)) < gamma b"},
          Inequality{Term::GammaB, Side::Upper, true, upper_root, "gamma b < 1 + sqrt(1 - gamma^2 (d-1))"}}},
        {A::BoundedV, R::Negative, 2,
         {Inequality{Term::GammaB, Side::Lower, true, lower_root, "1 - sqrt(1 - gamma^2 (d-1)) < gamma b"},
          Inequality{Term::GammaB, Side::Upper, true, upper_root, "gamma b < 1 + sqrt(1 - gamma^2 (d-1))"}}},
        {A::BoundedV, R::Positive, 3,
         {Inequality{Term::GammaB, Side::Lower, false, [](double g, int) { return g; }, "gamma <= gamma b"},
          Inequality{Term::GammaB, Side::Upper, false, [](double g, int) { return 1.0 - g; },
                     "gamma b <= 1 - gamma"}}},
        {A::BoundedV, R::Negative, 3,
         {Inequality{Term::GammaB, Side::Lower, true, [](double g, int) { return std::abs(g); },
                     "|gamma| < gamma b"},
          Inequality{Term::GammaB, Side::Upper, false,
                     [](double g, int) { return std::min(1.0 + std::abs(g), 2.0 * std::abs(g)); },
                     "gamma b <= min(1 + |gamma|, 2|gamma|)"}}},

        {A::QuadraticV, R::Positive, 1,
         {Inequality{Term::Gamma, Side::Upper, true,
                     [](double, int d) { return std::min(1.0 / std::sqrt(d), 2.0 / d); },
                     "gamma < min(1/sqrt(d), 2/d)"},
          std::nullopt}},
        {A::QuadraticV, R::Negative, 1,
         {Inequality{Term::AbsGamma, Side::Upper, true, [](double, int d) { return 2.0 / d; }, "|gamma| < 2/d"},
          std::nullopt}},
        {A::QuadraticV, R::Positive, 2,
         {Inequality{Term::GammaB, Side::Lower, false, lower_root, "1 - sqrt(1 - gamma^2 (d-1)) <= gamma b"},
          Inequality{Term::GammaB, Side::Upper, false, upper_root, "gamma b <= 1 + sqrt(1 - gamma^2 (d-1))"}}},
        {A::QuadraticV, R::Negative, 2,
         {Inequality{Term::GammaB, Side::Lower, false, lower_root, "1 - sqrt(1 - gamma^2 (d-1)) <= gamma b"},
          Inequality{Term::GammaB, Side::Upper, false, upper_root, "gamma b <= 1 + sqrt(1 - gamma^2 (d-1))"}}},
        {A::QuadraticV, R::Positive, 3,
         {Inequality{Term::GammaB, Side::Upper, true, [](double g, int d) { return std::min(1.0 - g, 2.0 / d); },
                     "gamma b < min(1 - gamma, 2/d)"},
          std::nullopt}},
        {A::QuadraticV, R::Negative, 3,
         {Inequality{Term::GammaB, Side::Lower, true, [](double g, int) { return std::abs(g); },
                     "|gamma| < gamma b"},
          Inequality{Term::GammaB, Side::Upper, true,
                     [](double g, int d) { return std::min(1.0 + std::abs(g), 2.0 / d); },
                     "gamma b < min(1 + |gamma|, 2/d)"}}},

        {A::NoPotential, R::Positive, 1,
         {Inequality{Term::Gamma, Side::Upper, true,
                     [](double, int d) {
                         return d > 1 ? 1.0 / std::sqrt(d - 1.0) : std::numeric_limits<double>::infinity();
                     },
                     "gamma < 1/sqrt(d-1)"},
          std::nullopt}},
        {A::NoPotential, R::Negative, 1,
         {Inequality{Term::AbsGamma, Side::Upper, true, [](double, int d) { return 2.0 / d; }, "|gamma| < 2/d"},
          Inequality{Term::B, Side::Upper, true, [](double, int) { return -1.0; }, "b < -1"}}},
        {A::NoPotential, R::Positive, 2,
         {Inequality{Term::GammaB, Side::Lower, true, lower_root, "1 - sqrt(1 - gamma^2 (d-1)) < gamma b"},
          Inequality{Term::GammaB, Side::Upper, true, upper_root, "gamma b < 1 + sqrt(1 - gamma^2 (d-1))"}}},
    }};
    // Assumption 5, gamma < 0, clause (ii) is the same printed inequality.
    static const std::array<Clause, 16> full = [] {
        std::array<Clause, 16> out{};
        std::copy(table.begin(), table.end(), out.begin());
        out[15] = table[14];
        out[15].regime = Regime::Negative;
        return out;
    }();
    return full;
}

inline std::vector<const Clause*> clauses_of(Assumption a, Regime r) {
    std::vector<const Clause*> out;
    for (const auto& c : clause_table())
        if (c.assumption == a && c.regime == r) out.push_back(&c);
    return out;
}

namespace detail {

inline double term_value(Term t, double gamma, double b) {
    switch (t) {
        case Term::Gamma: return gamma;
        case Term::AbsGamma: return std::abs(gamma);
        case Term::GammaB: return gamma * b;
        case Term::B: return b;
    }
    return 0.0;
}

// NaN bounds (negative discriminant) make every comparison false, as they should.
inline bool holds(const Inequality& q, double gamma, double b, int dim) {
    const double v = term_value(q.term, gamma, b);
    const double w = q.bound(gamma, dim);
    if (q.side == Side::Upper) return q.strict ? v < w : v <= w;
    return q.strict ? w < v : w <= v;
}

}  // namespace detail

/// Interval of admissible gamma b values; may be empty.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool lo_closed = false;
    bool hi_closed = false;

    bool empty() const {
        if (std::isnan(lo) || std::isnan(hi)) return true;
        if (lo < hi) return false;
        return !(lo == hi && lo_closed && hi_closed);
    }
    bool contains(double x) const {
        if (empty()) return false;
        const bool above = lo_closed ? x >= lo : x > lo;
        const bool below = hi_closed ? x <= hi : x < hi;
        return above && below;
    }
    double midpoint() const { return 0.5 * (lo + hi); }

    void tighten_lower(double v, bool closed) {
        if (std::isnan(v)) { lo = v; return; }
        if (v > lo || (v == lo && !closed)) {
            lo = v;
            lo_closed = closed;
        }
    }
    void tighten_upper(double v, bool closed) {
        if (std::isnan(v)) { hi = v; return; }
        if (v < hi || (v == hi && !closed)) {
            hi = v;
            hi_closed = closed;
        }
    }
};

/// Sign conditions the decay proofs use, evaluated at the given (gamma, b, d).
struct SignFlags {
    bool c0_nonpositive = false;
    bool c0_negative = false;
    bool c1_nonpositive = false;
    bool c1_negative = false;
    bool c3_negative = false;
};

/// Which sign flags an assumption promises when it holds.
struct RequiredSigns {
    bool c0_strict;
    bool c1_required;
    bool c1_strict;
    bool c3_required;
};

inline RequiredSigns required_signs(Assumption a) {
    switch (a) {
        case Assumption::BoundedV: return {true, true, false, false};
        case Assumption::QuadraticV: return {false, true, true, true};
        case Assumption::NoPotential: return {true, false, false, false};
    }
    return {};
}

inline bool signs_satisfied(const SignFlags& f, Assumption a) {
    const auto r = required_signs(a);
    if (r.c0_strict ? !f.c0_negative : !f.c0_nonpositive) return false;
    if (r.c1_required && (r.c1_strict ? !f.c1_negative : !f.c1_nonpositive)) return false;
    if (r.c3_required && !f.c3_negative) return false;
    return true;
}

struct AdmissibilityReport {
    Assumption assumption = Assumption::NoPotential;
    double gamma = 0.0;
    double b = 0.0;
    int dim = 0;
    std::array<std::optional<bool>, 3> clauses{};  // (i), (ii), (iii); empty when not stated
    bool sign_convention = false;                  // g b > 0 (and b < 0 for g < 0)
    CoefficientSet coefficients;
    Interval gamma_b_interval;
    SignFlags sign_flags;

    bool admissible() const {
        if (!sign_convention) return false;
        for (const auto& c : clauses)
            if (c && !*c) return false;
        return true;
    }
};

inline Regime regime_of(double gamma) { return gamma > 0.0 ? Regime::Positive : Regime::Negative; }

/// Intersection of clauses (ii) and (iii) (and the b < -1 side condition) as a
/// range of gamma b.  Clause (i) is not folded in: it constrains gamma alone.
inline Interval admissible_interval(double gamma, int dim, Assumption a) {
    const DiffusionParams params(gamma, dim);
    Interval iv;
    iv.tighten_lower(0.0, false);  // g b > 0 throughout
    for (const Clause* c : clauses_of(a, regime_of(gamma))) {
        for (const auto& part : c->parts) {
            if (!part) continue;
            double w = part->bound(gamma, dim);
            Side side = part->side;
            if (part->term == Term::B) {
                w *= gamma;
                if (gamma < 0.0) side = side == Side::Upper ? Side::Lower : Side::Upper;
            } else if (part->term != Term::GammaB) {
                continue;
            }
            if (side == Side::Lower) iv.tighten_lower(w, !part->strict);
            else iv.tighten_upper(w, !part->strict);
        }
    }
    return iv;
}

inline SignFlags sign_flags(const CoefficientSet& c) {
    return {c.c0 <= 0.0, c.c0 < 0.0, c.c1 <= 0.0, c.c1 < 0.0, c.c3 < 0.0};
}

inline AdmissibilityReport check(double gamma, double b, int dim, Assumption a) {
    const DiffusionParams params(gamma, dim);  // domain error outside (-2/d, 0) U (0, inf)
    AdmissibilityReport rep;
    rep.assumption = a;
    rep.gamma = gamma;
    rep.b = b;
    rep.dim = dim;
    rep.coefficients = coefficients(gamma, b, dim);
    rep.sign_convention = gamma * b > 0.0;
    for (const Clause* c : clauses_of(a, regime_of(gamma))) {
        bool ok = true;
        for (const auto& part : c->parts)
            if (part) ok = ok && detail::holds(*part, gamma, b, dim);
        rep.clauses[c->index - 1] = ok;
    }
    rep.gamma_b_interval = admissible_interval(gamma, dim, a);
    rep.sign_flags = sign_flags(rep.coefficients);
    return rep;
}

inline AdmissibilityReport check(double gamma, double b, int dim, const Potential& v) {
    return check(gamma, b, dim, assumption_for(v.kind()));
}

/// Range of gamma allowed by clause (i) in the given regime, as (lo, hi) with closedness.
inline Interval clause_one_range(Assumption a, Regime r, int dim) {
    Interval iv;
    if (r == Regime::Positive) iv.tighten_lower(0.0, false);
    else iv.tighten_lower(-2.0 / dim, false);
    for (const Clause* c : clauses_of(a, r)) {
        if (c->index != 1) continue;
        for (const auto& part : c->parts) {
            if (!part) continue;
            const double w = part->bound(0.0, dim);
            if (part->term == Term::Gamma) iv.tighten_upper(w, !part->strict);
            else if (part->term == Term::AbsGamma) iv.tighten_lower(-w, !part->strict);
        }
    }
    if (r == Regime::Negative) iv.tighten_upper(0.0, false);
    return iv;
}

}  // namespace nldiff
