#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nldiff/errors.hpp"
#include "nldiff/functionals.hpp"

namespace nldiff {

enum class RateModel { PowerLaw, Exponential };

struct RateFit {
    RateModel model = RateModel::PowerLaw;
    double exponent = 0.0;   // power: slope of log v against log t; exponential: the decay rate
    double prefactor = 0.0;
    double r2 = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;
    std::size_t samples = 0;
};

/// Inclusive fit window.
struct Window {
    double t_min;
    double t_max;
};

inline constexpr double kBurnIn = 0.2;
inline constexpr std::size_t kMinFitSamples = 8;

/// Default window: drop the first 20% of the range, in log t for power laws
/// (uniform for geometric cadence) and in t for exponentials.
inline Window default_window(const FunctionalSeries& s, RateModel model) {
    if (s.empty()) throw DomainError("empty series");
    const double a = s.t.front(), b = s.t.back();
    if (model == RateModel::PowerLaw) {
        if (!(a > 0.0)) throw DomainError("power-law fit needs positive times");
        return {a * std::pow(b / a, kBurnIn), b};
    }
    return {a + kBurnIn * (b - a), b};
}

namespace detail {

inline RateFit least_squares(const FunctionalSeries& s, Window w, RateModel model) {
    std::vector<double> x, y;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double t = s.t[k];
        if (t < w.t_min * (1.0 - 1e-12) || t > w.t_max * (1.0 + 1e-12)) continue;
        const double v = s.value[k];
        if (!(v > 0.0) || !std::isfinite(v)) {
            std::ostringstream os;
            os << "nonpositive or non-finite value " << v << " at sample " << k << " (t=" << t << ")";
            throw DomainError(os.str());
        }
        if (model == RateModel::PowerLaw && !(t > 0.0)) throw DomainError("power-law fit needs t > 0");
        x.push_back(model == RateModel::PowerLaw ? std::log(t) : t);
        y.push_back(std::log(v));
    }
    if (x.size() < kMinFitSamples)
        throw DomainError("fit needs at least 8 samples in the window, got " + std::to_string(x.size()));
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    if (!(sxx > 0.0)) throw DomainError("fit window spans a single time");
    const double slope = sxy / sxx;
    const double icept = my - slope * mx;
    double sse = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double e = y[k] - (icept + slope * x[k]);
        sse += e * e;
    }
    RateFit f;
    f.model = model;
    f.exponent = model == RateModel::PowerLaw ? slope : -slope;
    f.prefactor = std::exp(icept);
    // A flat series is fitted exactly by slope 0; call that r2 = 1.
    f.r2 = syy > 0.0 ? std::max(0.0, 1.0 - sse / syy) : 1.0;
    f.t_min = w.t_min;
    f.t_max = w.t_max;
    f.samples = x.size();
    return f;
}

}  // namespace detail

inline RateFit fit_power(const FunctionalSeries& s, std::optional<Window> w = std::nullopt) {
    return detail::least_squares(s, w ? *w : default_window(s, RateModel::PowerLaw), RateModel::PowerLaw);
}

inline RateFit fit_exponential(const FunctionalSeries& s, std::optional<Window> w = std::nullopt) {
    return detail::least_squares(s, w ? *w : default_window(s, RateModel::Exponential), RateModel::Exponential);
}

struct BoundReport {
    bool holds = true;
    double worst_ratio = -std::numeric_limits<double>::infinity();  // max v / bound
    double worst_t = 0.0;
};

/// v(t) <= bound(t) (1 + slack) at every sample.
inline BoundReport verify_bound(const FunctionalSeries& s, const std::function<double(double)>& bound,
                                double slack) {
    BoundReport rep;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double b = bound(s.t[k]);
        const double ratio = s.value[k] / b;
        if (ratio > rep.worst_ratio) {
            rep.worst_ratio = ratio;
            rep.worst_t = s.t[k];
        }
        if (!(s.value[k] <= b * (1.0 + slack))) rep.holds = false;
    }
    return rep;
}

/// Lower bound v(t) >= bound(t) by negation: -v <= -bound (1 + slack).
/// For the negative Aronson-Benilan bound the slack widens the bound downward.
inline BoundReport verify_lower_bound(const FunctionalSeries& s, const std::function<double(double)>& bound,
                                      double slack) {
    FunctionalSeries neg{s.label, s.t, s.value};
    for (double& v : neg.value) v = -v;
    return verify_bound(neg, [&](double t) { return -bound(t); }, slack);
}

inline std::string model_name(RateModel m) { return m == RateModel::PowerLaw ? "power" : "exponential"; }

}  // namespace nldiff
