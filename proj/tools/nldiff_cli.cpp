// Command-line runner: admissibility checks, experiment runs, profile tables and rate fits.
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "nldiff/nldiff.hpp"

namespace fs = std::filesystem;
using namespace nldiff;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

Assumption parse_assumption(const std::string& s) {
    if (s == "3" || s == "bounded") return Assumption::BoundedV;
    if (s == "4" || s == "quadratic") return Assumption::QuadraticV;
    if (s == "5" || s == "none") return Assumption::NoPotential;
    throw DomainError("assumption must be 3|4|5 or bounded|quadratic|none, got '" + s + "'");
}

std::string tri(const std::optional<bool>& v) {
    if (!v) return "not stated";
    return *v ? "holds" : "fails";
}

std::string interval_text(const Interval& iv) {
    if (iv.empty()) return "empty";
    std::ostringstream os;
    os << (iv.lo_closed ? "[" : "(") << iv.lo << ", " << iv.hi << (iv.hi_closed ? "]" : ")");
    return os.str();
}

int cmd_check(double gamma, int dim, std::optional<double> b, std::optional<double> gb, const std::string& which) {
    const Assumption a = parse_assumption(which);
    if (gb) b = *gb / gamma;
    const DiffusionParams params(gamma, dim);
    const Interval one = clause_one_range(a, regime_of(gamma), dim);
    const Interval iv = admissible_interval(gamma, dim, a);

    auto line = [](const std::string& k, const std::string& v) {
        std::cout << std::left << std::setw(18) << k << v << "\n";
    };
    std::cout << std::setprecision(10);
    line("assumption", std::to_string(static_cast<int>(a)) + " (" + assumption_name(a) + ")");
    line("gamma", format_double(gamma));
    line("dim", std::to_string(dim));
    line("alpha", format_double(params.alpha()));
    line("gamma*b interval", interval_text(iv));

    if (!b) {
        const bool ok = one.contains(gamma) && !iv.empty();
        line("clause (i)", one.contains(gamma) ? "holds" : "fails");
        line("admissible b", ok ? "exists" : "none");
        std::cout << "\nassumption,gamma,dim,clause1,gb_lo,gb_lo_closed,gb_hi,gb_hi_closed,nonempty\n"
                  << static_cast<int>(a) << "," << format_double(gamma) << "," << dim << ","
                  << one.contains(gamma) << "," << format_double(iv.lo) << "," << iv.lo_closed << ","
                  << format_double(iv.hi) << "," << iv.hi_closed << "," << !iv.empty() << "\n";
        return ok ? kExitPass : kExitFail;
    }

    const auto rep = check(gamma, *b, dim, a);
    const auto& c = rep.coefficients;
    line("b", format_double(*b));
    line("gamma*b", format_double(gamma * *b));
    line("sign convention", rep.sign_convention ? "holds" : "fails");
    line("clause (i)", tri(rep.clauses[0]));
    line("clause (ii)", tri(rep.clauses[1]));
    line("clause (iii)", tri(rep.clauses[2]));
    line("c1", format_double(c.c1));
    line("c2", format_double(c.c2));
    line("c0 = c1 + c2", format_double(c.c0));
    line("c3", format_double(c.c3));
    line("sign flags", signs_satisfied(rep.sign_flags, a) ? "as required" : "not as required");
    line("admissible", rep.admissible() ? "yes" : "no");

    auto cell = [](const std::optional<bool>& v) { return v ? std::string(*v ? "1" : "0") : std::string(""); };
    std::cout << "\nassumption,gamma,dim,b,gamma_b,sign,clause1,clause2,clause3,c1,c2,c0,c3,admissible\n"
              << static_cast<int>(a) << "," << format_double(gamma) << "," << dim << "," << format_double(*b) << ","
              << format_double(gamma * *b) << "," << rep.sign_convention << "," << cell(rep.clauses[0]) << ","
              << cell(rep.clauses[1]) << "," << cell(rep.clauses[2]) << "," << format_double(c.c1) << ","
              << format_double(c.c2) << "," << format_double(c.c0) << "," << format_double(c.c3) << ","
              << rep.admissible() << "\n";
    return rep.admissible() ? kExitPass : kExitFail;
}

int cmd_sweep(int dim, const std::string& which, double g0, double g1, int count, const std::string& out) {
    const Assumption a = parse_assumption(which);
    if (count < 2 || !(g1 > g0)) throw DomainError("sweep needs count >= 2 and gamma-max > gamma-min");
    std::ostringstream os;
    os << "gamma,clause1,gb_lo,gb_lo_closed,gb_hi,gb_hi_closed,nonempty\n";
    for (int k = 0; k < count; ++k) {
        const double g = g0 + (g1 - g0) * k / (count - 1);
        if (g == 0.0 || g <= -2.0 / dim) continue;  // outside the equation's range
        const Interval one = clause_one_range(a, regime_of(g), dim);
        const Interval iv = admissible_interval(g, dim, a);
        os << format_double(g) << "," << one.contains(g) << "," << format_double(iv.lo) << "," << iv.lo_closed << ","
           << format_double(iv.hi) << "," << iv.hi_closed << "," << (one.contains(g) && !iv.empty()) << "\n";
    }
    if (out.empty() || out == "-") {
        std::cout << os.str();
    } else {
        std::ofstream f(out);
        if (!f || !(f << os.str())) throw IoError("cannot write " + out);
    }
    return kExitPass;
}

int cmd_barenblatt(double gamma, int dim, double mass, double t, std::optional<double> radius, int points,
                   const std::string& out) {
    const DiffusionParams params(gamma, dim);
    const BarenblattProfile b(params, mass);
    const double r = radius ? *radius
                            : (params.porous_medium() ? 1.25 * b.support_radius(t) : 5.0 * std::pow(t, params.alpha()));
    if (out.empty() || out == "-") write_profile_csv(std::cout, b, t, r, points);
    else write_profile_csv(fs::path(out), b, t, r, points);
    return kExitPass;
}

int cmd_rates(const std::string& path, const std::string& model, std::vector<double> window,
              std::optional<double> expect, double tolerance) {
    const FunctionalSeries s = read_series_csv(path);
    std::optional<Window> w;
    if (!window.empty()) {
        if (window.size() != 2) throw DomainError("--window takes two times");
        w = Window{window[0], window[1]};
    }
    RateFit f;
    if (model == "power") f = fit_power(s, w);
    else if (model == "exponential") f = fit_exponential(s, w);
    else throw DomainError("model must be power or exponential");
    std::cout << model_name(f.model) << " fit of " << path << "\n"
              << "  exponent  " << format_double(f.exponent) << "\n"
              << "  prefactor " << format_double(f.prefactor) << "\n"
              << "  r2        " << format_double(f.r2) << "\n"
              << "  window    [" << format_double(f.t_min) << ", " << format_double(f.t_max) << "], " << f.samples
              << " samples\n\n"
              << "series,model,exponent,prefactor,r2,t_min,t_max,samples\n"
              << path << "," << model_name(f.model) << "," << format_double(f.exponent) << ","
              << format_double(f.prefactor) << "," << format_double(f.r2) << "," << format_double(f.t_min) << ","
              << format_double(f.t_max) << "," << f.samples << "\n";
    if (expect) return std::abs(f.exponent - *expect) <= tolerance ? kExitPass : kExitFail;
    return kExitPass;
}

struct RunOutcome {
    std::string text;
    int code = kExitPass;
};

int cmd_run(const std::vector<std::string>& configs, const std::string& out, int jobs, double slack) {
    // Parse everything first so configuration errors stop the batch before any solver work.
    std::vector<ExperimentSpec> specs;
    for (const auto& path : configs) specs.push_back(load_experiment(path));
    for (std::size_t i = 0; i < specs.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (specs[i].name == specs[j].name)
                throw ConfigError("two experiments named '" + specs[i].name + "' would share an output directory");

    std::vector<RunOutcome> outcomes(specs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next++) < specs.size();) {
            const auto& spec = specs[k];
            std::ostringstream os;
            try {
                const auto res = run_experiment(spec, fs::path(out) / spec.name, slack);
                os << "experiment " << spec.name << " (" << spec.source << ")\n";
                for (const auto& c : res.checks) os << "  " << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
                outcomes[k].code = res.passed() ? kExitPass : kExitFail;
            } catch (const DomainError& e) {
                os << "experiment " << spec.name << ": domain error: " << e.what() << "\n";
                outcomes[k].code = kExitConfig;
            } catch (const std::exception& e) {
                os << "experiment " << spec.name << ": solver error: " << e.what() << "\n";
                outcomes[k].code = kExitFail;
            }
            outcomes[k].text = os.str();
        }
    };
    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(specs.size())));
    std::vector<std::thread> pool;
    for (int k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    int code = kExitPass;
    for (const auto& o : outcomes) {
        std::cout << o.text;
        code = std::max(code, o.code);
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlinear drift-diffusion experiments: admissibility, runs, profiles, rate fits"};
    app.require_subcommand(1);

    double gamma = 0.0, mass = 1.0, time = 1.0, slack = 0.05, tolerance = 0.05;
    int dim = 2, points = 201, jobs = 1, count = 101;
    std::optional<double> b, gb, radius, expect;
    std::string assumption = "5", out, series, model = "power";
    double gmin = 0.0, gmax = 1.0;
    std::vector<std::string> configs;
    std::vector<double> window;

    auto* check = app.add_subcommand("check", "Admissibility of (gamma, b) under an assumption");
    check->add_option("--gamma", gamma, "nonlinearity exponent")->required();
    check->add_option("--dim", dim, "space dimension")->required();
    auto* bopt = check->add_option("--b", b, "weight exponent b");
    check->add_option("--gamma-b", gb, "gamma * b instead of b")->excludes(bopt);
    check->add_option("--assumption", assumption, "3|4|5 or bounded|quadratic|none")->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "Admissible gamma*b interval over a gamma grid (CSV)");
    sweep->add_option("--dim", dim)->required();
    sweep->add_option("--assumption", assumption)->capture_default_str();
    sweep->add_option("--gamma-min", gmin)->required();
    sweep->add_option("--gamma-max", gmax)->required();
    sweep->add_option("--count", count)->capture_default_str();
    sweep->add_option("--out", out, "CSV path, stdout when omitted");

    auto* runc = app.add_subcommand("run", "Run experiment configs and apply their checks");
    runc->add_option("--config", configs, "experiment config file(s)")->required()->check(CLI::ExistingFile);
    runc->add_option("--out", out, "output root; each experiment writes <out>/<name>/")->required();
    runc->add_option("--jobs", jobs, "experiments run concurrently")->capture_default_str()->check(CLI::PositiveNumber);
    runc->add_option("--slack", slack, "default slack for bound checks")->capture_default_str();

    auto* bar = app.add_subcommand("barenblatt", "Barenblatt profile table r, n, p, dp/dr");
    bar->add_option("--gamma", gamma)->required();
    bar->add_option("--dim", dim)->required();
    bar->add_option("--mass", mass)->capture_default_str();
    bar->add_option("--time", time)->capture_default_str();
    bar->add_option("--radius", radius, "table extent");
    bar->add_option("--points", points)->capture_default_str();
    bar->add_option("--out", out, "CSV path, stdout when omitted");

    auto* rates = app.add_subcommand("rates", "Fit a power or exponential rate to a t,value series");
    rates->add_option("--series", series)->required()->check(CLI::ExistingFile);
    rates->add_option("--model", model)->capture_default_str();
    rates->add_option("--window", window, "t_min t_max")->expected(2);
    rates->add_option("--expect", expect, "exit 1 unless the exponent is within --tolerance");
    rates->add_option("--tolerance", tolerance)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*check) return cmd_check(gamma, dim, b, gb, assumption);
        if (*sweep) return cmd_sweep(dim, assumption, gmin, gmax, count, out);
        if (*runc) return cmd_run(configs, out, jobs, slack);
        if (*bar) return cmd_barenblatt(gamma, dim, mass, time, radius, points, out);
        if (*rates) return cmd_rates(series, model, window, expect, tolerance);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
