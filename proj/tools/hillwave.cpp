// hillwave command-line front end.
//
// Subcommands: exponent | determinant | chart | fourier | recur-demo | verify.
// Output is a JSON envelope on stdout (schema_version, command, params,
// payload, diagnostics); `chart --format csv` emits a bare CSV table instead.
// Errors are structured JSON on stderr.  Exit codes: 0 ok, 1 verification
// failure, 2 numerical-domain error, 3 I/O error, 64 usage error.

#include <hillwave/hillwave.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

using ojson = nlohmann::ordered_json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_checks_failed = 1;
constexpr int exit_domain = 2;
constexpr int exit_io = 3;
constexpr int exit_usage = 64;

struct cli_options {
    double tol = 1e-12;
    int json_indent = 2;
    bool quiet = false;
};

/// I/O failures (unwritable --out path and friends); mapped to exit code 3.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Usage problems detected after flag parsing (inconsistent flag values);
/// mapped to exit code 64 like parser-level errors.
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string stability_name(hillwave::stability_kind s) {
    return s == hillwave::stability_kind::stable ? "stable" : "unstable_gap";
}

ojson exponent_json(const hillwave::characteristic_exponent& nu) {
    return ojson{{"re", nu.re}, {"im", nu.im}, {"stability", stability_name(nu.stability)}};
}

ojson params_json(const hillwave::mathieu_params& p) {
    return ojson{{"a", p.a}, {"q", p.q}};
}

ojson envelope(const std::string& command, const ojson& params, const ojson& payload,
               const ojson& diagnostics) {
    return ojson{{"schema_version", "1"},
                 {"command", command},
                 {"params", params},
                 {"payload", payload},
                 {"diagnostics", diagnostics}};
}

void emit(const ojson& doc, const cli_options& opt, std::ostream& os = std::cout) {
    os << doc.dump(opt.json_indent) << "\n";
}

void emit_error(const std::string& command, const std::string& code,
                const std::string& message, const cli_options& opt) {
    const ojson doc{{"schema_version", "1"},
                    {"command", command},
                    {"error", ojson{{"code", code}, {"message", message}}}};
    std::cerr << doc.dump(opt.json_indent) << "\n";
}

void note(const cli_options& opt, const std::string& line) {
    if (!opt.quiet) std::cerr << line << "\n";
}

// ---------------------------------------------------------------- exponent

int cmd_exponent(const hillwave::mathieu_params& p, const std::string& method,
                 const cli_options& opt) {
    ojson payload;
    ojson diagnostics{{"tol", opt.tol}};

    std::optional<hillwave::characteristic_exponent> wh_nu;
    if (method == "wh" || method == "both") {
        const hillwave::wh_right rhs = hillwave::wh_rhs(p, opt.tol);
        const hillwave::characteristic_exponent nu = hillwave::exponent_from_rhs(rhs.value);
        wh_nu = nu;
        payload["wh"] = ojson{{"nu", exponent_json(nu)},
                              {"rhs", rhs.value},
                              {"branch_residual", hillwave::wh_branch_residual(nu, rhs.value)}};
    }
    if (method == "ode" || method == "both") {
        const hillwave::ode_settings settings;
        const double mu = hillwave::discriminant_mu(p, settings);
        payload["ode"] = ojson{{"nu", exponent_json(hillwave::exponent_from_mu(mu))}, {"mu", mu}};
        diagnostics["ode"] = ojson{{"rtol", settings.rtol}, {"atol", settings.atol}};
        if (method == "both" && wh_nu) {
            const std::complex<double> pi_nu = M_PI * wh_nu->value();
            payload["cross_check_discrepancy"] = std::abs(std::cos(pi_nu) - mu);
        }
    }
    diagnostics["method"] = method;
    emit(envelope("exponent", params_json(p), payload, diagnostics), opt);
    return exit_ok;
}

// ------------------------------------------------------------- determinant

int cmd_determinant(const hillwave::mathieu_params& p, int n, bool converge,
                    const std::string& method, const cli_options& opt) {
    ojson payload;
    ojson diagnostics{{"tol", opt.tol}, {"method", method}};

    if (converge) {
        if (method != "recursion")
            throw usage_error("--converge computes the infinite-order limit and is only "
                              "defined for --method recursion");
        const hillwave::determinant_series s = hillwave::delta_series(p, 4096, opt.tol);
        if (!s.converged)
            throw hillwave::no_convergence_error(
                4096, "determinant increments did not fall below tolerance within 4096 terms");
        payload["delta"] = s.limit;
        payload["converged"] = true;
        diagnostics["converged_at"] = s.converged_at;
        diagnostics["tail_estimate"] = s.tail_estimate;
        diagnostics["recursion_residual"] = s.recursion_residual;
    } else {
        if (n < 0)
            throw usage_error("determinant requires --n (truncation order) unless --converge "
                              "is given");
        double delta = 0.0;
        if (method == "recursion") {
            const hillwave::determinant_series s = hillwave::delta_series(p, n, 0.0);
            delta = s.deltas.back();
            diagnostics["recursion_residual"] = s.recursion_residual;
        } else if (method == "direct") {
            delta = hillwave::det_direct(hillwave::build_truncated_real(n, 0.0, p));
        } else { // explicit
            if (n < 10)
                throw usage_error("--method explicit requires --n >= 10: the solver's "
                                  "validity window 7 <= span <= n-3 is empty below that");
            delta = hillwave::delta_explicit(p, n, n - 3);
            diagnostics["span"] = n - 3;
        }
        payload["delta"] = delta;
        payload["n"] = n;
    }
    emit(envelope("determinant", params_json(p), payload, diagnostics), opt);
    return exit_ok;
}

// ------------------------------------------------------------------- chart

void write_chart_csv(const std::vector<hillwave::band_point>& points, std::ostream& os) {
    os << "a,nu_re,nu_im,stability,rhs,flag\n";
    char buf[256];
    for (const hillwave::band_point& pt : points) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%s,%.17g,%s\n", pt.a, pt.nu.re,
                      pt.nu.im, stability_name(pt.nu.stability).c_str(), pt.rhs,
                      pt.flag.c_str());
        os << buf;
    }
}

int cmd_chart(double q, double a_min, double a_max, int steps, const std::string& format,
              const std::string& out_path, const cli_options& opt) {
    if (!(a_min < a_max))
        throw usage_error("chart requires --a-min < --a-max");
    const std::vector<hillwave::band_point> points =
        hillwave::band_scan(q, a_min, a_max, steps, opt.tol);

    long flagged = 0;
    for (const hillwave::band_point& pt : points)
        if (!pt.flag.empty()) ++flagged;
    if (flagged > 0)
        note(opt, "chart: " + std::to_string(flagged) +
                      " point(s) fell back to the ODE oracle (see flag column)");

    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::binary);
        if (!file) throw io_error("cannot open output file: " + out_path);
        os = &file;
    }

    if (format == "csv") {
        write_chart_csv(points, *os);
    } else {
        ojson rows = ojson::array();
        for (const hillwave::band_point& pt : points)
            rows.push_back(ojson{{"a", pt.a},
                                 {"nu_re", pt.nu.re},
                                 {"nu_im", pt.nu.im},
                                 {"stability", stability_name(pt.nu.stability)},
                                 {"rhs", pt.rhs},
                                 {"flag", pt.flag}});
        const ojson doc =
            envelope("chart",
                     ojson{{"q", q}, {"a_min", a_min}, {"a_max", a_max}, {"steps", steps}},
                     ojson{{"points", rows}},
                     ojson{{"tol", opt.tol}, {"format", format},
                           {"oracle_fallback_points", flagged},
                           {"note", "rhs serializes as null when not finite (JSON has no NaN); "
                                    "the CSV format prints nan"}});
        emit(doc, opt, *os);
    }
    if (os == &file) {
        file.flush();
        if (!file) throw io_error("write failed: " + out_path);
    }
    return exit_ok;
}

// ----------------------------------------------------------------- fourier

int cmd_fourier(const hillwave::mathieu_params& p, int n, const cli_options& opt) {
    const hillwave::characteristic_exponent seed = hillwave::solve_exponent(p, opt.tol);
    const hillwave::characteristic_exponent nu = hillwave::refine_exponent(seed, p, n);
    const hillwave::fourier_coefficients fc = hillwave::solve_coefficients(nu, p, n);

    ojson coeffs = ojson::array();
    for (int kappa = -fc.order; kappa <= fc.order; ++kappa) {
        const std::complex<double> c = fc.at(kappa);
        coeffs.push_back(ojson{{"kappa", kappa}, {"re", c.real()}, {"im", c.imag()}});
    }
    const ojson payload{{"nu", exponent_json(fc.nu)},
                        {"coefficients", coeffs},
                        {"matrix_residual", fc.matrix_residual},
                        {"de_residual", hillwave::residual(fc, p, 64)},
                        {"floquet_defect", hillwave::floquet_defect(fc, 64)},
                        {"ode_round_trip_defect", hillwave::ode_round_trip_defect(fc, p)},
                        {"boundary_decay_ok", fc.boundary_decay_ok},
                        {"at_band_edge", fc.at_band_edge}};
    const ojson diagnostics{{"tol", opt.tol},
                            {"n", n},
                            {"exponent_refined", true},
                            {"refinement_shift",
                             std::hypot(nu.re - seed.re, nu.im - seed.im)}};
    emit(envelope("fourier", params_json(p), payload, diagnostics), opt);
    return exit_ok;
}

// -------------------------------------------------------------- recur-demo

int cmd_recur_demo(std::uint64_t seed, long k, long n, const std::string& preset,
                   const cli_options& opt) {
    if (!(7 <= n && n <= k - 3))
        throw usage_error("recur-demo requires 7 <= n <= k-3 (got n = " + std::to_string(n) +
                          ", k = " + std::to_string(k) + ")");

    hillwave::recursion_system sys;
    double u0 = 1.0, u1 = 1.0, u2 = 1.0;
    if (preset == "tribonacci") {
        sys.a.assign(static_cast<std::size_t>(k) + 1, 1.0);
        sys.b.assign(static_cast<std::size_t>(k) + 1, 1.0);
        sys.c.assign(static_cast<std::size_t>(k) + 1, 1.0);
    } else {
        sys = hillwave::verify::seeded_system(seed, k, &u0, &u1, &u2);
    }

    const std::vector<double> traj = hillwave::iterate_trajectory(sys, u0, u1, u2, k);
    const double solved = hillwave::solve_uk(sys, traj[static_cast<std::size_t>(k - n + 3)],
                                             traj[static_cast<std::size_t>(k - n + 2)],
                                             traj[static_cast<std::size_t>(k - n)], k, n);
    const double iterated = traj[static_cast<std::size_t>(k)];
    const double rel =
        std::abs(solved - iterated) / std::max(std::abs(iterated), 1e-300);

    ojson params{{"preset", preset}, {"k", k}, {"n", n}};
    if (preset != "tribonacci") params["seed"] = seed;
    const ojson payload{{"u_explicit", solved},
                        {"u_iterated", iterated},
                        {"relative_error", rel},
                        {"trajectory", traj}};
    emit(envelope("recur-demo", params, payload,
                  ojson{{"seeds_used", ojson{{"u0", u0}, {"u1", u1}, {"u2", u2}}}}),
         opt);
    return exit_ok;
}

// ------------------------------------------------------------------ verify

int cmd_verify(const cli_options& opt) {
    const std::vector<hillwave::verify::check_result> results = hillwave::verify::run_all();
    ojson rows = ojson::array();
    int failed = 0;
    for (const hillwave::verify::check_result& r : results) {
        rows.push_back(
            ojson{{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
        if (!r.passed) ++failed;
        note(opt, std::string(r.passed ? "PASS" : "FAIL") + "  [" + r.id + "] " + r.name +
                      " -- " + r.detail);
    }
    const ojson payload{{"checks", rows},
                        {"total", static_cast<int>(results.size())},
                        {"failed", failed}};
    emit(envelope("verify", ojson::object(), payload, ojson::object()), opt);
    return failed == 0 ? exit_ok : exit_checks_failed;
}

} // namespace

int main(int argc, char** argv) {
    cli_options opt;
    if (const char* env = std::getenv("HILLWAVE_TOL")) {
        try {
            const double v = std::stod(env);
            if (v > 0.0 && std::isfinite(v)) opt.tol = v;
        } catch (...) {
            // Unparseable environment value: keep the built-in default.
        }
    }

    CLI::App app{"hillwave: characteristic exponents of psi'' + (a - 2q cos 2z) psi = 0 "
                 "via the Hill determinant, with an independent ODE oracle"};
    app.require_subcommand(1);
    app.add_option("--tol", opt.tol,
                   "determinant convergence tolerance (HILLWAVE_TOL overrides the default; "
                   "this flag wins)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--json-indent", opt.json_indent,
                   "JSON indentation; negative means most compact")
        ->capture_default_str();
    app.add_flag("--quiet", opt.quiet, "suppress informational notes on stderr");

    double a = 0.0, q = 0.0;
    std::string method_exp = "wh";
    CLI::App* sub_exp = app.add_subcommand(
        "exponent", "characteristic exponent nu at (a, q); methods: determinant formula "
                    "(wh), ODE discriminant (ode), or both with cross-check");
    sub_exp->fallthrough();
    sub_exp->add_option("--a", a, "parameter a")->required();
    sub_exp->add_option("--q", q, "parameter q")->required();
    sub_exp->add_option("--method", method_exp, "wh | ode | both")
        ->check(CLI::IsMember({"wh", "ode", "both"}))
        ->capture_default_str();

    int det_n = -1;
    bool det_converge = false;
    std::string method_det = "recursion";
    CLI::App* sub_det = app.add_subcommand(
        "determinant", "truncated or converged Hill determinant Delta(a, 0)");
    sub_det->fallthrough();
    sub_det->add_option("--a", a, "parameter a")->required();
    sub_det->add_option("--q", q, "parameter q")->required();
    sub_det->add_option("--n", det_n, "truncation order (matrix dimension 2n+1)");
    sub_det->add_flag("--converge", det_converge, "iterate to the infinite-order limit");
    sub_det->add_option("--method", method_det, "recursion | direct | explicit")
        ->check(CLI::IsMember({"recursion", "direct", "explicit"}))
        ->capture_default_str();

    double a_min = 0.0, a_max = 0.0;
    int steps = 0;
    std::string chart_format = "json", out_path;
    CLI::App* sub_chart = app.add_subcommand(
        "chart", "scan a-window at fixed q: exponent, stability, band structure");
    sub_chart->fallthrough();
    sub_chart->add_option("--q", q, "parameter q")->required();
    sub_chart->add_option("--a-min", a_min, "window start")->required();
    sub_chart->add_option("--a-max", a_max, "window end")->required();
    sub_chart->add_option("--steps", steps, "number of grid intervals (nodes = steps + 1)")
        ->required()
        ->check(CLI::Range(1, 100000000));
    sub_chart->add_option("--format", chart_format, "json | csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    sub_chart->add_option("--out", out_path, "write output to this file instead of stdout");

    int fourier_n = 32;
    CLI::App* sub_fourier = app.add_subcommand(
        "fourier", "Fourier coefficients of the Floquet solution at (a, q), plus residuals");
    sub_fourier->fallthrough();
    sub_fourier->add_option("--a", a, "parameter a")->required();
    sub_fourier->add_option("--q", q, "parameter q")->required();
    sub_fourier->add_option("--n", fourier_n, "truncation order")
        ->check(CLI::Range(1, 4096))
        ->capture_default_str();

    std::uint64_t seed = 0;
    long rd_k = 30, rd_n = 12;
    std::string preset = "random";
    CLI::App* sub_rd = app.add_subcommand(
        "recur-demo", "demo: explicit three-seed recursion solve vs direct iteration");
    sub_rd->fallthrough();
    sub_rd->add_option("--seed", seed, "random system seed")->capture_default_str();
    sub_rd->add_option("--k", rd_k, "target index")->capture_default_str();
    sub_rd->add_option("--n", rd_n, "solver span (7 <= n <= k-3)")->capture_default_str();
    sub_rd->add_option("--preset", preset, "random | tribonacci")
        ->check(CLI::IsMember({"random", "tribonacci"}))
        ->capture_default_str();

    CLI::App* sub_verify = app.add_subcommand(
        "verify", "run the full end-to-end verification suite; nonzero exit on any failure");
    sub_verify->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error("(parse)", "usage", e.what(), opt);
        return exit_usage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        if (sub_exp->parsed()) return cmd_exponent({a, q}, method_exp, opt);
        if (sub_det->parsed())
            return cmd_determinant({a, q}, det_n, det_converge, method_det, opt);
        if (sub_chart->parsed())
            return cmd_chart(q, a_min, a_max, steps, chart_format, out_path, opt);
        if (sub_fourier->parsed()) return cmd_fourier({a, q}, fourier_n, opt);
        if (sub_rd->parsed()) return cmd_recur_demo(seed, rd_k, rd_n, preset, opt);
        if (sub_verify->parsed()) return cmd_verify(opt);
        emit_error(command, "usage", "no subcommand handler matched", opt);
        return exit_usage;
    } catch (const usage_error& e) {
        emit_error(command, "usage", e.what(), opt);
        return exit_usage;
    } catch (const io_error& e) {
        emit_error(command, "io", e.what(), opt);
        return exit_io;
    } catch (const hillwave::numeric_error& e) {
        emit_error(command, e.code(), e.what(), opt);
        return exit_domain;
    } catch (const std::invalid_argument& e) {
        emit_error(command, "usage", e.what(), opt);
        return exit_usage;
    } catch (const std::exception& e) {
        emit_error(command, "internal", e.what(), opt);
        return exit_domain;
    }
}
