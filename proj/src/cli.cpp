#include "mmdim/cli.hpp"

#include "mmdim/serialize.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace mmdim {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot write " + path);
    f << text;
}

BigInt parse_budget(const std::string& text) {
    const auto e = text.find_first_of("eE");
    try {
        if (e == std::string::npos) return BigInt(text, 10);
        const BigInt mant(text.substr(0, e), 10);
        const long exp = std::stol(text.substr(e + 1));
        if (exp < 0) throw UsageError("--budget exponent must be >= 0");
        return mant * ipow(BigInt(10), static_cast<unsigned long>(exp));
    } catch (const std::invalid_argument&) {
        throw UsageError("--budget expects an integer such as 1000000 or 1e6");
    }
}

struct Common {
    int precision = 30;
    std::string budget = "1000000";
    unsigned threads = 0;
};

int cmd_build(const std::string& spec_path, const std::string& out_path, std::ostream& out) {
    const SystemSpec spec = parse_spec(read_file(spec_path));
    const System system = build_system(spec);
    write_output(out_path, serialize_system(system), out);
    return kExitOk;
}

int cmd_validate(const std::string& path, std::ostream& out) {
    const System system = load_system(read_file(path), false);
    bool ok = true;
    auto report_part = [&](const StackedSystem& s, const std::string& label) {
        for (const auto& b : s.blocks()) {
            if (!b.horseshoe) continue;
            const ValidationReport r = validate_horseshoe(*b.horseshoe);
            for (const auto& c : r.checks) {
                out << label << "block " << b.k << ' ' << c.name << ": " << (c.passed ? "pass" : "FAIL");
                if (!c.passed) out << " (" << c.detail << ')';
                out << '\n';
            }
            ok = ok && r.ok();
        }
        const DisjointnessReport d = check_disjointness(s);
        out << label << "disjointness: " << (d.ok ? "pass" : "FAIL (" + d.detail + ")") << '\n';
        ok = ok && d.ok;
    };
    if (const auto* s = std::get_if<StackedSystem>(&system)) {
        report_part(*s, "");
    } else {
        const auto& tb = std::get<TwoBlockSystem>(system);
        report_part(tb.lower(), "lower ");
        report_part(tb.upper(), "upper ");
    }
    out << "result: " << (ok ? "pass" : "FAIL") << '\n';
    return ok ? kExitOk : kExitFail;
}

void print_extrapolation(const Extrapolation& x, std::ostream& os) {
    os << "liminf estimate " << x.liminf << " (branch " << x.liminf_branch << ", residual " << x.liminf_residual
       << ")\nlimsup estimate " << x.limsup << " (branch " << x.limsup_branch << ", residual " << x.limsup_residual
       << ")\n";
    if (x.degenerate) os << "warning: degenerate fit\n";
}

long resolve_last(const System& system, long k_last) { return k_last > 0 ? k_last : default_profile_horizon(system); }

int cmd_profile(const std::string& path, long k_first, long k_last, const std::string& out_path, const Common& c,
                std::ostream& out, std::ostream& err) {
    const System system = load_system(read_file(path));
    const auto rows = rate_profile(system, k_first, resolve_last(system, k_last), c.precision);
    std::ostringstream csv;
    csv << csv_header() << '\n';
    for (const auto& r : rows) csv << csv_row(r, c.precision) << '\n';
    write_output(out_path, csv.str(), out);
    if (rows.size() >= 4) print_extrapolation(extrapolate(rows), err);
    return kExitOk;
}

int cmd_estimate(const std::string& path, const std::vector<long>& ks, const std::vector<int>& ms,
                 const std::string& eps, const std::string& seeds, const std::string& out_path, const Common& c,
                 std::ostream& out, std::ostream& err) {
    const System system = load_system(read_file(path));
    NumericOptions opt;
    opt.budget = parse_budget(c.budget);
    opt.threads = c.threads;
    if (!eps.empty()) {
        try {
            opt.eps = Rational::parse(eps);
        } catch (const std::invalid_argument& e) {
            throw UsageError(std::string("--eps: ") + e.what());
        }
        if (opt.eps->sign() <= 0) throw UsageError("--eps must be positive");
    }
    if (seeds.rfind("grid:", 0) == 0) {
        try {
            opt.grid_per_axis = std::stoi(seeds.substr(5));
        } catch (const std::exception&) {
            opt.grid_per_axis = 0;
        }
        if (opt.grid_per_axis < 1) throw UsageError("--seeds grid:N needs N >= 1");
    } else if (seeds != "cylinder-centers") {
        throw UsageError("--seeds must be cylinder-centers or grid:N");
    }
    std::vector<int> sorted = ms;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.empty() || sorted.front() < 1) throw UsageError("--m values must be >= 1");

    const auto rows = mdim_numeric_profile(system, ks, sorted, opt);
    std::ostringstream csv;
    csv << csv_header() << '\n';
    int code = kExitOk;
    for (const auto& r : rows) {
        csv << csv_row(r) << '\n';
        if (!r.message.empty()) err << "k = " << r.k << ": " << r.message << '\n';
        if (r.status == NumericStatus::unmaterialized) code = kExitUsage;
    }
    write_output(out_path, csv.str(), out);
    return code;
}

int cmd_verify(const std::string& path, double tol, long k_last, const Common& c, std::ostream& out) {
    if (!(tol >= 0)) throw UsageError("--tol must be >= 0");
    const System system = load_system(read_file(path));
    const auto rows = rate_profile(system, 1, resolve_last(system, k_last), c.precision);
    const Extrapolation x = extrapolate(rows);
    const TargetValues target = analytic_target(system);
    const double lo_diff = std::fabs(x.liminf - target.liminf.to_double());
    const double up_diff = std::fabs(x.limsup - target.limsup.to_double());
    const bool pass = lo_diff <= tol && up_diff <= tol && !x.degenerate;

    out << "system " << system_kind(system) << ", n = " << system_dim(system) << ", k = 1.." << rows.back().k << '\n';
    out << std::left << std::setw(8) << "bound" << std::setw(14) << "estimate" << std::setw(14) << "target"
        << std::setw(14) << "diff" << std::setw(14) << "residual" << "branch\n";
    auto line = [&](const char* name, double est, const Rational& tgt, double diff, double res, const std::string& br) {
        out << std::setw(8) << name << std::setw(14) << est << std::setw(14) << tgt.to_double() << std::setw(14)
            << diff << std::setw(14) << res << br << '\n';
    };
    line("liminf", x.liminf, target.liminf, lo_diff, x.liminf_residual, x.liminf_branch);
    line("limsup", x.limsup, target.limsup, up_diff, x.limsup_residual, x.limsup_branch);
    if (x.degenerate) out << "degenerate fit\n";
    out << "result: " << (pass ? "pass" : "FAIL") << " (tol " << tol << ")\n";
    return pass ? kExitOk : kExitFail;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Horseshoe systems and metric mean dimension profiles", "mmdim"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--precision", common.precision, "Decimal digits for logarithms")->check(CLI::Range(5, 10000));
    app.add_option("--budget", common.budget, "Maximum number of enumerated cylinders (e.g. 1e6)");
    app.add_option("--threads", common.threads, "Worker threads (0: hardware; capped by MMDIM_THREADS)");

    std::string system_path, spec_path, out_path, eps, seeds = "cylinder-centers";
    long k_first = 1, k_last = 0;
    double tol = 0.02;
    std::vector<long> ks;
    std::vector<int> ms{1, 2, 3};

    auto* build = app.add_subcommand("build", "Build a system file from a JSON spec");
    build->add_option("spec", spec_path, "Spec file")->required();
    build->add_option("--out,-o", out_path, "Output file (default stdout)");

    auto* validate = app.add_subcommand("validate", "Check every horseshoe block and the cube placement");
    validate->add_option("system", system_path, "System file")->required();

    auto* profile = app.add_subcommand("profile", "Symbolic rate profile as CSV");
    profile->add_option("system", system_path, "System file")->required();
    profile->add_option("--k-first", k_first, "First block index")->check(CLI::PositiveNumber);
    profile->add_option("--k-last,--k-max", k_last, "Last block index (default: system horizon)");
    profile->add_option("--out,-o", out_path, "Output file (default stdout)");

    auto* estimate = app.add_subcommand("estimate", "Greedy separated-set counts as CSV");
    estimate->add_option("system", system_path, "System file")->required();
    estimate->add_option("--k", ks, "Block indices")->required()->delimiter(',')->allow_extra_args(false);
    estimate->add_option("--m", ms, "Orbit lengths")->delimiter(',')->allow_extra_args(false);
    estimate->add_option("--eps", eps, "Scale as p/q (default eps_k)");
    estimate->add_option("--seeds", seeds, "cylinder-centers or grid:N");
    estimate->add_option("--out,-o", out_path, "Output file (default stdout)");

    auto* verify = app.add_subcommand("verify", "Compare extrapolated bounds with the analytic target");
    verify->add_option("system", system_path, "System file")->required();
    verify->add_option("--tol", tol, "Allowed absolute difference");
    verify->add_option("--k-last,--k-max", k_last, "Last block index (default: system horizon)");

    for (auto* sub : {build, validate, profile, estimate, verify}) sub->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (build->parsed()) return cmd_build(spec_path, out_path, out);
        if (validate->parsed()) return cmd_validate(system_path, out);
        if (profile->parsed()) return cmd_profile(system_path, k_first, k_last, out_path, common, out, err);
        if (estimate->parsed()) return cmd_estimate(system_path, ks, ms, eps, seeds, out_path, common, out, err);
        if (verify->parsed()) return cmd_verify(system_path, tol, k_last, common, out);
    } catch (const SpecError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFail;
    }
    return kExitUsage;
}

}  // namespace mmdim
