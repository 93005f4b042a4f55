#pragma once

// Command-line front end. `run` parses argv, executes one subcommand, writes
// an optional JSON report and returns the exit code:
//   0 pass, 1 fail (or runtime failure), 2 usage / input error, 3 inconclusive.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "austere.hpp"
#include "catalog.hpp"
#include "errors.hpp"
#include "linclass.hpp"
#include "polyalg.hpp"
#include "report.hpp"
#include "slag.hpp"

namespace twaust::cli {

enum ExitCode : int { kPass = 0, kFail = 1, kUsage = 2, kInconclusive = 3 };

inline int exit_code(Verdict v) {
    switch (v) {
    case Verdict::pass: return kPass;
    case Verdict::fail: return kFail;
    case Verdict::inconclusive: return kInconclusive;
    }
    return kFail;
}

/// Options shared by the example-driven subcommands.
struct ExampleOptions {
    std::string example;
    std::string params_path;
    std::optional<double> theta;
    std::optional<std::size_t> samples;
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
};

namespace detail {

inline nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline ExampleInstance load_example(const ExampleOptions& o) {
    const nlohmann::json params = o.params_path.empty() ? nlohmann::json(nullptr) : read_json(o.params_path);
    ExampleInstance e = instantiate(o.example, params);
    if (o.theta) e.theta = *o.theta;
    return e;
}

inline SampleSpec sample_spec(const ExampleInstance& e, const ExampleOptions& o) {
    SampleSpec s = e.sample_default;
    if (o.samples) {
        if (*o.samples < 1) throw InputError("--samples must be positive");
        s = SampleSpec::grid(e.chart.domain, *o.samples, e.chart.dim_n - e.chart.dim_k);
    }
    if (o.seed) {
        s.seed = *o.seed;
        s.jitter = true;
    }
    return s;
}

inline std::string fmt(double x) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(3) << x;
    return os.str();
}

inline void print_summary(std::ostream& out, const CheckReport& r) {
    out << r.subject() << ": " << to_string(r.verdict()) << '\n';
    for (const auto& c : r.conditions())
        out << "  " << std::left << std::setw(24) << c.name << std::right << " max " << (c.saw_nan ? "nan" : fmt(c.max))
            << "  tol " << fmt(c.tolerance) << (c.pass() ? "" : "  FAIL") << '\n';
    for (const auto& [k, v] : r.measured()) out << "  " << k << " = " << std::setprecision(10) << v << '\n';
    if (r.points_skipped()) out << "  skipped " << r.points_skipped() << " of " << r.points_total() << " points\n";
    for (const auto& n : r.notes()) out << "  note: " << n << '\n';
}

inline void add_example_context(CheckReport& r, const ExampleInstance& e) {
    r.add_note("params: " + e.params.dump());
    r.set_measured("theta", e.theta);
}

} // namespace detail

/// Executes argv (argv[0] is the program name). Output goes to `out`, error
/// messages to `err`.
inline int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Twisted-austere pair checks and special Lagrangian verification", "twaust"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    unsigned threads = 0;
    std::string report_path;
    app.add_option("--threads", threads, "worker threads (default: TWAUST_THREADS or hardware concurrency)");

    auto add_report = [&](CLI::App* sub) { sub->add_option("--report", report_path, "write the JSON report here"); };
    auto add_example = [&](CLI::App* sub, ExampleOptions& o) {
        sub->add_option("--example", o.example, "catalog id (see `list`)")->required();
        sub->add_option("--params", o.params_path, "JSON object of example parameters");
        sub->add_option("--theta", o.theta, "phase θ in radians");
        sub->add_option("--samples", o.samples, "approximate number of base sample points");
        sub->add_option("--seed", o.seed, "jitter the sample grid with this seed");
        sub->add_option("--threads", threads, "worker threads");
        add_report(sub);
    };

    auto* list = app.add_subcommand("list", "list catalog examples");

    ExampleOptions check_o;
    auto* check = app.add_subcommand("check", "evaluate the twisted-austere condition system");
    add_example(check, check_o);
    check->add_option("--tol", check_o.tol, "residual tolerance");

    ExampleOptions verify_o;
    auto* verify = app.add_subcommand("verify-sl", "test the twisted conormal bundle for special Lagrangian");
    add_example(verify, verify_o);
    verify->add_option("--tol", verify_o.tol, "residual tolerance");

    ExampleOptions validate_o;
    auto* validate = app.add_subcommand("validate", "evaluate the example's own hypotheses");
    add_example(validate, validate_o);
    validate->add_option("--tol", validate_o.tol, "residual tolerance");

    int id_k = 3, id_trials = 1000;
    std::uint64_t id_seed = 42;
    auto* identities = app.add_subcommand("identities", "randomized matrix identity suite");
    identities->add_option("--k", id_k, "matrix size (2..5)");
    identities->add_option("--trials", id_trials, "number of random trials");
    identities->add_option("--seed", id_seed, "random seed");
    add_report(identities);

    std::string span_input;
    double span_tol = 1e-8;
    auto* span = app.add_subcommand("span", "linear algebra of spans of symmetric matrices");
    span->require_subcommand(1);
    auto* classify = span->add_subcommand("classify", "singularity test and normal form of a span");
    classify->add_option("--input", span_input, "JSON array of matrices or {\"matrices\": [...]}")->required();
    classify->add_option("--tol", span_tol, "shape residual tolerance");
    add_report(classify);

    std::string prolong_input;
    auto* prolong = app.add_subcommand("prolong", "first prolongation of a tableau");
    prolong->add_option("--input", prolong_input, "tableau JSON")->required();
    add_report(prolong);

    ExampleOptions export_o;
    std::string csv_path;
    auto* exp = app.add_subcommand("export", "write sampled points of the conormal bundle as CSV");
    exp->add_option("--example", export_o.example, "catalog id")->required();
    exp->add_option("--params", export_o.params_path, "JSON object of example parameters");
    exp->add_option("--theta", export_o.theta, "phase θ in radians");
    exp->add_option("--samples", export_o.samples, "approximate number of base sample points");
    exp->add_option("--seed", export_o.seed, "jitter the sample grid with this seed");
    exp->add_option("--csv", csv_path, "output file")->required();

    std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kPass;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kPass;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    const auto start = std::chrono::steady_clock::now();
    auto finish = [&](CheckReport rep, std::uint64_t seed) {
        rep.set_command(argv);
        rep.set_seed(seed);
        rep.set_wall_time(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
        detail::print_summary(out, rep);
        if (!report_path.empty()) detail::write_text(report_path, rep.dump() + "\n");
        return exit_code(rep.verdict());
    };

    try {
        if (list->parsed()) {
            for (const auto& id : example_ids()) out << std::left << std::setw(22) << id << instantiate(id).description << '\n';
            return kPass;
        }
        if (check->parsed()) {
            const auto e = detail::load_example(check_o);
            const auto s = detail::sample_spec(e, check_o);
            CheckOptions opt;
            opt.threads = threads;
            if (check_o.tol) opt.tolerance = *check_o.tol;
            auto rep = check_pair(e.chart, e.mu, e.phase(), s, opt);
            rep.set_subject("check " + e.id);
            detail::add_example_context(rep, e);
            return finish(std::move(rep), s.seed);
        }
        if (verify->parsed()) {
            const auto e = detail::load_example(verify_o);
            const auto s = detail::sample_spec(e, verify_o);
            VerifyOptions opt;
            opt.threads = threads;
            if (verify_o.tol) opt.tolerance = *verify_o.tol;
            auto rep = verify_special_lagrangian(e.chart, e.mu, e.theta, s, opt);
            rep.set_subject("verify-sl " + e.id);
            detail::add_example_context(rep, e);
            return finish(std::move(rep), s.seed);
        }
        if (validate->parsed()) {
            const auto e = detail::load_example(validate_o);
            const auto s = detail::sample_spec(e, validate_o);
            auto rep = validate_inputs(e, s, threads, validate_o.tol.value_or(kHypothesisTolerance));
            rep.set_subject("validate " + e.id);
            rep.add_note("params: " + e.params.dump());
            return finish(std::move(rep), s.seed);
        }
        if (identities->parsed()) return finish(identity_suite(id_k, id_trials, id_seed), id_seed);
        if (classify->parsed()) {
            const auto span_in = SymSpan::make(matrices_from_json(detail::read_json(span_input)));
            CheckReport rep("span classify");
            const auto sing = is_singular_span(span_in);
            const double det_tol = kRankThreshold * std::pow(span_in.scale(), static_cast<double>(span_in.size_k()));
            rep.record("polarized_det", sing.value, std::max(det_tol, 1e-300));
            rep.set_measured("dimension", static_cast<double>(span_in.dim()));
            rep.set_measured("matrix_size", static_cast<double>(span_in.size_k()));
            if (!sing.singular) {
                std::string cert;
                for (auto i : sing.certificate) cert += (cert.empty() ? "" : ",") + std::to_string(i);
                rep.add_note("not singular: D(" + cert + ") != 0");
            } else if (span_in.size_k() == 3 && span_in.dim() == 3) {
                try {
                    const auto c = classify_singular_3span(span_in, span_tol);
                    rep.record("shape_residual", c.shape_residual, span_tol);
                    rep.set_measured("kernel_dim", static_cast<double>(c.kernel_dim));
                    rep.add_note(std::string("type: ") + to_string(c.type));
                    rep.add_note("rotation: " + matrix_to_json(c.rotation).dump());
                } catch (const ClassificationError& ex) {
                    rep.record("shape_residual", std::numeric_limits<double>::infinity(), span_tol);
                    rep.add_note(std::string("classification failed: ") + ex.what());
                }
            } else {
                rep.add_note("singular; normal forms are only computed for 3-dimensional spans of 3x3 matrices");
            }
            return finish(std::move(rep), 0);
        }
        if (prolong->parsed()) {
            const auto tab = tableau_from_json(detail::read_json(prolong_input));
            const auto p = prolongation(tab);
            CheckReport rep("prolong");
            // largest discarded singular value relative to the largest; zero when the rank is exact
            const double top = p.singular_values.empty() ? 0.0 : p.singular_values.front();
            double discarded = 0.0, kept_min = top;
            for (double s : p.singular_values) {
                if (top > 0 && s <= kRankThreshold * top) discarded = std::max(discarded, s / top);
                else if (top > 0) kept_min = std::min(kept_min, s);
            }
            rep.record("rank_margin", discarded, kRankThreshold);
            rep.set_measured("dimension", static_cast<double>(p.dimension));
            rep.set_measured("smallest_kept_singular_value", kept_min);
            rep.set_measured("V_dim", static_cast<double>(tab.V_dim));
            rep.set_measured("W_dim", static_cast<double>(tab.W_dim));
            rep.set_measured("order", static_cast<double>(tab.order));
            return finish(std::move(rep), 0);
        }
        if (exp->parsed()) {
            const auto e = detail::load_example(export_o);
            const auto s = detail::sample_spec(e, export_o);
            std::ofstream csv(csv_path);
            if (!csv) throw std::runtime_error("cannot write " + csv_path);
            const std::size_t rows = export_csv(e.chart, e.mu, e.theta, s, csv);
            out << "wrote " << rows << " rows to " << csv_path << '\n';
            return rows > 0 ? kPass : kFail;
        }
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFail;
    }
    err << "error: no subcommand\n";
    return kUsage;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    return run(std::vector<std::string>(argv, argv + argc), out, err);
}

} // namespace twaust::cli
