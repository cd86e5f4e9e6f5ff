#include "tvseg/cli.hpp"

#include "tvseg/certificate.hpp"
#include "tvseg/counterexample2d.hpp"
#include "tvseg/error.hpp"
#include "tvseg/run_record.hpp"
#include "tvseg/signal.hpp"
#include "tvseg/solver_exact.hpp"
#include "tvseg/solver_gd.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

namespace tvseg::cli {

namespace {

using nlohmann::json;

// Exact ratio p/q (or a plain decimal with q = 1) as typed on the command line.
struct Fraction {
    double value = 0.0;
    std::optional<std::pair<long long, long long>> ratio;
};

Fraction parse_fraction(const std::string& text) {
    Fraction out;
    const auto slash = text.find('/');
    auto parse_int = [&](std::string_view s, long long& v) {
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        return ec == std::errc{} && ptr == s.data() + s.size();
    };
    if (slash != std::string::npos) {
        long long num = 0;
        long long den = 0;
        if (!parse_int(std::string_view(text).substr(0, slash), num) ||
            !parse_int(std::string_view(text).substr(slash + 1), den) || den <= 0)
            throw InvalidInput("invalid number '" + text + "'");
        out.ratio = std::pair{num, den};
        out.value = static_cast<double>(num) / static_cast<double>(den);
        return out;
    }
    long long whole = 0;
    if (parse_int(text, whole)) out.ratio = std::pair{whole, 1LL};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out.value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(out.value))
        throw InvalidInput("invalid number '" + text + "'");
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw InvalidInput("cannot write '" + path + "'");
    file << text;
}

bool looks_like_json(const std::string& path, const std::string& text) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return true;
    const auto first = text.find_first_not_of(" \t\r\n");
    return first != std::string::npos && text[first] == '{';
}

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

struct InputOptions {
    std::string input;
    std::string generate;
    Index n = 256;
    bool no_normalize = false;

    void add_to(CLI::App& app) {
        app.add_option("--input", input, "signal file (csv or json)");
        app.add_option("--generate", generate, "generator spec, e.g. pwc:5:seed=7 or weierstrass:a=0.5:b=3:terms=8");
        app.add_option("--n", n, "cell count for --generate")->check(CLI::PositiveNumber);
        app.add_flag("--no-normalize{true},--normalize{false}", no_normalize,
                     "rescale values onto [0,1] (default on)");
    }

    GridSignal load() const {
        if (input.empty() == generate.empty()) throw InvalidInput("exactly one of --input or --generate is required");
        GridSignal f;
        if (!input.empty()) {
            const std::string text = read_file(input);
            f = looks_like_json(input, text) ? from_json(text) : from_csv(text);
        } else {
            f = tvseg::generate(parse_generator_spec(generate), n);
        }
        if (!no_normalize) return normalize_to_unit(f);
        if (!f.in_unit_range()) throw InvalidInput("values outside [0,1] with --no-normalize");
        return f;
    }
};

struct SolveOptions {
    std::string lambda;
    double epsilon = 0.1;
    std::string method = "exact";
    int levels = 256;
    double jump_tol = 0.0;
    unsigned threads = 0;
    bool no_meta = false;
    GdOptions gd;

    void add_to(CLI::App& app, bool with_method) {
        app.add_option("--lambda", lambda, "fidelity weight")->required();
        app.add_option("--epsilon", epsilon, "weight of the constant-field penalty");
        if (with_method) app.add_option("--method", method, "exact|pwc|dp|gd|brute");
        app.add_option("--levels", levels, "equispaced levels for the exact solver")->check(CLI::PositiveNumber);
        app.add_option("--jump-tol", jump_tol, "jump threshold for the pwc method")->check(CLI::NonNegativeNumber);
        app.add_option("--threads", threads, "worker threads (0: all cores; TVSEG_THREADS overrides)");
        app.add_flag("--no-meta", no_meta, "omit wall-clock fields");
        app.add_option("--gd-outer", gd.max_outer, "gd alternation rounds");
        app.add_option("--gd-inner", gd.max_inner, "gd descent steps per round");
        app.add_option("--gd-rate", gd.base_rate, "ADAGRAD base rate");
        app.add_option("--gd-smoothing", gd.smoothing, "TV smoothing");
        app.add_option("--gd-tol", gd.tol, "gd stopping tolerance");
        app.add_option("--gd-seed", gd.seed, "gd initialization seed");
        app.add_option("--gd-jitter", gd.init_jitter, "gd initialization jitter");
    }

    unsigned thread_count() const {
        if (const char* env = std::getenv("TVSEG_THREADS")) {
            unsigned v = 0;
            const std::string_view s(env);
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || ptr != s.data() + s.size()) throw InvalidInput("invalid TVSEG_THREADS");
            return v;
        }
        return threads;
    }

    EnergyParams params() const {
        EnergyParams p{parse_fraction(lambda).value, epsilon};
        p.validate();
        return p;
    }
};

RunRecord run_method(const GridSignal& f, const SolveOptions& so, Method method, bool normalize) {
    const EnergyParams p = so.params();
    so.gd.validate();
    const auto start = std::chrono::steady_clock::now();
    SegmentationResult result;
    switch (method) {
    case Method::Exact: {
        ExactOptions opts;
        opts.levels = so.levels;
        opts.threads = so.thread_count();
        result = solve_exact(f, p, opts);
        break;
    }
    case Method::PiecewiseConstant: result = solve_piecewise_constant(f, p, so.jump_tol); break;
    case Method::Dp: {
        // alternating dp from the midrange threshold
        const double mid = 0.5 * (f.values().minCoeff() + f.values().maxCoeff());
        const Eigen::VectorXd cells = (f.values().array() > mid).cast<double>();
        result = refine_alternating(f, p, evaluate(BinarySegmentation::from_cells(cells), f, p, Method::Dp));
        break;
    }
    case Method::Gd: result = solve_gd(f, p, so.gd); break;
    case Method::Brute: result = brute_force(f, p); break;
    }
    const auto stop = std::chrono::steady_clock::now();

    RunRecord rec;
    rec.signal_digest = signal_digest(f);
    rec.params.n = f.size();
    rec.params.lambda = p.lambda;
    rec.params.epsilon = p.epsilon;
    rec.params.levels = so.levels;
    rec.params.jump_tol = so.jump_tol;
    rec.params.method = method;
    rec.params.normalize = normalize;
    rec.params.gd = so.gd;
    rec.result = std::move(result);
    if (!so.no_meta) rec.duration_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    return rec;
}

std::string plot_csv(const GridSignal& f, const BinarySegmentation& u) {
    std::string out = "x,f,u\n";
    const double dx = f.dx();
    for (Index i = 0; i < f.size(); ++i) {
        for (const double x : {static_cast<double>(i) * dx, static_cast<double>(i + 1) * dx}) {
            out += format_double(x) + ',' + format_double(f[i]) + ',' + std::to_string(u.at(i)) + '\n';
        }
    }
    return out;
}

int cmd_segment(const InputOptions& in, const SolveOptions& so, const std::string& out_path,
                const std::string& plot_path, bool with_certificate, std::ostream& out) {
    const GridSignal f = in.load();
    RunRecord rec = run_method(f, so, parse_method(so.method), !in.no_normalize);
    if (with_certificate) rec.certificate = certify(rec.result, f, so.params());
    write_output(out_path, to_json(rec).dump(2) + "\n", out);
    if (!plot_path.empty()) write_output(plot_path, plot_csv(f, rec.result.u), out);
    return 0;
}

int cmd_compare(const InputOptions& in, const SolveOptions& so, const std::string& out_path, std::ostream& out) {
    const GridSignal f = in.load();
    const RunRecord exact = run_method(f, so, Method::Exact, !in.no_normalize);
    const RunRecord gd = run_method(f, so, Method::Gd, !in.no_normalize);
    const json j = {{"exact", to_json(exact)},
                    {"gd", to_json(gd)},
                    {"gap", gd.result.energy - exact.result.energy}};
    write_output(out_path, j.dump(2) + "\n", out);
    return 0;
}

int cmd_certify(const InputOptions& in, const std::string& record_path, const std::string& out_path,
                std::ostream& out) {
    json j;
    try {
        j = json::parse(read_file(record_path));
    } catch (const json::parse_error& e) {
        throw InvalidInput(std::string("run record: ") + e.what());
    }
    const RunRecord rec = run_record_from_json(j);
    const GridSignal f = in.load();
    if (f.size() != rec.params.n) throw InvalidInput("grid mismatch");
    if (signal_digest(f) != rec.signal_digest) throw InvalidInput("signal digest does not match the run record");
    EnergyParams p{rec.params.lambda, rec.params.epsilon};
    p.validate();
    const CertificateReport report = certify(rec.result, f, p);
    json result = to_json(report);
    result["jump_signs_ok"] = check_jump_signs(rec.result.u, report);
    write_output(out_path, result.dump(2) + "\n", out);
    return 0;
}

int cmd_generate(const std::string& spec, Index n, const std::string& format, const std::string& out_path,
                 std::ostream& out) {
    const GridSignal f = generate(parse_generator_spec(spec), n);
    bool as_json = format == "json";
    if (format.empty()) as_json = out_path.size() >= 5 && out_path.substr(out_path.size() - 5) == ".json";
    else if (format != "csv" && format != "json") throw InvalidInput("format must be csv or json");
    write_output(out_path, as_json ? to_json(f) + "\n" : to_csv(f), out);
    return 0;
}

int cmd_counterexample(const std::string& lambda_text, double delta, std::ostream& out) {
    const Fraction lambda = parse_fraction(lambda_text);
    if (!(lambda.value > 0.0)) throw InvalidInput("lambda must be positive");
    const square::Scenario s{lambda.value, delta};
    s.validate();

    // 3/4 * p/q reduced exactly when lambda was given as a ratio
    double full = square::full_square_energy(lambda.value);
    if (lambda.ratio) {
        const auto [num, den] = *lambda.ratio;
        long long a = 3 * num;
        long long b = 4 * den;
        const long long g = std::gcd(a, b);
        a /= g;
        b /= g;
        full = static_cast<double>(a) / static_cast<double>(b);
    }
    const double inner = square::inner_square_energy();
    const json j = {{"lambda", lambda.value},
                    {"delta", delta},
                    {"full_square_energy", full},
                    {"inner_square_energy", inner},
                    {"rounded_square_energy", square::rounded_square_energy(s)},
                    {"improvement_holds", square::improvement_holds(s)}};
    out << j.dump(2) << "\n";
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact two-phase piecewise-constant segmentation of 1-D signals", "tvseg"};
    app.require_subcommand(1);

    InputOptions seg_in;
    SolveOptions seg_solve;
    std::string seg_out, seg_plot;
    bool seg_certify = false;
    auto* segment = app.add_subcommand("segment", "segment a signal and print a run record");
    seg_in.add_to(*segment);
    seg_solve.add_to(*segment, true);
    segment->add_option("--out", seg_out, "write the run record here instead of stdout");
    segment->add_option("--plot", seg_plot, "write step curves (x,f,u) as csv");
    segment->add_flag("--certify", seg_certify, "attach a certificate report");

    InputOptions cmp_in;
    SolveOptions cmp_solve;
    std::string cmp_out;
    auto* compare = app.add_subcommand("compare", "run exact and gd and report the energy gap");
    cmp_in.add_to(*compare);
    cmp_solve.add_to(*compare, false);
    compare->add_option("--out", cmp_out, "output file");

    InputOptions cert_in;
    std::string cert_record, cert_out;
    auto* certify_cmd = app.add_subcommand("certify", "check the optimality system for a run record");
    cert_in.add_to(*certify_cmd);
    certify_cmd->add_option("--record", cert_record, "run record json")->required();
    certify_cmd->add_option("--out", cert_out, "output file");

    std::string gen_spec, gen_format, gen_out;
    Index gen_n = 256;
    auto* generate_cmd = app.add_subcommand("generate", "write a synthetic signal");
    generate_cmd->add_option("spec", gen_spec, "generator spec")->required();
    generate_cmd->add_option("--n", gen_n, "cell count")->check(CLI::PositiveNumber);
    generate_cmd->add_option("--format", gen_format, "csv|json (default from --out extension)");
    generate_cmd->add_option("--out", gen_out, "output file");

    std::string ce_lambda;
    double ce_delta = 0.05;
    auto* counter = app.add_subcommand("counterexample", "closed-form energies of the 2-D square example");
    counter->add_option("--lambda", ce_lambda, "fidelity weight, decimal or p/q")->required();
    counter->add_option("--delta", ce_delta, "corner radius in (0, 1/2)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (segment->parsed()) return cmd_segment(seg_in, seg_solve, seg_out, seg_plot, seg_certify, out);
        if (compare->parsed()) return cmd_compare(cmp_in, cmp_solve, cmp_out, out);
        if (certify_cmd->parsed()) return cmd_certify(cert_in, cert_record, cert_out, out);
        if (generate_cmd->parsed()) return cmd_generate(gen_spec, gen_n, gen_format, gen_out, out);
        if (counter->parsed()) return cmd_counterexample(ce_lambda, ce_delta, out);
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const CapacityError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

} // namespace tvseg::cli
