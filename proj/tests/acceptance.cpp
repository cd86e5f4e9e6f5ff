// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: acceptance [artifact-dir]   (default: ./acceptance_artifacts)

#include "oracles.hpp"

#include "tvseg/certificate.hpp"
#include "tvseg/counterexample2d.hpp"
#include "tvseg/run_record.hpp"
#include "tvseg/solver_exact.hpp"
#include "tvseg/solver_gd.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

using namespace tvseg;

namespace {

using Clock = std::chrono::steady_clock;

struct Instance {
    GridSignal f;
    EnergyParams p;
    bool step = false;
};

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

bool subset(const std::vector<Index>& a, const std::vector<Index>& b) {
    return std::all_of(a.begin(), a.end(), [&](Index k) { return std::find(b.begin(), b.end(), k) != b.end(); });
}

double stddev(const Eigen::VectorXd& v) { return std::sqrt((v.array() - v.mean()).square().mean()); }

std::string fmt(const char* format, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

// 50 step + 50 smooth signals with n <= 12
std::vector<Instance> small_instances() {
    std::vector<Instance> out;
    SplitMix64 rng(20240501);
    for (int seed = 0; seed < 100; ++seed) {
        const long n = 2 + static_cast<long>(rng.below(11));
        const bool step = seed < 50;
        GridSignal f = step ? oracle::random_step(rng, n, 5) : oracle::random_smooth(rng, n);
        out.push_back({std::move(f), EnergyParams{rng.uniform(0.5, 60)}, step});
    }
    return out;
}

GridSignal weierstrass(long n) {
    return generate(parse_generator_spec("weierstrass:a=0.5:b=3:terms=8"), n);
}

std::vector<Instance> corpus() {
    std::vector<Instance> out = small_instances();
    GeneratorSpec spec;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        spec.seed = seed;
        spec.segments = 1 + static_cast<int>(seed % 12);
        const long n = seed % 3 == 0 ? 1024 : (seed % 3 == 1 ? 256 : 64);
        for (double lambda : {2.0, 20.0, 200.0}) out.push_back({generate(spec, n), EnergyParams{lambda}, true});
    }
    SplitMix64 rng(7);
    for (int k = 0; k < 20; ++k)
        out.push_back({oracle::random_smooth(rng, 512), EnergyParams{rng.uniform(5, 300)}, false});
    for (double lambda : {10.0, 50.0, 200.0}) out.push_back({weierstrass(1024), EnergyParams{lambda}, false});
    return out;
}

Outcome oracle_equivalence() {
    const auto start = Clock::now();
    int bad = 0;
    double worst = 0;
    for (const Instance& in : small_instances()) {
        const double e = solve_exact(in.f, in.p, 64).energy;
        const double b = brute_force(in.f, in.p).energy;
        worst = std::max(worst, rel(e, b));
        bad += rel(e, b) > 1e-12;
    }
    const double t = seconds_since(start);
    return {bad == 0 && t < 10.0, fmt("100 instances, %d mismatches, worst rel %.1e, %.2f s", bad, worst, t)};
}

Outcome binary_contract(const std::vector<Instance>& all, const std::vector<SegmentationResult>& exact) {
    int bad = 0, pwc_runs = 0;
    auto binary = [](const SegmentationResult& r, const GridSignal& f) {
        const Eigen::VectorXd u = r.u.to_field();
        return r.u.size() == f.size() && ((u.array() == 0.0) || (u.array() == 1.0)).all();
    };
    for (std::size_t i = 0; i < all.size(); ++i) {
        bad += !binary(exact[i], all[i].f);
        if (all[i].step && jump_set(all[i].f).size() < static_cast<std::size_t>(kEnumerationCap)) {
            bad += !binary(solve_piecewise_constant(all[i].f, all[i].p), all[i].f);
            ++pwc_runs;
        }
    }
    return {bad == 0, fmt("%zu exact + %d pwc outputs, %d non-binary", all.size(), pwc_runs, bad)};
}

Outcome property_a(const std::vector<Instance>& all, const std::vector<SegmentationResult>& exact) {
    int bad = 0;
    long jumps = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        const GridSignal& f = all[i].f;
        const double m = 0.5 * (exact[i].c1 + exact[i].c2);
        for (Index k : exact[i].u.jumps()) {
            ++jumps;
            const double lo = std::min(f[k - 1], f[k]), hi = std::max(f[k - 1], f[k]);
            bad += !(lo <= m + kCertificateSlack && m <= hi + kCertificateSlack);
        }
    }
    return {bad == 0, fmt("%ld jumps over %zu instances, %d off-level", jumps, all.size(), bad)};
}

Outcome property_b(const std::vector<Instance>& all, const std::vector<SegmentationResult>& exact) {
    int bad = 0, steps = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (!all[i].step) continue;
        ++steps;
        bad += !subset(exact[i].u.jumps(), jump_set(all[i].f, 0.0));
    }
    return {bad == 0, fmt("%d step instances, %d with jumps outside J_f", steps, bad)};
}

struct Rational {
    long long num = 0, den = 1;
    Rational(long long n = 0, long long d = 1) : num(n), den(d) {
        const long long g = std::gcd(num, den);
        num /= g;
        den /= g;
    }
    friend Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
    friend Rational operator-(Rational a, Rational b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
    friend Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
    friend Rational operator/(Rational a, Rational b) { return {a.num * b.den, a.den * b.num}; }
    friend bool operator==(Rational, Rational) = default;
};

Outcome square_counterexample() {
    const auto start = Clock::now();
    bool ok = true;
    for (double lambda : {0.5, 1.0, 16.0 / 3.0, 8.0, 100.0}) ok = ok && square::full_square_energy(lambda) == 0.75 * lambda;
    ok = ok && square::inner_square_energy() == 4.0;
    const bool tie = square::full_square_energy(Rational(16, 3)) == square::inner_square_energy<Rational>();
    int holds = 0, bad = 0;
    for (int i = 0; i < 100; ++i)
        for (int j = 0; j < 100; ++j) {
            const square::Scenario s{0.5 + 199.5 * i / 99.0, 0.001 + 0.498 * j / 99.0};
            if (!square::improvement_holds(s)) continue;
            ++holds;
            bad += !(square::rounded_square_energy(s) < 4.0);
        }
    const double t = seconds_since(start);
    return {ok && tie && bad == 0 && holds > 0 && t < 1.0,
            fmt("closed forms %s, rational tie %s, %d/%d improving cells below 4, %.3f s", ok ? "exact" : "off",
                tie ? "exact" : "broken", holds - bad, holds, t)};
}

GridSignal seeded_step(std::uint64_t seed) {
    GeneratorSpec spec;
    spec.seed = seed;
    spec.segments = 2 + static_cast<int>(seed % 4);
    return generate(spec, 256);
}

Outcome feps_constants() {
    // from the default start and from v1 = v2 = f; the out-of-regime
    // epsilon = 0.4 run is reported, not asserted
    double worst = 0, worst_rough = 0, loose = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const GridSignal f = seeded_step(seed);
        const FepsTriple t = minimize_feps(f, EnergyParams{1.0, 0.1});
        worst = std::max({worst, stddev(t.v1), stddev(t.v2)});
        const Eigen::VectorXd u = (f.values().array() > 0.5).cast<double>();
        const FepsTriple r = minimize_feps(f, EnergyParams{1.0, 0.1}, {u, f.values(), f.values(), 0.0});
        worst_rough = std::max({worst_rough, stddev(r.v1), stddev(r.v2)});
        const FepsTriple o = minimize_feps(f, EnergyParams{1.0, 0.4}, {u, f.values(), f.values(), 0.0});
        loose = std::max({loose, stddev(o.v1), stddev(o.v2)});
    }
    return {worst <= 1e-3 && worst_rough <= 1e-3,
            fmt("10 step signals, worst std(v) %.2e (constant start), %.2e (v = f start); epsilon 0.4: %.2e",
                worst, worst_rough, loose)};
}

Outcome feps_epsilon_independence() {
    double worst = 1.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const GridSignal f = seeded_step(seed);
        const FepsTriple a = minimize_feps(f, EnergyParams{1.0, 0.1});
        const FepsTriple b = minimize_feps(f, EnergyParams{1.0, 0.2});
        const double agree =
            static_cast<double>(((a.u.array() >= 0.5) == (b.u.array() >= 0.5)).count()) / static_cast<double>(f.size());
        worst = std::min(worst, agree);
    }
    return {worst >= 0.99, fmt("10 step signals, worst agreement %.4f", worst)};
}

Outcome certificate_necessity() {
    int bad = 0;
    for (const Instance& in : small_instances()) {
        const SegmentationResult best = brute_force(in.f, in.p);
        bad += !certify(best, in.f, in.p).feasible;
    }
    const GridSignal f = oracle::signal({0.1, 0.2, 0.9, 1.0});
    const BinarySegmentation u(4, 0, {1});
    const Constants c = optimal_constants(u, f);
    const CertificateReport r = certify(u, c.c1, c.c2, f, EnergyParams{10.0});
    const bool refuted = !r.feasible && !r.level_check && r.first_violation &&
                         r.first_violation->reason == ViolationReason::LevelMiss;
    return {bad == 0 && refuted, fmt("%d/100 optima rejected, level-miss example %s", bad, refuted ? "refuted" : "accepted")};
}

Outcome baseline_dominance(const std::filesystem::path& dir) {
    const GridSignal f = weierstrass(1024);
    bool ok = true;
    std::string detail;
    std::filesystem::create_directories(dir);
    for (double lambda : {10.0, 50.0, 200.0}) {
        const EnergyParams p{lambda};
        const SegmentationResult exact = solve_exact(f, p);
        const SegmentationResult gd = solve_gd(f, p);
        ok = ok && exact.energy <= gd.energy + 1e-9;
        detail += fmt("%slambda %g: exact %.6f gd %.6f", detail.empty() ? "" : ", ", lambda, exact.energy, gd.energy);
        for (const SegmentationResult* r : {&exact, &gd}) {
            RunRecord rec;
            rec.signal_digest = signal_digest(f);
            rec.params.n = f.size();
            rec.params.lambda = lambda;
            rec.params.method = r->method;
            rec.result = *r;
            std::ofstream(dir / fmt("weierstrass_n1024_lambda%g_%s.json", lambda, std::string(to_string(r->method)).c_str()))
                << to_json(rec).dump(2) << "\n";
        }
    }
    return {ok, detail};
}

Outcome truncation() {
    SplitMix64 rng(1000);
    int bad = 0;
    const long n = 64;
    for (int trial = 0; trial < 1000; ++trial) {
        const GridSignal f = oracle::random_uniform(rng, n);
        Eigen::VectorXd u(n), v1(n), v2(n);
        for (long i = 0; i < n; ++i) {
            u[i] = rng.uniform();
            v1[i] = rng.uniform(-2, 3);
            v2[i] = rng.uniform(-2, 3);
        }
        const EnergyParams p{rng.uniform(0, 50), rng.uniform(0.01, 1)};
        const auto T = [](double t) { return truncate_unit(t); };
        bad += feps_energy(u, v1.unaryExpr(T), v2.unaryExpr(T), f, p) > feps_energy(u, v1, v2, f, p);
    }
    return {bad == 0, fmt("1000 triples, %d violations", bad)};
}

Outcome gradient_check() {
    double worst = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SplitMix64 rng(seed * 7919);
        const long n = 48;
        const GridSignal f = oracle::random_smooth(rng, n);
        const EnergyParams p{rng.uniform(1, 100)};
        const double s = 1e-3;
        for (int point = 0; point < 10; ++point) {
            Eigen::VectorXd u(n);
            for (long i = 0; i < n; ++i) u[i] = rng.uniform(0.05, 0.95);
            const double c1 = rng.uniform(), c2 = rng.uniform();
            const Eigen::VectorXd g = smoothed_relaxed_gradient(u, c1, c2, f, p, s);
            Eigen::VectorXd fd(n);
            for (long i = 0; i < n; ++i) {
                Eigen::VectorXd a = u, b = u;
                a[i] += 1e-7;
                b[i] -= 1e-7;
                fd[i] = (smoothed_relaxed_energy(a, c1, c2, f, p, s) - smoothed_relaxed_energy(b, c1, c2, f, p, s)) / 2e-7;
            }
            worst = std::max(worst, (g - fd).norm() / std::max(1e-12, fd.norm()));
        }
    }
    return {worst <= 1e-5, fmt("50 points, worst rel error %.2e", worst)};
}

} // namespace

int main(int argc, char** argv) {
    const std::filesystem::path dir = argc > 1 ? argv[1] : "acceptance_artifacts";

    const std::vector<Instance> all = corpus();
    std::vector<SegmentationResult> exact;
    exact.reserve(all.size());
    for (const Instance& in : all) exact.push_back(solve_exact(in.f, in.p));

    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"oracle equivalence", oracle_equivalence},
        {"binary output", [&] { return binary_contract(all, exact); }},
        {"jumps on the decision level", [&] { return property_a(all, exact); }},
        {"jumps inside J_f for step signals", [&] { return property_b(all, exact); }},
        {"square counterexample", square_counterexample},
        {"feps constants for small epsilon", feps_constants},
        {"feps threshold independent of epsilon", feps_epsilon_independence},
        {"certificate necessity", certificate_necessity},
        {"exact beats gd on weierstrass", [&] { return baseline_dominance(dir); }},
        {"truncation monotonicity", truncation},
        {"gradient check", gradient_check},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    }
    std::printf("%d/%zu criteria passed; artifacts in %s\n", static_cast<int>(criteria.size()) - failed,
                criteria.size(), dir.string().c_str());
    return failed == 0 ? 0 : 1;
}
