#include "tvseg/solver_gd.hpp"

#include "tvseg/error.hpp"
#include "tvseg/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace tvseg {

void GdOptions::validate() const {
    if (max_outer < 1 || max_inner < 1) throw InvalidInput("iteration budgets must be positive");
    if (!(base_rate > 0.0)) throw InvalidInput("base rate must be positive");
    if (!(smoothing >= 0.0)) throw InvalidInput("smoothing must be nonnegative");
    if (!(tol > 0.0)) throw InvalidInput("tolerance must be positive");
    if (!(init_jitter >= 0.0)) throw InvalidInput("init jitter must be nonnegative");
}

double smoothed_relaxed_energy(const Eigen::Ref<const RelaxedField>& u, double c1, double c2,
                               const GridSignal& f, const EnergyParams& p, double smoothing) {
    const Eigen::ArrayXd& fv = f.values().array();
    const double fid = (u.array() * (c1 - fv).square() + (1.0 - u.array()) * (c2 - fv).square()).sum();
    return smoothed_total_variation(u, smoothing) + p.lambda * f.dx() * fid;
}

namespace {

// d/du of the fidelity term for fixed phase values a, b (scalars or per-cell).
template <typename A, typename B>
Eigen::VectorXd data_gradient(const A& a, const B& b, const GridSignal& f, const EnergyParams& p) {
    const Eigen::ArrayXd& fv = f.values().array();
    return (p.lambda * f.dx() * ((a - fv).square() - (b - fv).square())).matrix();
}

class Adagrad {
public:
    explicit Adagrad(Index n, double rate) : acc_(Eigen::ArrayXd::Zero(n)), rate_(rate) {}

    // One projected step on x.
    void step(Eigen::VectorXd& x, const Eigen::VectorXd& grad) {
        acc_ += grad.array().square();
        x.array() -= rate_ * grad.array() / (acc_ + 1e-8).sqrt();
        x = x.cwiseMax(0.0).cwiseMin(1.0);
    }

private:
    Eigen::ArrayXd acc_;
    double rate_;
};

// Median threshold of f; falls back to >= when > leaves u constant.
Eigen::VectorXd median_start(const GridSignal& f) {
    std::vector<double> sorted(f.values().begin(), f.values().end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    const double median = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    Eigen::VectorXd u = (f.values().array() > median).cast<double>();
    if (u.minCoeff() == u.maxCoeff()) u = (f.values().array() >= median).cast<double>();
    return u;
}

Eigen::VectorXd initial_u(const GridSignal& f, const GdOptions& opts) {
    Eigen::VectorXd u = median_start(f);
    if (opts.init_jitter > 0.0) {
        SplitMix64 rng(opts.seed);
        for (Index i = 0; i < u.size(); ++i) u[i] += rng.uniform(-opts.init_jitter, opts.init_jitter);
        u = u.cwiseMax(0.0).cwiseMin(1.0);
    }
    return u;
}

} // namespace

Eigen::VectorXd smoothed_relaxed_gradient(const Eigen::Ref<const RelaxedField>& u, double c1, double c2,
                                          const GridSignal& f, const EnergyParams& p, double smoothing) {
    return smoothed_tv_gradient(u, smoothing) + data_gradient(c1, c2, f, p);
}

GdRun solve_gd_traced(const GridSignal& f, const EnergyParams& p, const GdOptions& opts) {
    p.validate();
    opts.validate();

    GdRun run;
    Eigen::VectorXd u = initial_u(f, opts);
    Constants c = optimal_constants(u, f);
    double best = relaxed_energy(u, c.c1, c.c2, f, p);
    run.relaxed = u;
    double previous = best;
    long long rounds = 0;

    for (int outer = 0; outer < opts.max_outer; ++outer, ++rounds) {
        c = optimal_constants(u, f);
        const Eigen::VectorXd data = data_gradient(c.c1, c.c2, f, p);
        Adagrad optimizer(u.size(), opts.base_rate);
        for (int inner = 0; inner < opts.max_inner; ++inner) {
            optimizer.step(u, smoothed_tv_gradient(u, opts.smoothing) + data);
            run.stayed_in_box = run.stayed_in_box && std::isfinite(relaxed_energy(u, c.c1, c.c2, f, p));
        }
        c = optimal_constants(u, f);
        const double energy = relaxed_energy(u, c.c1, c.c2, f, p);
        if (energy < best) {
            best = energy;
            run.relaxed = u;
        }
        run.best_trace.push_back(best);
        if (std::abs(previous - energy) < opts.tol) {
            ++rounds;
            break;
        }
        previous = energy;
    }

    run.result = evaluate(BinarySegmentation::from_cells(run.relaxed), f, p, Method::Gd);
    run.result.relaxed_energy = best;
    run.result.iterations = rounds;
    run.result.candidates = 1;
    return run;
}

BinarySegmentation binary_prox(const Eigen::Ref<const Eigen::VectorXd>& cost) {
    const Index n = cost.size();
    if (n == 0) throw InvalidInput("empty signal");
    // from[i][s]: phase of cell i-1 on the best path ending in phase s at cell i
    std::vector<std::array<int, 2>> from(static_cast<std::size_t>(n));
    std::array<double, 2> best{0.0, cost[0]};
    for (Index i = 1; i < n; ++i) {
        std::array<double, 2> next{};
        for (int s = 0; s < 2; ++s) {
            const double stay = best[s];
            const double flip = best[1 - s] + 1.0;
            from[static_cast<std::size_t>(i)][s] = stay <= flip ? s : 1 - s;
            next[s] = std::min(stay, flip) + (s == 1 ? cost[i] : 0.0);
        }
        best = next;
    }
    int s = best[0] <= best[1] ? 0 : 1;
    std::vector<Index> jumps;
    for (Index i = n - 1; i > 0; --i) {
        const int prev = from[static_cast<std::size_t>(i)][s];
        if (prev != s) jumps.push_back(i);
        s = prev;
    }
    std::reverse(jumps.begin(), jumps.end());
    return {n, s, std::move(jumps)};
}

namespace {

// Continuous nondecreasing piecewise-linear function on [0,1]: piece j spans
// [x[j-1], x[j]] (with x[-1] = 0, x[m-1] = 1) and equals slope[j] * b + shift[j].
struct PiecewiseLinear {
    std::vector<double> x{1.0};
    std::vector<double> slope{0.0};
    std::vector<double> shift{0.0};

    double lo(std::size_t j) const { return j == 0 ? 0.0 : x[j - 1]; }
    double at(std::size_t j, double b) const { return slope[j] * b + shift[j]; }

    // inf { b : value(b) >= level }, or 1
    double first_at_least(double level) const {
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (at(j, x[j]) < level) continue;
            if (at(j, lo(j)) >= level) return lo(j);
            return std::clamp((level - shift[j]) / slope[j], lo(j), x[j]);
        }
        return 1.0;
    }

    // sup { b : value(b) <= level }, or 0
    double last_at_most(double level) const {
        for (std::size_t j = x.size(); j-- > 0;) {
            if (at(j, lo(j)) > level) continue;
            if (at(j, x[j]) <= level) return x[j];
            return std::clamp((level - shift[j]) / slope[j], lo(j), x[j]);
        }
        return 0.0;
    }

    // Replaces the function by min(max(value, -kappa), kappa) given the
    // crossing points a <= b of the two levels.
    void clip(double kappa, double a, double b) {
        PiecewiseLinear out;
        out.x.clear();
        out.slope.clear();
        out.shift.clear();
        auto push = [&](double end, double sl, double sh) {
            out.x.push_back(end);
            out.slope.push_back(sl);
            out.shift.push_back(sh);
        };
        if (a > 0.0) push(a, 0.0, -kappa);
        for (std::size_t j = 0; j < x.size(); ++j)
            if (x[j] > a && lo(j) < b) push(std::min(x[j], b), slope[j], shift[j]);
        if (b < 1.0 || out.x.empty()) push(1.0, 0.0, kappa);
        *this = std::move(out);
    }
};

} // namespace

Eigen::VectorXd weighted_tv_denoise(const Eigen::Ref<const Eigen::VectorXd>& y,
                                    const Eigen::Ref<const Eigen::VectorXd>& w, double kappa) {
    const Index n = y.size();
    if (n == 0) throw InvalidInput("empty signal");
    if (w.size() != n) throw InvalidInput("grid mismatch");
    if (!(kappa >= 0.0) || !((w.array() >= 0.0).all())) throw InvalidInput("weights must be nonnegative");

    std::vector<double> lower(static_cast<std::size_t>(n)), upper(static_cast<std::size_t>(n));
    PiecewiseLinear d;
    for (Index i = 0; i < n; ++i) {
        // add the derivative 2 w_i (b - y_i)
        for (std::size_t j = 0; j < d.x.size(); ++j) {
            d.slope[j] += 2.0 * w[i];
            d.shift[j] -= 2.0 * w[i] * y[i];
        }
        if (i == n - 1) break;
        const double a = d.first_at_least(-kappa);
        const double b = std::max(a, d.last_at_most(kappa));
        lower[static_cast<std::size_t>(i)] = a;
        upper[static_cast<std::size_t>(i)] = b;
        d.clip(kappa, a, b);
    }
    Eigen::VectorXd v(n);
    v[n - 1] = d.first_at_least(0.0);
    for (Index i = n - 1; i-- > 0;)
        v[i] = std::clamp(v[i + 1], lower[static_cast<std::size_t>(i)], upper[static_cast<std::size_t>(i)]);
    return v;
}

FepsTriple minimize_feps(const GridSignal& f, const EnergyParams& p, FepsTriple start, const GdOptions& opts) {
    p.validate();
    opts.validate();
    const Index n = f.size();
    if (start.u.size() != n || start.v1.size() != n || start.v2.size() != n) throw InvalidInput("grid mismatch");
    const auto unit = [](double t) { return truncate_unit(t); };
    Eigen::VectorXd u = start.u.unaryExpr(unit);
    Eigen::VectorXd v1 = start.v1.unaryExpr(unit);
    Eigen::VectorXd v2 = start.v2.unaryExpr(unit);

    const Eigen::ArrayXd& fv = f.values().array();
    const double weight = p.lambda * f.dx();
    const double kappa = 1.0 / p.epsilon;
    FepsTriple best{u, v1, v2, feps_energy(u, v1, v2, f, p)};

    for (int outer = 0; outer < opts.max_outer; ++outer) {
        u = binary_prox(weight * ((v1.array() - fv).square() - (v2.array() - fv).square()).matrix()).to_field();
        v1 = weighted_tv_denoise(f.values(), weight * u, kappa);
        v2 = weighted_tv_denoise(f.values(), (weight * (1.0 - u.array())).matrix(), kappa);
        const double energy = feps_energy(u, v1, v2, f, p);
        const double decrease = best.energy - energy;
        if (energy < best.energy) best = {u, v1, v2, energy};
        if (decrease < opts.tol) break;
    }
    return best;
}

FepsTriple minimize_feps(const GridSignal& f, const EnergyParams& p, const GdOptions& opts) {
    const Eigen::VectorXd u = median_start(f);
    const Constants c = optimal_constants(u, f);
    const Index n = f.size();
    return minimize_feps(f, p, {u, Eigen::VectorXd::Constant(n, c.c1), Eigen::VectorXd::Constant(n, c.c2), 0.0},
                         opts);
}

} // namespace tvseg
