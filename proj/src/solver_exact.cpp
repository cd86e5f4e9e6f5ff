#include "tvseg/solver_exact.hpp"

#include "tvseg/error.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <optional>
#include <thread>

namespace tvseg {

std::string_view to_string(Method m) {
    switch (m) {
    case Method::Exact: return "exact";
    case Method::PiecewiseConstant: return "pwc";
    case Method::Dp: return "dp";
    case Method::Gd: return "gd";
    case Method::Brute: return "brute";
    }
    return "exact";
}

Method parse_method(std::string_view name) {
    if (name == "exact") return Method::Exact;
    if (name == "pwc" || name == "piecewise-constant") return Method::PiecewiseConstant;
    if (name == "dp") return Method::Dp;
    if (name == "gd") return Method::Gd;
    if (name == "brute") return Method::Brute;
    throw InvalidInput("unknown method '" + std::string(name) + "'");
}

SegmentationResult evaluate(const BinarySegmentation& u, const GridSignal& f, const EnergyParams& p,
                            Method method) {
    SegmentationResult r;
    const Constants c = optimal_constants(u, f);
    r.u = u;
    r.c1 = c.c1;
    r.c2 = c.c2;
    r.level = c.level();
    r.energy = chan_vese_energy(u, c.c1, c.c2, f, p);
    r.method = method;
    return r;
}

bool better(const SegmentationResult& a, const SegmentationResult& b) {
    const double scale = std::max({1.0, std::abs(a.energy), std::abs(b.energy)});
    if (std::abs(a.energy - b.energy) > 1e-12 * scale) return a.energy < b.energy;
    if (a.u.jump_count() != b.u.jump_count()) return a.u.jump_count() < b.u.jump_count();
    if (a.u.jumps() != b.u.jumps())
        return std::lexicographical_compare(a.u.jumps().begin(), a.u.jumps().end(), b.u.jumps().begin(),
                                            b.u.jumps().end());
    return a.u.first_value() < b.u.first_value();
}

namespace {

// Phase assignments of the intervals cut at `cuts`, enumerated in Gray-code
// order with O(1) updates of the phase-1 sums. Interval 0 is pinned to phase
// 0: a complement has the same energy and jumps but loses the first-value
// tie-break. Candidates whose running energy comes within 1e-9 of the
// incumbent are re-evaluated directly and ranked with `better`.
SegmentationResult enumerate_intervals(const GridSignal& f, const PrefixSums& ps, const EnergyParams& p,
                                       const std::vector<Index>& cuts, Method method) {
    const Index n = f.size();
    const auto m = static_cast<int>(cuts.size());

    std::vector<Index> bounds;
    bounds.reserve(cuts.size() + 2);
    bounds.push_back(0);
    bounds.insert(bounds.end(), cuts.begin(), cuts.end());
    bounds.push_back(n);

    std::vector<double> len(static_cast<std::size_t>(m + 1));
    std::vector<double> sum(len.size());
    std::vector<double> sq(len.size());
    for (std::size_t t = 0; t < len.size(); ++t) {
        len[t] = static_cast<double>(bounds[t + 1] - bounds[t]);
        sum[t] = ps.s1[bounds[t + 1]] - ps.s1[bounds[t]];
        sq[t] = ps.s2[bounds[t + 1]] - ps.s2[bounds[t]];
    }
    const double total_len = static_cast<double>(n);
    const double total_sum = ps.s1[n];
    const double total_sq = ps.s2[n];
    const double weight = p.lambda * f.dx();

    auto residual = [](double cnt, double s, double q) { return cnt > 0.0 ? q - s * s / cnt : 0.0; };

    auto build = [&](std::uint64_t mask) {
        std::vector<Index> jumps;
        for (int t = 1; t <= m; ++t)
            if (((mask >> (t - 1)) & 1U) != ((t >= 2 ? (mask >> (t - 2)) : 0U) & 1U)) jumps.push_back(bounds[t]);
        return evaluate(BinarySegmentation(n, 0, std::move(jumps)), f, p, method);
    };

    SegmentationResult best = build(0);
    std::uint64_t phase = 0;  // bit t-1 holds the phase of interval t
    double cnt1 = 0.0, sum1 = 0.0, sq1 = 0.0;
    long long jumps = 0;
    const std::uint64_t count = std::uint64_t{1} << m;

    auto bit = [&](int t) -> std::uint64_t { return t == 0 ? 0U : (phase >> (t - 1)) & 1U; };

    for (std::uint64_t i = 1; i < count; ++i) {
        const int t = std::countr_zero(i) + 1;  // interval to flip
        const auto ut = static_cast<std::size_t>(t);
        const bool was = bit(t) != 0;
        jumps -= (bit(t - 1) != bit(t)) + (t < m && bit(t + 1) != bit(t));
        phase ^= std::uint64_t{1} << (t - 1);
        jumps += (bit(t - 1) != bit(t)) + (t < m && bit(t + 1) != bit(t));
        const double sign = was ? -1.0 : 1.0;
        cnt1 += sign * len[ut];
        sum1 += sign * sum[ut];
        sq1 += sign * sq[ut];

        const double energy = static_cast<double>(jumps) +
                              weight * (residual(cnt1, sum1, sq1) +
                                        residual(total_len - cnt1, total_sum - sum1, total_sq - sq1));
        if (energy <= best.energy + 1e-9 * std::max(1.0, std::abs(best.energy))) {
            SegmentationResult cand = build(phase);
            if (better(cand, best)) best = std::move(cand);
        }
    }
    best.candidates = static_cast<long long>(count);
    return best;
}

SegmentationResult threshold_start(const GridSignal& f, const EnergyParams& p, double level) {
    const Eigen::VectorXd cells = (f.values().array() > level).cast<double>();
    return evaluate(BinarySegmentation::from_cells(cells), f, p, Method::Dp);
}

// Alternating constants / dp with jumps restricted to one level's crossings.
SegmentationResult level_fallback(const GridSignal& f, const PrefixSums& ps, const EnergyParams& p,
                                  const LevelCandidate& cand, int max_rounds) {
    SegmentationResult cur = threshold_start(f, p, cand.level);
    long long rounds = 0;
    for (; rounds < max_rounds; ++rounds) {
        BinarySegmentation next = dp_fixed_constants(f, ps, p, cur.c1, cur.c2, cand.crossings);
        if (next == cur.u) break;
        SegmentationResult e = evaluate(next, f, p, Method::Dp);
        const double scale = std::max(1.0, std::abs(cur.energy));
        if (!(e.energy < cur.energy - 1e-12 * scale)) {
            if (better(e, cur)) cur = std::move(e);
            ++rounds;
            break;
        }
        cur = std::move(e);
    }
    cur.iterations = rounds;
    return cur;
}

} // namespace

SegmentationResult best_on_level(const GridSignal& f, const EnergyParams& p, const LevelCandidate& cand,
                                 Index cap) {
    p.validate();
    const auto m = static_cast<Index>(cand.crossings.size());
    if (m > cap) throw CapacityError("level too rich: " + std::to_string(m) + " crossings");
    return enumerate_intervals(f, prefix_sums(f), p, cand.crossings, Method::Exact);
}

SegmentationResult solve_exact(const GridSignal& f, const EnergyParams& p, const ExactOptions& opts) {
    p.validate();
    if (opts.levels < 1) throw InvalidInput("levels must be >= 1");
    const PrefixSums ps = prefix_sums(f);
    const std::vector<double> grid = level_grid(f, opts.levels);

    struct LevelOutcome {
        SegmentationResult result;
        bool overflowed = false;
    };
    std::vector<LevelOutcome> outcomes(grid.size());

    auto work = [&](std::size_t i) {
        LevelCandidate cand = level_candidate(f, grid[i]);
        if (static_cast<Index>(cand.crossings.size()) <= opts.cap) {
            outcomes[i].result = enumerate_intervals(f, ps, p, cand.crossings, Method::Exact);
        } else {
            outcomes[i].result = level_fallback(f, ps, p, cand, opts.max_rounds);
            outcomes[i].overflowed = true;
        }
    };

    unsigned threads = opts.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : opts.threads;
    threads = std::min<unsigned>(threads, static_cast<unsigned>(grid.size()));
    if (threads <= 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < grid.size(); i = next++) work(i);
            });
    }

    // sequential reduction in level order keeps the result independent of scheduling
    SegmentationResult best = evaluate(BinarySegmentation::constant(f.size(), 0), f, p, Method::Exact);
    long long candidates = 2;
    long long iterations = 0;
    bool all_overflowed = true;
    for (auto& o : outcomes) {
        candidates += o.result.candidates;
        iterations += o.result.iterations;
        all_overflowed = all_overflowed && o.overflowed;
        if (better(o.result, best)) best = o.result;
    }

    SegmentationResult out = refine_alternating(f, p, best, opts.max_rounds);
    out.method = all_overflowed ? Method::Dp : Method::Exact;
    out.candidates = candidates;
    out.iterations = iterations + out.iterations;
    return out;
}

SegmentationResult solve_piecewise_constant(const GridSignal& f, const EnergyParams& p, double tol, Index cap) {
    p.validate();
    const std::vector<Index> cuts = jump_set(f, tol);
    if (static_cast<Index>(cuts.size()) > cap)
        throw CapacityError("jump set too rich: " + std::to_string(cuts.size()) + " jumps");
    return enumerate_intervals(f, prefix_sums(f), p, cuts, Method::PiecewiseConstant);
}

BinarySegmentation dp_fixed_constants(const GridSignal& f, const EnergyParams& p, double c1, double c2,
                                      const std::vector<Index>& allowed) {
    return dp_fixed_constants(f, prefix_sums(f), p, c1, c2, allowed);
}

BinarySegmentation dp_fixed_constants(const GridSignal& f, const PrefixSums& ps, const EnergyParams& p,
                                      double c1, double c2, const std::vector<Index>& allowed) {
    const Index n = f.size();
    if (ps.size() != n) throw InvalidInput("grid mismatch");
    for (std::size_t i = 0; i < allowed.size(); ++i)
        if (allowed[i] < 1 || allowed[i] > n - 1 || (i > 0 && allowed[i] <= allowed[i - 1]))
            throw InvalidInput("allowed boundaries must be sorted and interior");

    const double weight = p.lambda * f.dx();
    const std::size_t intervals = allowed.size() + 1;
    auto lo = [&](std::size_t t) { return t == 0 ? Index{0} : allowed[t - 1]; };
    auto hi = [&](std::size_t t) { return t + 1 == intervals ? n : allowed[t]; };
    auto cost = [&](std::size_t t, int phase) {
        return weight * segment_fidelity(ps, lo(t), hi(t), phase == 1 ? c1 : c2);
    };

    // from[t][b]: phase of interval t-1 on the best path ending in phase b at t
    std::vector<std::array<int, 2>> from(intervals);
    std::array<double, 2> dist{cost(0, 0), cost(0, 1)};
    for (std::size_t t = 1; t < intervals; ++t) {
        std::array<double, 2> next{};
        for (int b = 0; b < 2; ++b) {
            const double stay = dist[static_cast<std::size_t>(b)];
            const double flip = dist[static_cast<std::size_t>(1 - b)] + 1.0;
            from[t][static_cast<std::size_t>(b)] = flip < stay ? 1 - b : b;
            next[static_cast<std::size_t>(b)] = std::min(stay, flip) + cost(t, b);
        }
        dist = next;
    }

    int phase = dist[1] < dist[0] ? 1 : 0;
    std::vector<Index> jumps;
    for (std::size_t t = intervals - 1; t > 0; --t) {
        const int prev = from[t][static_cast<std::size_t>(phase)];
        if (prev != phase) jumps.push_back(lo(t));
        phase = prev;
    }
    std::reverse(jumps.begin(), jumps.end());
    return {n, phase, std::move(jumps)};
}

SegmentationResult refine_alternating(const GridSignal& f, const EnergyParams& p, SegmentationResult start,
                                      int max_rounds) {
    const PrefixSums ps = prefix_sums(f);
    SegmentationResult cur = evaluate(start.u, f, p, start.method);
    SegmentationResult best = cur;
    bool fixed_point = false;
    long long rounds = 0;
    for (; rounds < max_rounds; ++rounds) {
        BinarySegmentation next = dp_fixed_constants(f, ps, p, cur.c1, cur.c2, crossings(f, cur.level));
        if (next == cur.u) {
            fixed_point = true;
            break;
        }
        SegmentationResult e = evaluate(next, f, p, start.method);
        if (e.energy > cur.energy + 1e-13 * std::max(1.0, std::abs(cur.energy))) break;
        cur = std::move(e);
        if (better(cur, best)) best = cur;
    }
    SegmentationResult out = fixed_point ? cur : best;
    out.candidates = start.candidates;
    out.iterations = start.iterations + rounds;
    return out;
}

SegmentationResult brute_force(const GridSignal& f, const EnergyParams& p) {
    p.validate();
    const Index n = f.size();
    if (n > kBruteForceLimit) throw CapacityError("oracle limit exceeded");
    const std::uint64_t count = std::uint64_t{1} << n;
    Eigen::VectorXd cells(n);
    std::optional<SegmentationResult> best;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        for (Index i = 0; i < n; ++i) cells[i] = static_cast<double>((mask >> i) & 1U);
        SegmentationResult cand = evaluate(BinarySegmentation::from_cells(cells), f, p, Method::Brute);
        if (!best || better(cand, *best)) best = std::move(cand);
    }
    best->candidates = static_cast<long long>(count);
    return *best;
}

} // namespace tvseg
