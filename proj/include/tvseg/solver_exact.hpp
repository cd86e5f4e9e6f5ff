#pragma once

#include "tvseg/energy.hpp"
#include "tvseg/levelset.hpp"

#include <string>
#include <string_view>

namespace tvseg {

enum class Method { Exact, PiecewiseConstant, Dp, Gd, Brute };

std::string_view to_string(Method m);
/// Accepts exact|pwc|dp|gd|brute. Throws InvalidInput otherwise.
Method parse_method(std::string_view name);

struct SegmentationResult {
    BinarySegmentation u;
    double c1 = 0.0;
    double c2 = 0.0;
    double energy = 0.0;
    double level = 0.0;  ///< (c1 + c2) / 2
    Method method = Method::Exact;
    long long candidates = 0;  ///< binary candidates evaluated
    long long iterations = 0;  ///< refinement / descent rounds
    double relaxed_energy = 0.0;  ///< pre-threshold energy (gd only)
};

/// Fills constants, level and energy of a binary candidate.
SegmentationResult evaluate(const BinarySegmentation& u, const GridSignal& f, const EnergyParams& p,
                            Method method);

/// Deterministic total order: lower energy (1e-12 relative tolerance), fewer
/// jumps, lexicographically smaller jumps, smaller first value.
bool better(const SegmentationResult& a, const SegmentationResult& b);

/// Maximum crossings per level enumerated exhaustively (2^cap assignments).
inline constexpr Index kEnumerationCap = 20;

/// Exhaustive search over the 2^(m+1) phase assignments of the m+1 intervals
/// cut by `cand.crossings`. Throws CapacityError("level too rich: m crossings").
SegmentationResult best_on_level(const GridSignal& f, const EnergyParams& p, const LevelCandidate& cand,
                                 Index cap = kEnumerationCap);

struct ExactOptions {
    int levels = 256;
    Index cap = kEnumerationCap;
    unsigned threads = 0;  ///< 0: hardware concurrency
    int max_rounds = 100;  ///< alternating refinement budget
};

/// Level-set search: best_on_level over level_grid(f, levels), with an
/// alternating dp fallback for levels above the cap, followed by
/// alternating refinement of the winner.
SegmentationResult solve_exact(const GridSignal& f, const EnergyParams& p, const ExactOptions& opts);
inline SegmentationResult solve_exact(const GridSignal& f, const EnergyParams& p, int levels = 256) {
    ExactOptions opts;
    opts.levels = levels;
    return solve_exact(f, p, opts);
}

/// Exhaustive search over phase assignments of the constancy intervals of f
/// (jumps restricted to jump_set(f, tol)). Throws CapacityError("jump set too rich").
SegmentationResult solve_piecewise_constant(const GridSignal& f, const EnergyParams& p, double tol = 0.0,
                                            Index cap = kEnumerationCap);

/// Exact minimizer of chan_vese_energy(., c1, c2) among binary u whose jumps
/// lie in `allowed`, by a two-state shortest path over the intervals.
BinarySegmentation dp_fixed_constants(const GridSignal& f, const EnergyParams& p, double c1, double c2,
                                      const std::vector<Index>& allowed);
BinarySegmentation dp_fixed_constants(const GridSignal& f, const PrefixSums& ps, const EnergyParams& p,
                                      double c1, double c2, const std::vector<Index>& allowed);

/// Alternates optimal constants and dp_fixed_constants restricted to the
/// crossings of the current level (c1+c2)/2, until a fixed point, no
/// decrease, or `max_rounds`. Never increases the energy.
SegmentationResult refine_alternating(const GridSignal& f, const EnergyParams& p, SegmentationResult start,
                                      int max_rounds = 100);

/// Largest n accepted by brute_force.
inline constexpr Index kBruteForceLimit = 16;

/// All 2^n per-cell assignments. Throws CapacityError("oracle limit exceeded").
SegmentationResult brute_force(const GridSignal& f, const EnergyParams& p);

} // namespace tvseg
