#pragma once

#include "tvseg/signal.hpp"

#include <vector>

namespace tvseg {

/// Boundaries where f meets `level` in the multivalued sense.
struct LevelCandidate {
    double level = 0.0;
    std::vector<Index> crossings;
};

/// Interior boundaries k (1 <= k <= n-1) with (f[k-1]-c)(f[k]-c) <= 0,
/// except boundaries strictly inside a run of cells equal to c.
std::vector<Index> crossings(const GridSignal& f, double c);

inline LevelCandidate level_candidate(const GridSignal& f, double c) { return {c, crossings(f, c)}; }

/// Interior boundaries with |f[k] - f[k-1]| > tol.
std::vector<Index> jump_set(const GridSignal& f, double tol = 0.0);

/// Unique values at or below this count get exact pairwise midpoints in level_grid.
inline constexpr std::size_t kExactMidpointLimit = 64;

/// Sorted, deduplicated levels: `levels` equispaced values strictly inside
/// [min f, max f], plus (when f has at most kExactMidpointLimit distinct
/// values) every distinct value and every pairwise midpoint of distinct values.
std::vector<double> level_grid(const GridSignal& f, int levels);

} // namespace tvseg
