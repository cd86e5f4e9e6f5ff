#include "tvseg/levelset.hpp"

#include <algorithm>
#include <cmath>

namespace tvseg {

std::vector<Index> crossings(const GridSignal& f, double c) {
    std::vector<Index> out;
    for (Index k = 1; k < f.size(); ++k) {
        const double left = f[k - 1];
        const double right = f[k];
        if (left == c && right == c) continue;  // inside a plateau at the level
        if ((left - c) * (right - c) <= 0.0) out.push_back(k);
    }
    return out;
}

std::vector<Index> jump_set(const GridSignal& f, double tol) {
    std::vector<Index> out;
    for (Index k = 1; k < f.size(); ++k)
        if (std::abs(f[k] - f[k - 1]) > tol) out.push_back(k);
    return out;
}

std::vector<double> level_grid(const GridSignal& f, int levels) {
    const double lo = f.values().minCoeff();
    const double hi = f.values().maxCoeff();
    std::vector<double> grid;
    if (lo == hi) return {lo};

    for (int i = 1; i <= levels; ++i)
        grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(levels + 1));

    std::vector<double> unique(f.values().begin(), f.values().end());
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    if (unique.size() <= kExactMidpointLimit) {
        for (std::size_t i = 0; i < unique.size(); ++i) {
            grid.push_back(unique[i]);
            for (std::size_t j = i + 1; j < unique.size(); ++j) grid.push_back(0.5 * (unique[i] + unique[j]));
        }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

} // namespace tvseg
