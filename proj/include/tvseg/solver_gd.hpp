#pragma once

#include "tvseg/energy.hpp"
#include "tvseg/solver_exact.hpp"

#include <cstdint>
#include <vector>

namespace tvseg {

struct GdOptions {
    int max_outer = 50;
    int max_inner = 200;
    double base_rate = 0.1;
    double smoothing = 1e-3;
    std::uint64_t seed = 0;  ///< only used when init_jitter > 0
    double tol = 1e-10;
    double init_jitter = 0.0;  ///< uniform perturbation of the initial u, clipped to [0,1]

    void validate() const;
};

/// Relaxed energy with the TV term replaced by smoothed_total_variation.
double smoothed_relaxed_energy(const Eigen::Ref<const RelaxedField>& u, double c1, double c2,
                               const GridSignal& f, const EnergyParams& p, double smoothing);

/// Analytic gradient of smoothed_relaxed_energy with respect to u.
Eigen::VectorXd smoothed_relaxed_gradient(const Eigen::Ref<const RelaxedField>& u, double c1, double c2,
                                          const GridSignal& f, const EnergyParams& p, double smoothing);

struct GdRun {
    SegmentationResult result;
    RelaxedField relaxed;             ///< best relaxed iterate before thresholding
    std::vector<double> best_trace;   ///< best-so-far relaxed energy after each outer round
    bool stayed_in_box = true;        ///< every iterate had finite relaxed energy
};

/// Alternating scheme: optimal constants, then ADAGRAD on the smoothed relaxed
/// energy projected onto [0,1]^n. The best relaxed iterate is thresholded at 0.5.
GdRun solve_gd_traced(const GridSignal& f, const EnergyParams& p, const GdOptions& opts = {});
inline SegmentationResult solve_gd(const GridSignal& f, const EnergyParams& p, const GdOptions& opts = {}) {
    return solve_gd_traced(f, p, opts).result;
}

struct FepsTriple {
    RelaxedField u;
    RelaxedField v1;
    RelaxedField v2;
    double energy = 0.0;  ///< feps_energy of the triple (exact TV)
};

/// Exact minimizer over [0,1]^n of TV(u) + sum_i u_i cost_i. The problem has a
/// binary solution, found by a two-state shortest path. Ties keep the phase,
/// then prefer 0.
BinarySegmentation binary_prox(const Eigen::Ref<const Eigen::VectorXd>& cost);

/// Exact minimizer over [0,1]^n of kappa * TV(v) + sum_i w_i (v_i - y_i)^2
/// with w_i >= 0, by forward message passing on the piecewise-linear
/// derivative and a clipped backward pass. Picks the smallest minimizer when
/// the objective is flat. O(n^2) worst case.
Eigen::VectorXd weighted_tv_denoise(const Eigen::Ref<const Eigen::VectorXd>& y,
                                    const Eigen::Ref<const Eigen::VectorXd>& w, double kappa);

/// Block-coordinate descent on the discretized augmented functional. Each
/// block is minimized exactly: u by binary_prox, v1 and v2 by
/// weighted_tv_denoise with weight 1/epsilon. Stops at a fixed point, when the
/// decrease falls below opts.tol, or after opts.max_outer rounds. Only
/// max_outer and tol are read from opts.
FepsTriple minimize_feps(const GridSignal& f, const EnergyParams& p, FepsTriple start, const GdOptions& opts = {});
/// Starts from the median threshold of f and constant phase means.
FepsTriple minimize_feps(const GridSignal& f, const EnergyParams& p, const GdOptions& opts = {});

} // namespace tvseg
