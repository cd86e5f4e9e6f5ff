#pragma once

#include "tvseg/signal.hpp"

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <vector>

namespace tvseg {

/// Per-cell relaxed field in [0,1]^n (u of the convex relaxation, or v1/v2).
using RelaxedField = Eigen::VectorXd;

struct EnergyParams {
    double lambda = 1.0;   ///< fidelity weight, >= 0
    double epsilon = 0.1;  ///< weight of the constant-field penalty, > 0

    /// epsilon < 1/(4 lambda): the regime where v1, v2 collapse to constants.
    bool eps_small() const { return lambda == 0.0 || epsilon < 1.0 / (4.0 * lambda); }

    /// Throws InvalidInput on lambda < 0, epsilon <= 0 or non-finite values.
    void validate() const;
};

/// A {0,1}-valued piecewise-constant function on the n-cell grid, stored as
/// its value on cell 0 plus the boundaries where it flips.
class BinarySegmentation {
public:
    BinarySegmentation() = default;
    /// Throws InvalidInput unless jumps are strictly increasing in [1, n-1].
    BinarySegmentation(Index n, int first_value, std::vector<Index> jumps);

    static BinarySegmentation constant(Index n, int value) { return {n, value, {}}; }
    /// Builds from per-cell values; anything >= 0.5 counts as 1.
    static BinarySegmentation from_cells(const Eigen::Ref<const Eigen::VectorXd>& cells);

    Index size() const { return n_; }
    int first_value() const { return first_value_; }
    const std::vector<Index>& jumps() const { return jumps_; }
    Index jump_count() const { return static_cast<Index>(jumps_.size()); }
    bool is_constant() const { return jumps_.empty(); }

    /// Value on cell i.
    int at(Index i) const;
    Eigen::VectorXd to_field() const;
    BinarySegmentation complement() const { return {n_, 1 - first_value_, jumps_}; }

    friend bool operator==(const BinarySegmentation&, const BinarySegmentation&) = default;

private:
    Index n_ = 1;
    int first_value_ = 0;
    std::vector<Index> jumps_;
};

/// Phase constants (c1 on {u=1}, c2 on {u=0}).
struct Constants {
    double c1 = 0.0;
    double c2 = 0.0;
    double level() const { return 0.5 * (c1 + c2); }
};

/// Sum of |w[i+1] - w[i]|: the total variation of a grid function on (0,1),
/// with no contribution from the domain endpoints.
template <typename Derived>
typename Derived::Scalar total_variation(const Eigen::MatrixBase<Derived>& w) {
    using Scalar = typename Derived::Scalar;
    const Index n = w.size();
    if (n < 2) return Scalar(0);
    return (w.tail(n - 1) - w.head(n - 1)).cwiseAbs().sum();
}

/// Smoothed total variation sum sqrt((w[i+1]-w[i])^2 + s^2).
template <typename Derived>
typename Derived::Scalar smoothed_total_variation(const Eigen::MatrixBase<Derived>& w,
                                                  typename Derived::Scalar smoothing) {
    using Scalar = typename Derived::Scalar;
    const Index n = w.size();
    if (n < 2) return Scalar(0);
    const auto d = (w.tail(n - 1) - w.head(n - 1)).array();
    return (d.square() + smoothing * smoothing).sqrt().sum();
}

/// Gradient of smoothed_total_variation with respect to w.
Eigen::VectorXd smoothed_tv_gradient(const Eigen::Ref<const Eigen::VectorXd>& w, double smoothing);

/// Neumaier-compensated sum.
double compensated_sum(const Eigen::Ref<const Eigen::VectorXd>& x);

/// Binary Chan-Vese energy: jump count + lambda * dx * sum of phase residuals.
/// Throws InvalidInput("grid mismatch") or InvalidInput("constant out of range").
double chan_vese_energy(const BinarySegmentation& u, double c1, double c2, const GridSignal& f,
                        const EnergyParams& p);

/// Convex relaxation with u in [0,1]^n; +inf when some u_i leaves [0,1].
double relaxed_energy(const Eigen::Ref<const RelaxedField>& u, double c1, double c2,
                      const GridSignal& f, const EnergyParams& p);

/// Augmented functional where c1, c2 become fields v1, v2 whose variation is
/// charged at 1/epsilon. +inf when some u_i leaves [0,1].
double feps_energy(const Eigen::Ref<const RelaxedField>& u, const Eigen::Ref<const RelaxedField>& v1,
                   const Eigen::Ref<const RelaxedField>& v2, const GridSignal& f,
                   const EnergyParams& p);

/// Weighted phase means. If a phase has zero mass both constants fall back to
/// mean(f). Results are clamped to [0,1].
Constants optimal_constants(const Eigen::Ref<const RelaxedField>& u, const GridSignal& f);
Constants optimal_constants(const BinarySegmentation& u, const GridSignal& f);

/// Truncation onto [0,1], applied entrywise.
inline double truncate_unit(double t) { return t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t); }

/// Cumulative sums of f and f^2 with a leading zero.
struct PrefixSums {
    Eigen::VectorXd s1;
    Eigen::VectorXd s2;
    Index size() const { return s1.size() - 1; }
};

PrefixSums prefix_sums(const GridSignal& f);

/// sum_{k in [i,j)} (c - f_k)^2 in O(1). Throws InvalidInput when the range is invalid.
double segment_fidelity(const PrefixSums& ps, Index i, Index j, double c);

} // namespace tvseg
