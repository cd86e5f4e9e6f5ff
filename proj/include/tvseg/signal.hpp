#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <string_view>

namespace tvseg {

using Index = Eigen::Index;

/// A signal on (0,1) sampled as one value per cell of a uniform n-cell grid.
/// Cell i covers [i/n, (i+1)/n); boundary k sits between cells k-1 and k.
class GridSignal {
public:
    GridSignal() = default;
    /// Throws InvalidInput if `values` is empty or holds a non-finite entry.
    explicit GridSignal(Eigen::VectorXd values);

    Index size() const { return values_.size(); }
    double dx() const { return 1.0 / static_cast<double>(values_.size()); }
    const Eigen::VectorXd& values() const { return values_; }
    double operator[](Index i) const { return values_[i]; }

    bool in_unit_range() const;

    friend bool operator==(const GridSignal& a, const GridSignal& b) {
        return a.values_.size() == b.values_.size() && a.values_ == b.values_;
    }

private:
    Eigen::VectorXd values_;
};

struct GeneratorSpec {
    enum class Kind { PiecewiseConstant, Weierstrass };

    Kind kind = Kind::PiecewiseConstant;
    std::uint64_t seed = 0;

    // piecewise-constant
    int segments = 2;
    double lo = 0.0;
    double hi = 1.0;

    // weierstrass-type: partial sum of a^k cos(b^k pi x), k < terms
    double a = 0.5;
    int b = 3;
    int terms = 8;
};

GridSignal from_csv(std::string_view text);
std::string to_csv(const GridSignal& f);

GridSignal from_json(std::string_view text);
std::string to_json(const GridSignal& f);

/// Affine map of the values onto [0,1]; a constant signal becomes 0.5.
GridSignal normalize_to_unit(const GridSignal& f);

/// Deterministic synthetic signal with values in [0,1].
GridSignal generate(const GeneratorSpec& spec, Index n);

/// Parses "pwc:5:seed=7[:lo=..][:hi=..]" or
/// "weierstrass:a=0.5:b=3:terms=8[:seed=..]".
GeneratorSpec parse_generator_spec(std::string_view text);

/// FNV-1a 64 over the little-endian IEEE-754 bytes of the values, as 16 hex digits.
std::string signal_digest(const GridSignal& f);

} // namespace tvseg
