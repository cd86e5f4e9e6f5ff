#include "tvseg/energy.hpp"

#include "tvseg/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tvseg {

void EnergyParams::validate() const {
    if (!(std::isfinite(lambda) && lambda >= 0.0)) throw InvalidInput("lambda must be finite and >= 0");
    if (!(std::isfinite(epsilon) && epsilon > 0.0)) throw InvalidInput("epsilon must be finite and > 0");
}

BinarySegmentation::BinarySegmentation(Index n, int first_value, std::vector<Index> jumps)
    : n_(n), first_value_(first_value), jumps_(std::move(jumps)) {
    if (n_ < 1) throw InvalidInput("segmentation needs at least one cell");
    if (first_value_ != 0 && first_value_ != 1) throw InvalidInput("first value must be 0 or 1");
    for (std::size_t i = 0; i < jumps_.size(); ++i) {
        if (jumps_[i] < 1 || jumps_[i] > n_ - 1) throw InvalidInput("jump out of range");
        if (i > 0 && jumps_[i] <= jumps_[i - 1]) throw InvalidInput("jumps must be strictly increasing");
    }
}

BinarySegmentation BinarySegmentation::from_cells(const Eigen::Ref<const Eigen::VectorXd>& cells) {
    const Index n = cells.size();
    if (n < 1) throw InvalidInput("segmentation needs at least one cell");
    std::vector<Index> jumps;
    int prev = cells[0] >= 0.5 ? 1 : 0;
    for (Index k = 1; k < n; ++k) {
        const int cur = cells[k] >= 0.5 ? 1 : 0;
        if (cur != prev) jumps.push_back(k);
        prev = cur;
    }
    return {n, cells[0] >= 0.5 ? 1 : 0, std::move(jumps)};
}

int BinarySegmentation::at(Index i) const {
    const auto flips = std::upper_bound(jumps_.begin(), jumps_.end(), i) - jumps_.begin();
    return (first_value_ + static_cast<int>(flips % 2)) % 2;
}

Eigen::VectorXd BinarySegmentation::to_field() const {
    Eigen::VectorXd out(n_);
    int value = first_value_;
    Index start = 0;
    for (const Index k : jumps_) {
        out.segment(start, k - start).setConstant(value);
        value = 1 - value;
        start = k;
    }
    out.segment(start, n_ - start).setConstant(value);
    return out;
}

Eigen::VectorXd smoothed_tv_gradient(const Eigen::Ref<const Eigen::VectorXd>& w, double smoothing) {
    const Index n = w.size();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    if (n < 2) return g;
    const Eigen::ArrayXd d = (w.tail(n - 1) - w.head(n - 1)).array();
    const Eigen::ArrayXd phi = d / (d.square() + smoothing * smoothing).sqrt();
    g.head(n - 1).array() -= phi;
    g.tail(n - 1).array() += phi;
    return g;
}

double compensated_sum(const Eigen::Ref<const Eigen::VectorXd>& x) {
    double sum = 0.0;
    double comp = 0.0;
    for (Index i = 0; i < x.size(); ++i) {
        const double t = sum + x[i];
        if (std::abs(sum) >= std::abs(x[i]))
            comp += (sum - t) + x[i];
        else
            comp += (x[i] - t) + sum;
        sum = t;
    }
    return sum + comp;
}

namespace {

void check_size(Index a, Index b) {
    if (a != b) throw InvalidInput("grid mismatch");
}

bool in_box(const Eigen::Ref<const RelaxedField>& u) {
    return (u.array() >= 0.0).all() && (u.array() <= 1.0).all();
}

// lambda * dx * sum [u (a - f)^2 + (1 - u)(b - f)^2] for per-cell a, b.
template <typename A, typename B>
double fidelity(const Eigen::Ref<const RelaxedField>& u, const A& a, const B& b, const GridSignal& f,
                double lambda) {
    const Eigen::ArrayXd& fv = f.values().array();
    const Eigen::VectorXd terms =
        (u.array() * (a - fv).square() + (1.0 - u.array()) * (b - fv).square()).matrix();
    return lambda * f.dx() * compensated_sum(terms);
}

} // namespace

double chan_vese_energy(const BinarySegmentation& u, double c1, double c2, const GridSignal& f,
                        const EnergyParams& p) {
    check_size(u.size(), f.size());
    if (!(c1 >= 0.0 && c1 <= 1.0 && c2 >= 0.0 && c2 <= 1.0)) throw InvalidInput("constant out of range");
    const Eigen::VectorXd cells = u.to_field();
    return static_cast<double>(u.jump_count()) + fidelity(cells, c1, c2, f, p.lambda);
}

double relaxed_energy(const Eigen::Ref<const RelaxedField>& u, double c1, double c2, const GridSignal& f,
                      const EnergyParams& p) {
    check_size(u.size(), f.size());
    if (!in_box(u)) return std::numeric_limits<double>::infinity();
    return total_variation(u) + fidelity(u, c1, c2, f, p.lambda);
}

double feps_energy(const Eigen::Ref<const RelaxedField>& u, const Eigen::Ref<const RelaxedField>& v1,
                   const Eigen::Ref<const RelaxedField>& v2, const GridSignal& f, const EnergyParams& p) {
    check_size(u.size(), f.size());
    check_size(v1.size(), f.size());
    check_size(v2.size(), f.size());
    if (!in_box(u)) return std::numeric_limits<double>::infinity();
    return total_variation(u) + (total_variation(v1) + total_variation(v2)) / p.epsilon +
           fidelity(u, v1.array(), v2.array(), f, p.lambda);
}

Constants optimal_constants(const Eigen::Ref<const RelaxedField>& u, const GridSignal& f) {
    check_size(u.size(), f.size());
    const Eigen::VectorXd& fv = f.values();
    const double mass1 = compensated_sum(u);
    const double mass0 = compensated_sum((1.0 - u.array()).matrix());
    if (mass1 <= 0.0 || mass0 <= 0.0) {
        const double mean = std::clamp(compensated_sum(fv) / static_cast<double>(f.size()), 0.0, 1.0);
        return {mean, mean};
    }
    const double c1 = compensated_sum(u.cwiseProduct(fv)) / mass1;
    const double c2 = compensated_sum(((1.0 - u.array()) * fv.array()).matrix()) / mass0;
    return {std::clamp(c1, 0.0, 1.0), std::clamp(c2, 0.0, 1.0)};
}

Constants optimal_constants(const BinarySegmentation& u, const GridSignal& f) {
    check_size(u.size(), f.size());
    return optimal_constants(u.to_field(), f);
}

PrefixSums prefix_sums(const GridSignal& f) {
    const Index n = f.size();
    PrefixSums ps{Eigen::VectorXd::Zero(n + 1), Eigen::VectorXd::Zero(n + 1)};
    for (Index k = 0; k < n; ++k) {
        ps.s1[k + 1] = ps.s1[k] + f[k];
        ps.s2[k + 1] = ps.s2[k] + f[k] * f[k];
    }
    return ps;
}

double segment_fidelity(const PrefixSums& ps, Index i, Index j, double c) {
    if (i < 0 || j < i || j > ps.size())
        throw InvalidInput("segment [" + std::to_string(i) + ", " + std::to_string(j) + ") out of range");
    if (i == j) return 0.0;
    const double len = static_cast<double>(j - i);
    const double value = len * c * c - 2.0 * c * (ps.s1[j] - ps.s1[i]) + (ps.s2[j] - ps.s2[i]);
    return std::max(value, 0.0);
}

} // namespace tvseg
