#pragma once

// Closed-form Chan-Vese energies on Omega = [-1,1]^2 with f the indicator of
// the centred unit square E = [-1/2,1/2]^2.
//
//   u = 1 on Omega, c1 = mean f = 1/4: no perimeter, fidelity
//       lambda * (1 * (3/4)^2 + 3 * (1/4)^2) = 3 lambda / 4.
//   u = indicator of E, c1 = 1, c2 = 0: perimeter 4, fidelity 0.
//   u = indicator of E_delta (E with corners replaced by quarter circles of
//       radius delta): with A = (4 - pi) delta^2 the cut-off corner area,
//       perimeter 4 (1 - 2 delta) + 2 pi delta, c1 = 1, c2 = A / (3 + A),
//       fidelity lambda * (A (1 - c2)^2 + 3 c2^2) = lambda * 3A / (3 + A).
//
// E_delta beats E exactly when 3 delta / (3 + (4 - pi) delta^2) < 2 / lambda.

#include "tvseg/error.hpp"

#include <numbers>

namespace tvseg::square {

template <typename Scalar>
Scalar full_square_energy(const Scalar& lambda) {
    const Scalar c1 = Scalar(1) / Scalar(4);
    const Scalar inside = (Scalar(1) - c1) * (Scalar(1) - c1);  // area 1, f = 1
    const Scalar outside = Scalar(3) * c1 * c1;                 // area 3, f = 0
    return lambda * (inside + outside);
}

template <typename Scalar = double>
Scalar inner_square_energy() {
    return Scalar(4);
}

struct Scenario {
    double lambda = 1.0;
    double delta = 0.05;
    void validate() const {
        if (!(delta > 0.0 && delta < 0.5)) throw InvalidInput("invalid radius");
        if (!(lambda > 0.0)) throw InvalidInput("invalid lambda");
    }
};

inline double corner_area(double delta) { return (4.0 - std::numbers::pi) * delta * delta; }

inline double rounded_square_c2(double delta) {
    const double area = corner_area(delta);
    return area / (3.0 + area);
}

inline double rounded_square_perimeter(double delta) {
    return 4.0 * (1.0 - 2.0 * delta) + 2.0 * std::numbers::pi * delta;
}

inline double rounded_square_energy(const Scenario& s) {
    s.validate();
    const double area = corner_area(s.delta);
    return rounded_square_perimeter(s.delta) + s.lambda * 3.0 * area / (3.0 + area);
}

inline bool improvement_holds(const Scenario& s) {
    s.validate();
    return 3.0 * s.delta / (3.0 + (4.0 - std::numbers::pi) * s.delta * s.delta) < 2.0 / s.lambda;
}

} // namespace tvseg::square
