#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "replidyn/mesh.hpp"

namespace testing {

inline replidyn::GridPtr interval(int n, double length = 1.0) {
    const std::array<double, 1> e{length};
    const std::array<int, 1> c{n};
    return replidyn::build_grid(1, e, c);
}

inline replidyn::GridPtr box(int n0, int n1, double l0 = 1.0, double l1 = 1.0) {
    const std::array<double, 2> e{l0, l1};
    const std::array<int, 2> c{n0, n1};
    return replidyn::build_grid(2, e, c);
}

inline constexpr double pi = std::numbers::pi;

}  // namespace testing
