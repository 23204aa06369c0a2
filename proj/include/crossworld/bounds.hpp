#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "crossworld/errors.hpp"
#include "crossworld/gformula.hpp"

namespace crossworld {

// The five observable quantities feeding the nonparametric NDE bounds
// (all-binary case): P(M=m|A=0), E{Y|A=1,M=m}, E{Y|A=0}.
struct BoundsInput {
    double p_m0_a0 = 0.0;
    double p_m1_a0 = 0.0;
    double ey_a1_m0 = 0.0;
    double ey_a1_m1 = 0.0;
    double ey_a0 = 0.0;
};

// Assumption-free bounds on the NDE (a=1 vs a'=0) for all-binary data.
// informative: the interval excludes some of [-1, 1].
struct NdeBounds {
    double lower = -1.0;
    double upper = 1.0;
    bool informative = false;
    bool contains_zero = true;
};

inline NdeBounds compute_nde_bounds(const BoundsInput& in) {
    auto check01 = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw InvalidInput(std::string("compute_nde_bounds: ") + name +
                               " must lie in [0,1], got " + std::to_string(v));
        }
    };
    check01(in.p_m0_a0, "p_m0_a0");
    check01(in.p_m1_a0, "p_m1_a0");
    check01(in.ey_a1_m0, "ey_a1_m0");
    check01(in.ey_a1_m1, "ey_a1_m1");
    check01(in.ey_a0, "ey_a0");
    if (std::fabs(in.p_m0_a0 + in.p_m1_a0 - 1.0) > 1e-9) {
        throw InvalidInput("compute_nde_bounds: p_m0_a0 + p_m1_a0 must equal 1");
    }

    NdeBounds b;
    b.lower = std::max(0.0, in.p_m0_a0 + in.ey_a1_m0 - 1.0) +
              std::max(0.0, in.p_m1_a0 + in.ey_a1_m1 - 1.0) - in.ey_a0;
    b.upper = std::min(in.p_m0_a0, in.ey_a1_m0) + std::min(in.p_m1_a0, in.ey_a1_m1) - in.ey_a0;
    // In exact arithmetic lower <= upper always holds; rounding can flip
    // degenerate (point-width) intervals by ~1 ulp, so collapse them.
    b.lower = std::min(b.lower, b.upper);
    b.informative = (b.lower > -1.0) || (b.upper < 1.0);
    b.contains_zero = (b.lower <= 0.0) && (0.0 <= b.upper);
    return b;
}

// Plug-in bounds from observed data: requires a binary outcome, the two
// (A=1, M=m) cells, and a non-empty A=0 arm.
inline NdeBounds bounds_from_data(const ObservedDataset& data) {
    for (const ObservedRow& row : data) {
        if (row.y != 0.0 && row.y != 1.0) {
            throw NotBinaryOutcome("bounds_from_data: outcome values must be 0 or 1");
        }
    }
    const CellStats cells = cell_statistics(data);
    if (cells.arm_count(0) == 0 || cells.counts[1][0] == 0 || cells.counts[1][1] == 0) {
        throw PositivityViolation(
            "bounds_from_data: need a non-empty A=0 arm and both (A=1, M=m) cells");
    }
    BoundsInput in;
    in.p_m1_a0 = cells.p_m1_given_a[0];
    in.p_m0_a0 = 1.0 - in.p_m1_a0;
    in.ey_a1_m0 = cells.mean_y[1][0];
    in.ey_a1_m1 = cells.mean_y[1][1];
    in.ey_a0 = cells.mean_y_given_a[0];
    return compute_nde_bounds(in);
}

} // namespace crossworld
