#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "crossworld/errors.hpp"
#include "crossworld/model.hpp"

namespace crossworld {

// The sufficient statistics of an observed (A, M, Y) dataset for the
// mediational g-formula and the NDE bounds: cell counts, per-cell outcome
// means, mediator frequencies per arm, and per-arm outcome means. Empty cells
// are carried as NaN means plus a flag; downstream estimators turn the flag
// into a hard error.
struct CellStats {
    std::uint64_t counts[2][2] = {{0, 0}, {0, 0}};
    double mean_y[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    double p_m1_given_a[2] = {0.0, 0.0};
    double mean_y_given_a[2] = {0.0, 0.0};
    std::uint64_t n = 0;

    std::uint64_t arm_count(int a) const { return counts[a][0] + counts[a][1]; }

    bool has_empty_cell() const {
        return counts[0][0] == 0 || counts[0][1] == 0 || counts[1][0] == 0 || counts[1][1] == 0;
    }
};

inline CellStats cell_statistics(const ObservedDataset& data) {
    if (data.empty()) {
        throw DataError("cell_statistics: dataset is empty");
    }
    CellStats s;
    double sum_y[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (const ObservedRow& row : data) {
        if ((row.a != 0 && row.a != 1) || (row.m != 0 && row.m != 1)) {
            throw DataError("cell_statistics: A and M must be 0 or 1");
        }
        ++s.counts[row.a][row.m];
        sum_y[row.a][row.m] += row.y;
    }
    s.n = data.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int a = 0; a < 2; ++a) {
        for (int m = 0; m < 2; ++m) {
            s.mean_y[a][m] =
                s.counts[a][m] ? sum_y[a][m] / static_cast<double>(s.counts[a][m]) : nan;
        }
        const std::uint64_t na = s.arm_count(a);
        s.p_m1_given_a[a] = na ? static_cast<double>(s.counts[a][1]) / static_cast<double>(na) : nan;
        s.mean_y_given_a[a] = na ? (sum_y[a][0] + sum_y[a][1]) / static_cast<double>(na) : nan;
    }
    return s;
}

// Plug-in mediational g-formula for the a=1 vs a'=0 contrast:
//
//   E-hat{Y(1,M(0))} = sum_m E{Y|A=1,M=m} P(M=m|A=0)
//   NDE-hat = E-hat{Y(1,M(0))} - E-hat{Y(0,M(0))}
//   NIE-hat = E-hat{Y(1,M(1))} - E-hat{Y(1,M(0))}
//
// and te = nde + nie from the same three standardized means, so the
// decomposition is exact. Requires all four (A,M) cells to be populated.
inline EffectEstimates estimate_gformula(const CellStats& cells) {
    if (cells.n == 0) {
        throw DataError("estimate_gformula: dataset is empty");
    }
    if (cells.has_empty_cell()) {
        std::string which;
        for (int a = 0; a < 2; ++a) {
            for (int m = 0; m < 2; ++m) {
                if (cells.counts[a][m] == 0) {
                    which += " (A=" + std::to_string(a) + ",M=" + std::to_string(m) + ")";
                }
            }
        }
        throw PositivityViolation("estimate_gformula: empty cell(s):" + which);
    }
    const double p_m1_a0 = cells.p_m1_given_a[0];
    const double p_m1_a1 = cells.p_m1_given_a[1];
    const double ey_nested =
        cells.mean_y[1][0] * (1.0 - p_m1_a0) + cells.mean_y[1][1] * p_m1_a0;
    const double ey00 = cells.mean_y[0][0] * (1.0 - p_m1_a0) + cells.mean_y[0][1] * p_m1_a0;
    const double ey11 = cells.mean_y[1][0] * (1.0 - p_m1_a1) + cells.mean_y[1][1] * p_m1_a1;

    EffectEstimates est;
    est.ey_nested = ey_nested;
    est.nde = ey_nested - ey00;
    est.nie = ey11 - ey_nested;
    est.te = est.nde + est.nie;
    est.method = EffectMethod::g_formula;
    est.n_or_nodes = static_cast<std::int64_t>(cells.n);
    return est;
}

inline EffectEstimates estimate_gformula(const ObservedDataset& data) {
    return estimate_gformula(cell_statistics(data));
}

} // namespace crossworld
