#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "crossworld/errors.hpp"
#include "crossworld/model.hpp"

namespace crossworld {

// Linear structural equation model with independent errors over (A, L, M, Y),
// where L is an observed intermediate variable:
//
//   L = l0 + alpha_A A + eps_L
//   M = m0 + beta_A A + beta_L L + eps_M
//   Y = y0 + theta_A A + theta_L L + theta_M M + eps_Y
struct LsemCoefficients {
    double alpha_A = 0.0;
    double beta_A = 0.0;
    double beta_L = 0.0;
    double theta_A = 0.0;
    double theta_L = 0.0;
    double theta_M = 0.0;
    double intercept_l = 0.0;
    double intercept_m = 0.0;
    double intercept_y = 0.0;
};

struct LsemRow {
    double a = 0.0;
    double l = 0.0;
    double m = 0.0;
    double y = 0.0;
};

using LsemDataset = std::vector<LsemRow>;

namespace detail {

// Solves the k x k normal equations by Gaussian elimination with partial
// pivoting; the designs here have at most 4 columns. Throws RankDeficient on
// (numerically) singular systems.
template <std::size_t K>
std::array<double, K> solve_normal_equations(std::array<std::array<double, K>, K> xtx,
                                             std::array<double, K> xty) {
    double scale = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
        scale = std::max(scale, std::fabs(xtx[i][i]));
    }
    const double tol = 1e-10 * std::max(scale, 1.0);
    std::array<std::size_t, K> perm;
    for (std::size_t i = 0; i < K; ++i) {
        perm[i] = i;
    }
    for (std::size_t col = 0; col < K; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < K; ++r) {
            if (std::fabs(xtx[r][col]) > std::fabs(xtx[pivot][col])) {
                pivot = r;
            }
        }
        if (std::fabs(xtx[pivot][col]) <= tol) {
            throw RankDeficient("least squares: design matrix is rank deficient");
        }
        std::swap(xtx[col], xtx[pivot]);
        std::swap(xty[col], xty[pivot]);
        for (std::size_t r = col + 1; r < K; ++r) {
            const double f = xtx[r][col] / xtx[col][col];
            for (std::size_t c = col; c < K; ++c) {
                xtx[r][c] -= f * xtx[col][c];
            }
            xty[r] -= f * xty[col];
        }
    }
    std::array<double, K> beta{};
    for (std::size_t i = K; i-- > 0;) {
        double v = xty[i];
        for (std::size_t c = i + 1; c < K; ++c) {
            v -= xtx[i][c] * beta[c];
        }
        beta[i] = v / xtx[i][i];
    }
    return beta;
}

// OLS of y on an intercept plus the first `k-1` entries of each row's
// regressor list.
template <std::size_t K>
std::array<double, K> ols(const LsemDataset& data,
                          std::array<double, K - 1> (*regressors)(const LsemRow&),
                          double (*response)(const LsemRow&)) {
    std::array<std::array<double, K>, K> xtx{};
    std::array<double, K> xty{};
    for (const LsemRow& row : data) {
        std::array<double, K> x{};
        x[0] = 1.0;
        const auto r = regressors(row);
        for (std::size_t j = 0; j + 1 < K; ++j) {
            x[j + 1] = r[j];
        }
        const double y = response(row);
        for (std::size_t i = 0; i < K; ++i) {
            for (std::size_t j = 0; j < K; ++j) {
                xtx[i][j] += x[i] * x[j];
            }
            xty[i] += x[i] * y;
        }
    }
    return solve_normal_equations<K>(xtx, xty);
}

} // namespace detail

// Fits the three regressions L ~ A, M ~ A + L, Y ~ A + L + M by ordinary
// least squares via closed-form normal equations.
inline LsemCoefficients fit_lsem(const LsemDataset& data) {
    if (data.empty()) {
        throw DataError("fit_lsem: dataset is empty");
    }
    bool has_a0 = false, has_a1 = false;
    for (const LsemRow& row : data) {
        if (row.a != 0.0 && row.a != 1.0) {
            throw DataError("fit_lsem: treatment values must be 0 or 1");
        }
        (row.a == 0.0 ? has_a0 : has_a1) = true;
    }
    if (!has_a0 || !has_a1) {
        throw RankDeficient("fit_lsem: both treatment arms must be present");
    }

    const auto l_fit = detail::ols<2>(
        data, +[](const LsemRow& r) { return std::array<double, 1>{r.a}; },
        +[](const LsemRow& r) { return r.l; });
    const auto m_fit = detail::ols<3>(
        data, +[](const LsemRow& r) { return std::array<double, 2>{r.a, r.l}; },
        +[](const LsemRow& r) { return r.m; });
    const auto y_fit = detail::ols<4>(
        data, +[](const LsemRow& r) { return std::array<double, 3>{r.a, r.l, r.m}; },
        +[](const LsemRow& r) { return r.y; });

    LsemCoefficients c;
    c.intercept_l = l_fit[0];
    c.alpha_A = l_fit[1];
    c.intercept_m = m_fit[0];
    c.beta_A = m_fit[1];
    c.beta_L = m_fit[2];
    c.intercept_y = y_fit[0];
    c.theta_A = y_fit[1];
    c.theta_L = y_fit[2];
    c.theta_M = y_fit[3];
    return c;
}

// Effects identified by the LSEM under intermediate confounding. Expanding
// Y(a, M(a')) through the three equations gives
//
//   NDE = (theta_A + theta_L alpha_A) (a - a')
//   NIE = (theta_M beta_A + theta_M beta_L alpha_A) (a - a')
//
// (pathways through L belong to both terms by design).
inline EffectEstimates lsem_effects(const LsemCoefficients& c, double a, double a_prime) {
    for (double v : {c.alpha_A, c.beta_A, c.beta_L, c.theta_A, c.theta_L, c.theta_M,
                     c.intercept_l, c.intercept_m, c.intercept_y, a, a_prime}) {
        if (!std::isfinite(v)) {
            throw InvalidInput("lsem_effects: coefficients and contrast must be finite");
        }
    }
    const double d = a - a_prime;
    EffectEstimates est;
    est.nde = (c.theta_A + c.theta_L * c.alpha_A) * d;
    est.nie = (c.theta_M * c.beta_A + c.theta_M * c.beta_L * c.alpha_A) * d;
    est.te = est.nde + est.nie;
    // E{Y(a, M(a'))} with zero-mean errors.
    const double mean_l_a = c.intercept_l + c.alpha_A * a;
    const double mean_l_ap = c.intercept_l + c.alpha_A * a_prime;
    const double mean_m_ap = c.intercept_m + c.beta_A * a_prime + c.beta_L * mean_l_ap;
    est.ey_nested = c.intercept_y + c.theta_A * a + c.theta_L * mean_l_a + c.theta_M * mean_m_ap;
    est.method = EffectMethod::lsem;
    est.n_or_nodes = 0;
    return est;
}

} // namespace crossworld
