#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "crossworld/errors.hpp"
#include "crossworld/model.hpp"

namespace crossworld {

// One association diagnostic: a statistic expected to be zero when the probed
// independence holds, with a Monte Carlo standard error for thresholding.
// fails(k) is true when |stat| exceeds k standard errors.
struct AssocStat {
    double stat = 0.0;
    double se = 0.0;
    std::uint64_t n = 0;

    bool fails(double k) const { return se > 0.0 && std::fabs(stat) > k * se; }
};

// Diagnostics computed on simulated counterfactual tables. These probe
// conditions that are unverifiable from factual data — they exist to show,
// on data whose generating mechanism is known, which assumptions hold:
//
//   cw_assoc[m]        association of Y(1,m) with M(0)      (cross-world independence)
//   sw_assoc           the single-world conditions:
//                        M(a) independent of A, Y(a,m) independent of A,
//                        Y(a,m) independent of M(a) given A=a
//   b_variation        mean |(Y(1,1)-Y(0,1)) - (Y(1,0)-Y(0,0))|
//                      (no individual-level additive interaction)
//   de_assump_gap[m]   E{Y(1,m)-Y(0,m) | M(0)=m} - E{Y(1,m)-Y(0,m)}
//                      (the direct-effect assumption)
struct AuditReport {
    std::array<AssocStat, 2> cw_assoc;
    std::map<std::string, AssocStat> sw_assoc;
    double b_variation = 0.0;
    std::array<AssocStat, 2> de_assump_gap;
    std::uint64_t n = 0;
    double threshold = 5.0;
    std::map<std::string, bool> flags; // true = violation detected at the threshold
};

// Which structural features a scenario has, and the estimation strategy that
// follows from them.
struct ScenarioFlags {
    bool has_intermediate_confounder = false; // treatment-affected M-Y confounder L
    bool has_crossworld_confounder = false;   // latent U linking M(0) and Y(1,m)
    bool lsem_assumed = false;
    bool all_binary = false;
};

enum class IdStrategy { point_nonparametric, point_lsem, bounds_only, none };

inline const char* id_strategy_name(IdStrategy s) {
    switch (s) {
        case IdStrategy::point_nonparametric: return "point_nonparametric";
        case IdStrategy::point_lsem: return "point_lsem";
        case IdStrategy::bounds_only: return "bounds_only";
        case IdStrategy::none: return "none";
    }
    return "unknown";
}

inline IdStrategy classify_identification(const ScenarioFlags& f) {
    const bool confounded = f.has_intermediate_confounder || f.has_crossworld_confounder;
    if (!confounded) {
        return IdStrategy::point_nonparametric;
    }
    if (f.lsem_assumed) {
        return IdStrategy::point_lsem;
    }
    return f.all_binary ? IdStrategy::bounds_only : IdStrategy::none;
}

namespace detail {

// Difference of conditional means of `value` across the two levels of a
// binary grouping variable, with a two-sample standard error. Returns a zero
// statistic when either group is empty (no association measurable).
template <typename ValueFn, typename GroupFn>
AssocStat mean_difference(const std::vector<CounterfactualUnit>& units, ValueFn&& value,
                          GroupFn&& group) {
    double s[2] = {0.0, 0.0}, s2[2] = {0.0, 0.0};
    std::uint64_t n[2] = {0, 0};
    double vmin = value(units.front()), vmax = vmin;
    for (const CounterfactualUnit& u : units) {
        const int g = group(u) ? 1 : 0;
        const double v = value(u);
        s[g] += v;
        s2[g] += v * v;
        ++n[g];
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    AssocStat a;
    a.n = n[0] + n[1];
    // A constant value column means no measurable association; return an
    // exact zero rather than the rounding residue of two group means.
    if (n[0] == 0 || n[1] == 0 || vmin == vmax) {
        return a;
    }
    double var[2];
    for (int g = 0; g < 2; ++g) {
        const double mean = s[g] / static_cast<double>(n[g]);
        var[g] = n[g] > 1
                     ? std::max(0.0, (s2[g] - n[g] * mean * mean) / static_cast<double>(n[g] - 1))
                     : 0.0;
    }
    a.stat = s[1] / static_cast<double>(n[1]) - s[0] / static_cast<double>(n[0]);
    a.se = std::sqrt(var[1] / static_cast<double>(n[1]) + var[0] / static_cast<double>(n[0]));
    return a;
}

// Same, but the grouping variable comes from a parallel sequence.
template <typename ValueFn>
AssocStat mean_difference_by(const std::vector<CounterfactualUnit>& units,
                             const std::vector<int>& group, ValueFn&& value) {
    double s[2] = {0.0, 0.0}, s2[2] = {0.0, 0.0};
    std::uint64_t n[2] = {0, 0};
    double vmin = value(units.front()), vmax = vmin;
    for (std::size_t i = 0; i < units.size(); ++i) {
        const int g = group[i] ? 1 : 0;
        const double v = value(units[i]);
        s[g] += v;
        s2[g] += v * v;
        ++n[g];
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    AssocStat a;
    a.n = n[0] + n[1];
    if (n[0] == 0 || n[1] == 0 || vmin == vmax) {
        return a;
    }
    double var[2];
    for (int g = 0; g < 2; ++g) {
        const double mean = s[g] / static_cast<double>(n[g]);
        var[g] = n[g] > 1
                     ? std::max(0.0, (s2[g] - n[g] * mean * mean) / static_cast<double>(n[g] - 1))
                     : 0.0;
    }
    a.stat = s[1] / static_cast<double>(n[1]) - s[0] / static_cast<double>(n[0]);
    a.se = std::sqrt(var[1] / static_cast<double>(n[1]) + var[0] / static_cast<double>(n[0]));
    return a;
}

// Sample covariance (n-1 denominator) with the standard error of the mean
// cross-deviation product.
template <typename XFn, typename YFn>
AssocStat covariance(const std::vector<CounterfactualUnit>& units, XFn&& xf, YFn&& yf) {
    const std::uint64_t n = units.size();
    AssocStat a;
    a.n = n;
    if (n < 2) {
        return a;
    }
    double sx = 0.0, sy = 0.0;
    double xmin = xf(units.front()), xmax = xmin;
    double ymin = yf(units.front()), ymax = ymin;
    for (const CounterfactualUnit& u : units) {
        const double x = xf(u), y = yf(u);
        sx += x;
        sy += y;
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    // Either column constant: the covariance is identically zero, so skip the
    // deviation products and their rounding residue.
    if (xmin == xmax || ymin == ymax) {
        return a;
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double sp = 0.0, sp2 = 0.0;
    for (const CounterfactualUnit& u : units) {
        const double d = (xf(u) - mx) * (yf(u) - my);
        sp += d;
        sp2 += d * d;
    }
    a.stat = sp / static_cast<double>(n - 1);
    const double mean_d = sp / static_cast<double>(n);
    const double var_d =
        std::max(0.0, (sp2 - n * mean_d * mean_d) / static_cast<double>(n - 1));
    a.se = std::sqrt(var_d / static_cast<double>(n));
    return a;
}

inline bool outcome_is_binary(const std::vector<CounterfactualUnit>& units) {
    for (const CounterfactualUnit& u : units) {
        for (int a = 0; a < 2; ++a) {
            for (int m = 0; m < 2; ++m) {
                if (u.y_am[a][m] != 0.0 && u.y_am[a][m] != 1.0) {
                    return false;
                }
            }
        }
    }
    return true;
}

} // namespace detail

// Association between Y(1,m) and M(0) for m in {0,1}: covariance for a
// continuous outcome, difference of conditional means for a binary one. Both
// are zero in expectation exactly when the cross-world independence holds for
// that m.
inline std::array<AssocStat, 2> cross_world_diagnostic(
    const std::vector<CounterfactualUnit>& units) {
    if (units.size() < 2) {
        throw DataError("cross_world_diagnostic: need at least 2 units");
    }
    const bool binary = detail::outcome_is_binary(units);
    std::array<AssocStat, 2> out;
    for (int m = 0; m < 2; ++m) {
        if (binary) {
            out[m] = detail::mean_difference(
                units, [m](const CounterfactualUnit& u) { return u.y_am[1][m]; },
                [](const CounterfactualUnit& u) { return u.m0 != 0; });
        } else {
            out[m] = detail::covariance(
                units, [m](const CounterfactualUnit& u) { return u.y_am[1][m]; },
                [](const CounterfactualUnit& u) { return static_cast<double>(u.m0); });
        }
    }
    return out;
}

// The verifiable single-world conditions, probed against an externally
// supplied treatment assignment sequence (one value per unit, drawn
// independently of the units under randomization):
//
//   "M(a) vs A":               difference in mean m_a between A groups
//   "Y(a,m) vs A":             difference in mean y_am between A groups
//   "Y(a,m) vs M(a) | A=a":    within the A=a group, difference in mean y_am
//                              across the two m_a levels
inline std::map<std::string, AssocStat> single_world_diagnostic(
    const std::vector<CounterfactualUnit>& units, const std::vector<int>& assignments) {
    if (units.size() != assignments.size()) {
        throw DataError("single_world_diagnostic: one assignment per unit required");
    }
    if (units.size() < 2) {
        throw DataError("single_world_diagnostic: need at least 2 units");
    }
    std::map<std::string, AssocStat> out;
    out["M(0) vs A"] = detail::mean_difference_by(
        units, assignments, [](const CounterfactualUnit& u) { return static_cast<double>(u.m0); });
    out["M(1) vs A"] = detail::mean_difference_by(
        units, assignments, [](const CounterfactualUnit& u) { return static_cast<double>(u.m1); });
    for (int a = 0; a < 2; ++a) {
        for (int m = 0; m < 2; ++m) {
            out["Y(" + std::to_string(a) + "," + std::to_string(m) + ") vs A"] =
                detail::mean_difference_by(units, assignments, [a, m](const CounterfactualUnit& u) {
                    return u.y_am[a][m];
                });
        }
    }
    // Y(a,m) vs M(a) within the A=a group.
    for (int a = 0; a < 2; ++a) {
        std::vector<CounterfactualUnit> in_arm;
        for (std::size_t i = 0; i < units.size(); ++i) {
            if (assignments[i] == a) {
                in_arm.push_back(units[i]);
            }
        }
        for (int m = 0; m < 2; ++m) {
            AssocStat stat; // zero if the arm is too small to measure
            if (in_arm.size() >= 2) {
                stat = detail::mean_difference(
                    in_arm, [a, m](const CounterfactualUnit& u) { return u.y_am[a][m]; },
                    [a](const CounterfactualUnit& u) { return (a ? u.m1 : u.m0) != 0; });
            }
            out["Y(" + std::to_string(a) + "," + std::to_string(m) + ") vs M(" +
                std::to_string(a) + ") | A=" + std::to_string(a)] = stat;
        }
    }
    return out;
}

// Mean absolute variation of the treatment contrast across mediator levels:
// zero exactly when Y(1,m) - Y(0,m) does not depend on m for any unit.
inline double no_interaction_diagnostic(const std::vector<CounterfactualUnit>& units) {
    if (units.size() < 2) {
        throw DataError("no_interaction_diagnostic: need at least 2 units");
    }
    double s = 0.0;
    for (const CounterfactualUnit& u : units) {
        s += std::fabs((u.y_am[1][1] - u.y_am[0][1]) - (u.y_am[1][0] - u.y_am[0][0]));
    }
    return s / static_cast<double>(units.size());
}

// For each m: E{Y(1,m)-Y(0,m) | M(0)=m} - E{Y(1,m)-Y(0,m)}. The standard
// error treats the stratum frequency as fixed: the gap equals
// (1 - p_m) * (difference of the two stratum means), so its SE is that
// frequency factor times the two-sample SE.
inline std::array<AssocStat, 2> direct_effect_assumption_diagnostic(
    const std::vector<CounterfactualUnit>& units) {
    if (units.size() < 2) {
        throw DataError("direct_effect_assumption_diagnostic: need at least 2 units");
    }
    std::uint64_t stratum_n[2] = {0, 0};
    for (const CounterfactualUnit& u : units) {
        ++stratum_n[u.m0];
    }
    if (stratum_n[0] == 0 || stratum_n[1] == 0) {
        throw DegenerateStratum(
            "direct_effect_assumption_diagnostic: some M(0) stratum has no units");
    }
    std::array<AssocStat, 2> out;
    const double n = static_cast<double>(units.size());
    for (int m = 0; m < 2; ++m) {
        const AssocStat diff = detail::mean_difference(
            units, [m](const CounterfactualUnit& u) { return u.y_am[1][m] - u.y_am[0][m]; },
            [m](const CounterfactualUnit& u) { return u.m0 == m; });
        const double p_m = static_cast<double>(stratum_n[m]) / n;
        out[m].n = units.size();
        out[m].stat = (1.0 - p_m) * diff.stat;
        out[m].se = (1.0 - p_m) * diff.se;
    }
    return out;
}

// Simulates n units from the config (with an independent Bernoulli(1/2)
// treatment assignment per unit) and runs every diagnostic, flagging each at
// |stat| > threshold * SE.
inline AuditReport run_audit(const ModelConfig& raw, std::uint64_t n, std::uint64_t seed,
                             double threshold = 5.0) {
    const ModelConfig cfg = validate_config(raw);
    if (n < 2) {
        throw InvalidConfig("run_audit: need n >= 2");
    }
    std::vector<CounterfactualUnit> units;
    units.reserve(n);
    std::vector<int> assignments;
    assignments.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        SplitMix64 stream = substream(seed, i);
        units.push_back(sample_unit(cfg, stream));
        assignments.push_back(stream.bernoulli(0.5));
    }

    AuditReport rep;
    rep.n = n;
    rep.threshold = threshold;
    rep.cw_assoc = cross_world_diagnostic(units);
    rep.sw_assoc = single_world_diagnostic(units, assignments);
    rep.b_variation = no_interaction_diagnostic(units);
    rep.de_assump_gap = direct_effect_assumption_diagnostic(units);

    for (int m = 0; m < 2; ++m) {
        rep.flags["cross-world: Y(1," + std::to_string(m) + ") vs M(0)"] =
            rep.cw_assoc[m].fails(threshold);
        rep.flags["direct-effect assumption: m=" + std::to_string(m)] =
            rep.de_assump_gap[m].fails(threshold);
    }
    for (const auto& [name, stat] : rep.sw_assoc) {
        rep.flags["single-world: " + name] = stat.fails(threshold);
    }
    rep.flags["no additive interaction"] = rep.b_variation > 1e-12;
    return rep;
}

} // namespace crossworld
