#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crossworld/bounds.hpp"
#include "crossworld/errors.hpp"
#include "crossworld/gformula.hpp"
#include "crossworld/math.hpp"
#include "crossworld/model.hpp"
#include "crossworld/oracle.hpp"
#include "crossworld/parallel.hpp"
#include "crossworld/rng.hpp"

namespace crossworld {

enum class GridMethod { quadrature, monte_carlo };

inline const char* grid_method_name(GridMethod m) {
    return m == GridMethod::quadrature ? "quadrature" : "monte_carlo";
}

// A full-factorial sweep over the nine structural coefficients. Settings are
// enumerated lexicographically with alpha0 varying fastest and beta5 slowest.
struct GridSpec {
    OutcomeKind outcome_kind = OutcomeKind::binary;
    std::vector<double> alpha0, alpha1, alpha2;
    std::vector<double> beta0, beta1, beta2, beta3, beta4, beta5;
    GridMethod method = GridMethod::quadrature;
    std::uint64_t mc_n = 1'000'000;
    std::uint64_t base_seed = 2470;
    int parallelism = 0; // 0 = all hardware threads
    // Guard rails. Full-grid Monte Carlo at the default mc_n costs ~3e11 unit
    // draws; anything past total_draws_cap requires the explicit opt-in.
    std::uint64_t max_settings = 1'000'000;
    bool allow_big_mc = false;
    int quadrature_nodes = 64;

    static constexpr std::uint64_t total_draws_cap = 2'000'000'000;
};

// Default sweeps. Mediator coefficients: alpha0 spans logit 0.3..logit 0.8,
// alpha1 spans log-odds-ratio 0.7..2.5, alpha2 spans log-odds-ratio 0.3..0.9.
inline GridSpec default_binary_grid() {
    GridSpec g;
    g.outcome_kind = OutcomeKind::binary;
    g.alpha0 = linspace(logit(0.3), logit(0.8), 4);
    g.alpha1 = linspace(std::log(0.7), std::log(2.5), 4);
    g.alpha2 = linspace(std::log(0.3), std::log(0.9), 4);
    g.beta0 = linspace(logit(0.3), logit(0.6), 4);
    g.beta1 = linspace(std::log(0.5), std::log(3.0), 4);
    g.beta2 = linspace(std::log(1.0), std::log(3.5), 4);
    g.beta3 = linspace(std::log(0.5), std::log(0.9), 4);
    // Four log-odds-ratio points plus an explicit no-interaction value.
    g.beta4 = linspace(std::log(0.7), std::log(1.4), 4);
    g.beta4.push_back(0.0);
    g.beta5 = linspace(std::log(1.0), std::log(2.0), 4); // first point is exactly 0
    return g;
}

inline GridSpec default_continuous_grid() {
    GridSpec g;
    g.outcome_kind = OutcomeKind::continuous;
    g.alpha0 = linspace(logit(0.3), logit(0.8), 4);
    g.alpha1 = linspace(std::log(0.7), std::log(2.5), 4);
    g.alpha2 = linspace(std::log(0.3), std::log(0.9), 4);
    g.beta0 = linspace(40.0, 60.0, 4);
    g.beta1 = linspace(-10.0, 10.0, 4);
    g.beta2 = linspace(-20.0, 10.0, 4);
    g.beta3 = linspace(-15.0, -5.0, 4);
    g.beta4 = linspace(-20.0, -10.0, 4);
    g.beta5 = linspace(-15.0, 15.0, 4);
    return g;
}

namespace detail {

inline void validate_grid_lists(const GridSpec& spec) {
    const std::vector<double>* lists[] = {&spec.alpha0, &spec.alpha1, &spec.alpha2,
                                          &spec.beta0,  &spec.beta1,  &spec.beta2,
                                          &spec.beta3,  &spec.beta4,  &spec.beta5};
    const char* names[] = {"alpha0", "alpha1", "alpha2", "beta0", "beta1",
                           "beta2",  "beta3",  "beta4",  "beta5"};
    for (int i = 0; i < 9; ++i) {
        if (lists[i]->empty()) {
            throw InvalidConfig(std::string("grid: empty value list for ") + names[i]);
        }
        for (double v : *lists[i]) {
            if (!std::isfinite(v)) {
                throw InvalidConfig(std::string("grid: non-finite value in list ") + names[i]);
            }
        }
    }
    if (spec.mc_n < 1) {
        throw InvalidConfig("grid: mc_n must be >= 1");
    }
    if (spec.quadrature_nodes < 8) {
        throw InvalidConfig("grid: quadrature_nodes must be >= 8");
    }
}

} // namespace detail

inline std::uint64_t grid_size(const GridSpec& spec) {
    detail::validate_grid_lists(spec);
    const std::size_t sizes[] = {spec.alpha0.size(), spec.alpha1.size(), spec.alpha2.size(),
                                 spec.beta0.size(),  spec.beta1.size(),  spec.beta2.size(),
                                 spec.beta3.size(),  spec.beta4.size(),  spec.beta5.size()};
    std::uint64_t total = 1;
    for (std::size_t s : sizes) {
        if (total > std::numeric_limits<std::uint64_t>::max() / s) {
            throw GridTooLarge("grid: setting count overflows 64 bits");
        }
        total *= s;
    }
    return total;
}

// The setting at a given index, with alpha0 varying fastest.
inline ModelConfig config_at(const GridSpec& spec, std::uint64_t index) {
    const std::vector<double>* lists[] = {&spec.alpha0, &spec.alpha1, &spec.alpha2,
                                          &spec.beta0,  &spec.beta1,  &spec.beta2,
                                          &spec.beta3,  &spec.beta4,  &spec.beta5};
    double value[9];
    std::uint64_t rem = index;
    for (int i = 0; i < 9; ++i) {
        const std::uint64_t len = lists[i]->size();
        value[i] = (*lists[i])[static_cast<std::size_t>(rem % len)];
        rem /= len;
    }
    if (rem != 0) {
        throw InvalidConfig("config_at: index out of range");
    }
    ModelConfig cfg;
    cfg.outcome_kind = spec.outcome_kind;
    cfg.alpha0 = value[0];
    cfg.alpha1 = value[1];
    cfg.alpha2 = value[2];
    cfg.beta0 = value[3];
    cfg.beta1 = value[4];
    cfg.beta2 = value[5];
    cfg.beta3 = value[6];
    cfg.beta4 = value[7];
    cfg.beta5 = value[8];
    return cfg;
}

inline std::vector<ModelConfig> build_grid(const GridSpec& spec) {
    const std::uint64_t total = grid_size(spec);
    if (total > spec.max_settings) {
        throw GridTooLarge("grid: " + std::to_string(total) + " settings exceeds the cap of " +
                           std::to_string(spec.max_settings) +
                           " (raise max_settings to proceed)");
    }
    std::vector<ModelConfig> out;
    out.reserve(static_cast<std::size_t>(total));
    for (std::uint64_t i = 0; i < total; ++i) {
        out.push_back(config_at(spec, i));
    }
    return out;
}

// One evaluated setting. bias_nde = true_nde - est_nde by construction, and
// bounds are attached for binary outcomes only.
struct GridResultRow {
    std::uint64_t index = 0;
    double alpha0 = 0, alpha1 = 0, alpha2 = 0;
    double beta0 = 0, beta1 = 0, beta2 = 0, beta3 = 0, beta4 = 0, beta5 = 0;
    double true_nde = 0, true_nie = 0;
    double est_nde = 0, est_nie = 0;
    double bias_nde = 0, bias_nie = 0;
    std::optional<double> bounds_lower;
    std::optional<double> bounds_upper;
    GridMethod method = GridMethod::quadrature;
};

namespace detail {

inline void fill_params(GridResultRow& row, const ModelConfig& cfg) {
    row.alpha0 = cfg.alpha0;
    row.alpha1 = cfg.alpha1;
    row.alpha2 = cfg.alpha2;
    row.beta0 = cfg.beta0;
    row.beta1 = cfg.beta1;
    row.beta2 = cfg.beta2;
    row.beta3 = cfg.beta3;
    row.beta4 = cfg.beta4;
    row.beta5 = cfg.beta5;
}

inline GridResultRow evaluate_quadrature(const ModelConfig& cfg, std::uint64_t index,
                                         const Oracle& oracle) {
    GridResultRow row;
    row.index = index;
    row.method = GridMethod::quadrature;
    fill_params(row, cfg);
    const OracleReport rep = oracle.report(cfg);
    row.true_nde = rep.truth.nde;
    row.true_nie = rep.truth.nie;
    row.est_nde = rep.estimand.nde;
    row.est_nie = rep.estimand.nie;
    row.bias_nde = rep.bias_nde;
    row.bias_nie = rep.bias_nie;
    if (cfg.outcome_kind == OutcomeKind::binary) {
        const NdeBounds b = compute_nde_bounds(oracle.bounds_input(cfg));
        row.bounds_lower = b.lower;
        row.bounds_upper = b.upper;
    }
    return row;
}

// Monte Carlo evaluation follows the sampling recipe end to end: draw the
// counterfactual table for mc_n units, average cross-world contrasts for the
// truth, then project each unit to a factual (A,M,Y) row under a randomized
// treatment and run the g-formula on those, as one would with observed data.
inline GridResultRow evaluate_monte_carlo(const ModelConfig& cfg, std::uint64_t index,
                                          std::uint64_t seed, std::uint64_t n) {
    GridResultRow row;
    row.index = index;
    row.method = GridMethod::monte_carlo;
    fill_params(row, cfg);

    double s_nde = 0.0, s_nie = 0.0;
    double sum_y[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    CellStats cells;
    for (std::uint64_t i = 0; i < n; ++i) {
        SplitMix64 stream = substream(seed, i);
        const CounterfactualUnit unit = sample_unit(cfg, stream);
        s_nde += unit.y_am[1][unit.m0] - unit.y_am[0][unit.m0];
        s_nie += unit.y_am[1][unit.m1] - unit.y_am[1][unit.m0];
        const int a = stream.bernoulli(0.5);
        const int m = a ? unit.m1 : unit.m0;
        cells.counts[a][m] += 1;
        sum_y[a][m] += unit.y_am[a][m];
    }
    cells.n = n;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int a = 0; a < 2; ++a) {
        for (int m = 0; m < 2; ++m) {
            cells.mean_y[a][m] =
                cells.counts[a][m] ? sum_y[a][m] / static_cast<double>(cells.counts[a][m]) : nan;
        }
        const std::uint64_t arm = cells.arm_count(a);
        cells.p_m1_given_a[a] =
            arm ? static_cast<double>(cells.counts[a][1]) / static_cast<double>(arm) : nan;
        cells.mean_y_given_a[a] = arm ? (sum_y[a][0] + sum_y[a][1]) / static_cast<double>(arm) : nan;
    }

    row.true_nde = s_nde / static_cast<double>(n);
    row.true_nie = s_nie / static_cast<double>(n);
    const EffectEstimates est = estimate_gformula(cells);
    row.est_nde = est.nde;
    row.est_nie = est.nie;
    row.bias_nde = row.true_nde - row.est_nde;
    row.bias_nie = row.true_nie - row.est_nie;
    if (cfg.outcome_kind == OutcomeKind::binary) {
        BoundsInput in;
        in.p_m1_a0 = cells.p_m1_given_a[0];
        in.p_m0_a0 = 1.0 - in.p_m1_a0;
        in.ey_a1_m0 = cells.mean_y[1][0];
        in.ey_a1_m1 = cells.mean_y[1][1];
        in.ey_a0 = cells.mean_y_given_a[0];
        const NdeBounds b = compute_nde_bounds(in);
        row.bounds_lower = b.lower;
        row.bounds_upper = b.upper;
    }
    return row;
}

} // namespace detail

// Evaluates every setting and returns rows ordered by setting index,
// regardless of how work was scheduled. Monte Carlo settings use the
// per-setting seed substream(base_seed, index), so results do not depend on
// the parallelism level.
inline std::vector<GridResultRow> run_grid(const GridSpec& spec) {
    const std::uint64_t total = grid_size(spec);
    if (total > spec.max_settings) {
        throw GridTooLarge("grid: " + std::to_string(total) + " settings exceeds the cap of " +
                           std::to_string(spec.max_settings) +
                           " (raise max_settings to proceed)");
    }
    if (spec.method == GridMethod::monte_carlo && !spec.allow_big_mc) {
        const double draws = static_cast<double>(total) * static_cast<double>(spec.mc_n);
        if (draws > static_cast<double>(GridSpec::total_draws_cap)) {
            throw InvalidConfig(
                "grid: monte_carlo at " + std::to_string(total) + " settings x mc_n=" +
                std::to_string(spec.mc_n) +
                " exceeds the draw budget; set allow_big_mc or use quadrature screening");
        }
    }

    // Validate one representative config up front so a bad coefficient list
    // fails fast instead of inside a worker thread.
    if (total > 0) {
        validate_config(config_at(spec, 0));
    }

    std::vector<GridResultRow> rows(static_cast<std::size_t>(total));
    const Oracle& oracle = detail::cached_oracle(spec.quadrature_nodes);

    parallel_for_blocks(total, spec.parallelism, [&](std::uint64_t index) {
        const ModelConfig cfg = config_at(spec, index);
        try {
            if (spec.method == GridMethod::quadrature) {
                rows[static_cast<std::size_t>(index)] =
                    detail::evaluate_quadrature(cfg, index, oracle);
            } else {
                const std::uint64_t seed = derive_stream_seed(spec.base_seed, index);
                rows[static_cast<std::size_t>(index)] =
                    detail::evaluate_monte_carlo(cfg, index, seed, spec.mc_n);
            }
        } catch (const Error& e) {
            throw Error("grid setting " + std::to_string(index) + ": " + e.what(),
                        e.exit_code());
        }
    });
    return rows;
}

// Per-stratum bias extremes; indices refer to GridResultRow::index.
struct BiasExtremes {
    std::uint64_t count = 0;
    double min_bias = 0, max_bias = 0, max_abs_bias = 0;
    std::uint64_t min_index = 0, max_index = 0, max_abs_index = 0;
};

struct InteractionCell {
    double beta4 = 0, beta5 = 0;
    double max_abs_bias = 0;
    std::uint64_t count = 0;
};

// Bias summary over a set of rows: overall and beta5-stratified extremes of
// bias_nde, the extreme rows themselves (whose attached bounds reproduce the
// worst-case table), and the max |bias| for each (beta4, beta5) combination.
struct BiasSummary {
    BiasExtremes overall;
    BiasExtremes beta5_zero;
    BiasExtremes beta5_nonzero;
    GridResultRow most_negative;
    GridResultRow most_positive;
    std::vector<InteractionCell> interaction_table; // sorted by (beta4, beta5)
};

inline BiasSummary summarize_bias(const std::vector<GridResultRow>& rows) {
    if (rows.empty()) {
        throw InvalidInput("summarize_bias: no rows");
    }
    BiasSummary s;
    bool first_overall = true, first_zero = true, first_nonzero = true;
    auto update = [](BiasExtremes& e, bool& first, const GridResultRow& r) {
        const double b = r.bias_nde;
        if (first) {
            e = BiasExtremes{1, b, b, std::fabs(b), r.index, r.index, r.index};
            first = false;
            return;
        }
        ++e.count;
        if (b < e.min_bias) {
            e.min_bias = b;
            e.min_index = r.index;
        }
        if (b > e.max_bias) {
            e.max_bias = b;
            e.max_index = r.index;
        }
        if (std::fabs(b) > e.max_abs_bias) {
            e.max_abs_bias = std::fabs(b);
            e.max_abs_index = r.index;
        }
    };

    std::map<std::pair<double, double>, InteractionCell> cells;
    const GridResultRow* most_negative = &rows.front();
    const GridResultRow* most_positive = &rows.front();
    for (const GridResultRow& r : rows) {
        update(s.overall, first_overall, r);
        if (r.beta5 == 0.0) {
            update(s.beta5_zero, first_zero, r);
        } else {
            update(s.beta5_nonzero, first_nonzero, r);
        }
        if (r.bias_nde < most_negative->bias_nde) {
            most_negative = &r;
        }
        if (r.bias_nde > most_positive->bias_nde) {
            most_positive = &r;
        }
        InteractionCell& c = cells[{r.beta4, r.beta5}];
        c.beta4 = r.beta4;
        c.beta5 = r.beta5;
        c.max_abs_bias = std::max(c.max_abs_bias, std::fabs(r.bias_nde));
        ++c.count;
    }
    s.most_negative = *most_negative;
    s.most_positive = *most_positive;
    s.interaction_table.reserve(cells.size());
    for (const auto& [key, cell] : cells) {
        s.interaction_table.push_back(cell);
    }
    return s;
}

// One point of the bias-vs-beta5 figure: the g-formula bias as beta5 sweeps a
// range, computed for each (beta3, beta4) combination supplied, with all
// other coefficients taken from `base` (normally the worst-bias setting).
struct Figure5Point {
    double beta5 = 0, beta3 = 0, beta4 = 0;
    double bias_nde = 0;
};

inline std::vector<Figure5Point> figure5_slice(const ModelConfig& base,
                                               const std::vector<double>& beta3_values,
                                               const std::vector<double>& beta4_values,
                                               double beta5_min, double beta5_max,
                                               std::size_t points, int nodes = 64) {
    if (beta3_values.empty() || beta4_values.empty()) {
        throw InvalidConfig("figure5_slice: beta3/beta4 value lists must be non-empty");
    }
    if (points < 2) {
        throw InvalidConfig("figure5_slice: need at least 2 sweep points");
    }
    const std::vector<double> sweep = linspace(beta5_min, beta5_max, points);
    const Oracle& oracle = detail::cached_oracle(nodes);
    std::vector<Figure5Point> out;
    out.reserve(beta3_values.size() * beta4_values.size() * points);
    for (double b3 : beta3_values) {
        for (double b4 : beta4_values) {
            for (double b5 : sweep) {
                ModelConfig cfg = base;
                cfg.beta3 = b3;
                cfg.beta4 = b4;
                cfg.beta5 = b5;
                const OracleReport rep = oracle.report(cfg);
                out.push_back(Figure5Point{b5, b3, b4, rep.bias_nde});
            }
        }
    }
    return out;
}

} // namespace crossworld
