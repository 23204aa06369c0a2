#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crossworld/errors.hpp"
#include "crossworld/parallel.hpp"
#include "crossworld/rng.hpp"

namespace crossworld {

enum class OutcomeKind { continuous, binary };

// How counterfactual cells share structural noise.
//   shared_noise:       one eps_m serves both M(0) and M(1); one eps_y serves
//                       all four Y(a,m) cells (the counterfactual construction
//                       in which factual and counterfactual errors coincide).
//   independent_redraw: fresh noise per counterfactual cell. Expectation-level
//                       targets are identical; only joint distributions differ.
enum class Coupling { shared_noise, independent_redraw };

// Structural model for a binary treatment A, binary mediator M and a
// continuous or binary outcome Y, with a latent normal variable U that enters
// the M(0) equation and the Y(1,m) equation:
//
//   M(a)   = 1{ -eps_m < alpha0 + alpha1*a + alpha2*(1-a)*u }
//   Y(a,m) = beta0 + beta1*a + beta2*m + beta3*a*u + beta4*a*m + beta5*a*m*u   (+ eps_y, continuous)
//   Y(a,m) = 1{ -eps_y < same linear form }                                    (binary)
//
// eps_m is standard logistic; eps_y is Normal(0, y_noise_sd) for the continuous
// outcome and standard logistic for the binary outcome.
struct ModelConfig {
    OutcomeKind outcome_kind = OutcomeKind::binary;
    double alpha0 = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double beta0 = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double beta3 = 0.0;
    double beta4 = 0.0;
    double beta5 = 0.0;
    double u_mean = 2.0;
    double u_sd = 1.0;
    double y_noise_sd = 1.0; // used by the continuous outcome only
    Coupling coupling = Coupling::shared_noise;
};

inline ModelConfig validate_config(ModelConfig cfg) {
    auto require_finite = [](double v, const char* name) {
        if (!std::isfinite(v)) {
            throw InvalidConfig(std::string("model config: ") + name + " must be finite");
        }
    };
    require_finite(cfg.alpha0, "alpha0");
    require_finite(cfg.alpha1, "alpha1");
    require_finite(cfg.alpha2, "alpha2");
    require_finite(cfg.beta0, "beta0");
    require_finite(cfg.beta1, "beta1");
    require_finite(cfg.beta2, "beta2");
    require_finite(cfg.beta3, "beta3");
    require_finite(cfg.beta4, "beta4");
    require_finite(cfg.beta5, "beta5");
    require_finite(cfg.u_mean, "u_mean");
    if (!std::isfinite(cfg.u_sd) || !(cfg.u_sd > 0.0)) {
        throw InvalidConfig("model config: u_sd must be positive");
    }
    if (!std::isfinite(cfg.y_noise_sd) || !(cfg.y_noise_sd > 0.0)) {
        throw InvalidConfig("model config: y_noise_sd must be positive");
    }
    return cfg;
}

// One unit's latent draws and its full counterfactual table. Under
// independent_redraw, eps_m and eps_y record the draws used for m0 and
// y_am[0][0]; the other cells used fresh draws that are not stored.
struct CounterfactualUnit {
    double u = 0.0;
    double eps_m = 0.0;
    double eps_y = 0.0;
    int m0 = 0;
    int m1 = 0;
    double y_am[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
};

struct ObservedRow {
    int a = 0;
    int m = 0;
    double y = 0.0;
};

using ObservedDataset = std::vector<ObservedRow>;

enum class EffectMethod { mc_truth, quadrature_truth, g_formula, lsem, interventional, separable };

inline const char* effect_method_name(EffectMethod m) {
    switch (m) {
        case EffectMethod::mc_truth: return "mc_truth";
        case EffectMethod::quadrature_truth: return "quadrature_truth";
        case EffectMethod::g_formula: return "g_formula";
        case EffectMethod::lsem: return "lsem";
        case EffectMethod::interventional: return "interventional";
        case EffectMethod::separable: return "separable";
    }
    return "unknown";
}

// NDE/NIE/TE for the a=1 vs a'=0 contrast, together with the nested mean
// E{Y(1,M(0))}. te is always assembled as nde + nie from the same three
// expectations, so the decomposition holds exactly. mc_se, when present, is
// the largest of the NDE/NIE/TE Monte Carlo standard errors.
struct EffectEstimates {
    double nde = 0.0;
    double nie = 0.0;
    double te = 0.0;
    double ey_nested = 0.0;
    EffectMethod method = EffectMethod::quadrature_truth;
    std::int64_t n_or_nodes = 0;
    std::optional<double> mc_se;
};

namespace detail {

inline double mediator_linear(const ModelConfig& c, int a, double u) {
    return c.alpha0 + c.alpha1 * a + c.alpha2 * (1 - a) * u;
}

inline double outcome_linear(const ModelConfig& c, int a, int m, double u) {
    return c.beta0 + c.beta1 * a + c.beta2 * m + c.beta3 * a * u + c.beta4 * a * m +
           c.beta5 * a * m * u;
}

inline double draw_outcome_noise(const ModelConfig& c, SplitMix64& stream) {
    return c.outcome_kind == OutcomeKind::continuous ? stream.normal(0.0, c.y_noise_sd)
                                                     : stream.logistic();
}

inline double outcome_cell(const ModelConfig& c, int a, int m, double u, double eps_y) {
    const double lin = outcome_linear(c, a, m, u);
    if (c.outcome_kind == OutcomeKind::continuous) {
        return lin + eps_y;
    }
    return (-eps_y < lin) ? 1.0 : 0.0;
}

} // namespace detail

// Draws one unit. Fixed draw order from the stream: u, then mediator noise,
// then outcome noise (shared_noise: 3 draws; independent_redraw: 7 draws in
// the order u, eps_m(m0), eps_m(m1), eps_y(0,0), eps_y(0,1), eps_y(1,0),
// eps_y(1,1)). Callers needing additional per-unit randomness (treatment
// assignment, mediator interventions) draw from the same stream afterwards.
inline CounterfactualUnit sample_unit(const ModelConfig& cfg, SplitMix64& stream) {
    CounterfactualUnit unit;
    unit.u = stream.normal(cfg.u_mean, cfg.u_sd);
    if (cfg.coupling == Coupling::shared_noise) {
        unit.eps_m = stream.logistic();
        unit.eps_y = detail::draw_outcome_noise(cfg, stream);
        unit.m0 = (-unit.eps_m < detail::mediator_linear(cfg, 0, unit.u)) ? 1 : 0;
        unit.m1 = (-unit.eps_m < detail::mediator_linear(cfg, 1, unit.u)) ? 1 : 0;
        for (int a = 0; a < 2; ++a) {
            for (int m = 0; m < 2; ++m) {
                unit.y_am[a][m] = detail::outcome_cell(cfg, a, m, unit.u, unit.eps_y);
            }
        }
    } else {
        unit.eps_m = stream.logistic();
        const double eps_m1 = stream.logistic();
        unit.m0 = (-unit.eps_m < detail::mediator_linear(cfg, 0, unit.u)) ? 1 : 0;
        unit.m1 = (-eps_m1 < detail::mediator_linear(cfg, 1, unit.u)) ? 1 : 0;
        for (int a = 0; a < 2; ++a) {
            for (int m = 0; m < 2; ++m) {
                const double eps = detail::draw_outcome_noise(cfg, stream);
                if (a == 0 && m == 0) {
                    unit.eps_y = eps;
                }
                unit.y_am[a][m] = detail::outcome_cell(cfg, a, m, unit.u, eps);
            }
        }
    }
    return unit;
}

// Y(a, M(a')): the outcome under treatment a with the mediator set to the
// value it would take under treatment a'.
inline double compose_nested(const CounterfactualUnit& unit, int a, int a_prime) {
    const int m = a_prime ? unit.m1 : unit.m0;
    return unit.y_am[a][m];
}

// The factual row implied by consistency when A = a.
inline ObservedRow project_factual(const CounterfactualUnit& unit, int a) {
    const int m = a ? unit.m1 : unit.m0;
    return ObservedRow{a, m, unit.y_am[a][m]};
}

// Per-contrast Monte Carlo means and standard errors.
struct McEffectDetails {
    double nde = 0.0, nie = 0.0, te = 0.0, ey_nested = 0.0;
    double se_nde = 0.0, se_nie = 0.0, se_te = 0.0;
    std::uint64_t n = 0;
};

namespace detail {

// Simulation work proceeds in fixed-size blocks whose partial sums are
// combined in block-index order, so results are bit-identical for any thread
// count or scheduling.
constexpr std::uint64_t kMcBlock = 4096;

struct EffectAccum {
    double s_nde = 0, s2_nde = 0;
    double s_nie = 0, s2_nie = 0;
    double s_te = 0, s2_te = 0;
    double s_nested = 0;

    void add(const CounterfactualUnit& u) {
        const double y_nested = u.y_am[1][u.m0];
        const double d_nde = y_nested - u.y_am[0][u.m0];
        const double d_nie = u.y_am[1][u.m1] - y_nested;
        const double d_te = u.y_am[1][u.m1] - u.y_am[0][u.m0];
        s_nde += d_nde;
        s2_nde += d_nde * d_nde;
        s_nie += d_nie;
        s2_nie += d_nie * d_nie;
        s_te += d_te;
        s2_te += d_te * d_te;
        s_nested += y_nested;
    }

    void merge(const EffectAccum& o) {
        s_nde += o.s_nde;
        s2_nde += o.s2_nde;
        s_nie += o.s_nie;
        s2_nie += o.s2_nie;
        s_te += o.s_te;
        s2_te += o.s2_te;
        s_nested += o.s_nested;
    }
};

inline double mean_se(double s, double s2, std::uint64_t n) {
    if (n < 2) {
        return 0.0;
    }
    const double mean = s / static_cast<double>(n);
    double var = (s2 - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1);
    if (var < 0.0) {
        var = 0.0; // guard against cancellation on constant columns
    }
    return std::sqrt(var / static_cast<double>(n));
}

} // namespace detail

inline McEffectDetails mc_true_effects_detailed(const ModelConfig& cfg, std::uint64_t n,
                                                std::uint64_t seed, int jobs = 0) {
    if (n < 1) {
        throw InvalidConfig("mc_true_effects: need n >= 1");
    }
    const std::uint64_t n_blocks = (n + detail::kMcBlock - 1) / detail::kMcBlock;
    std::vector<detail::EffectAccum> partial(n_blocks);
    parallel_for_blocks(n_blocks, jobs, [&](std::uint64_t b) {
        detail::EffectAccum acc;
        const std::uint64_t lo = b * detail::kMcBlock;
        const std::uint64_t hi = std::min(n, lo + detail::kMcBlock);
        for (std::uint64_t i = lo; i < hi; ++i) {
            SplitMix64 stream = substream(seed, i);
            acc.add(sample_unit(cfg, stream));
        }
        partial[b] = acc;
    });
    detail::EffectAccum total;
    for (const auto& p : partial) {
        total.merge(p);
    }
    McEffectDetails d;
    d.n = n;
    const double dn = static_cast<double>(n);
    d.nde = total.s_nde / dn;
    d.nie = total.s_nie / dn;
    d.te = d.nde + d.nie;
    d.ey_nested = total.s_nested / dn;
    d.se_nde = detail::mean_se(total.s_nde, total.s2_nde, n);
    d.se_nie = detail::mean_se(total.s_nie, total.s2_nie, n);
    d.se_te = detail::mean_se(total.s_te, total.s2_te, n);
    return d;
}

// True effects by simulation: means of the counterfactual contrasts over n
// units (no identification assumptions involved).
inline EffectEstimates mc_true_effects(const ModelConfig& cfg, std::uint64_t n, std::uint64_t seed,
                                       int jobs = 0) {
    const McEffectDetails d = mc_true_effects_detailed(cfg, n, seed, jobs);
    EffectEstimates est;
    est.nde = d.nde;
    est.nie = d.nie;
    est.te = d.te;
    est.ey_nested = d.ey_nested;
    est.method = EffectMethod::mc_truth;
    est.n_or_nodes = static_cast<std::int64_t>(n);
    est.mc_se = std::max(d.se_nde, std::max(d.se_nie, d.se_te));
    return est;
}

// Effects of interventions that draw the mediator from a world-specific
// marginal distribution (M ~ p_a, independent of the unit's own latents),
// for the a=1 vs a'=0 contrast:
//
//   DE_st = E{Y(1, M~p_0)} - E{Y(0, M~p_0)}
//   IE_st = E{Y(1, M~p_1)} - E{Y(1, M~p_0)}
//   te_check[a] = E{Y(a, M~p_a)} - E{Y(a)}
//
// The raw per-arm sums are kept so callers can verify the telescoping
// identity DE_st + IE_st = E{Y(1,M~p_1)} - E{Y(0,M~p_0)} in exact sum space
// (for a binary outcome the sums are integers, so it is bit-exact).
struct InterventionalEffects {
    double de_st = 0.0;
    double ie_st = 0.0;
    double contrast = 0.0;      // E{Y(1, M~p_1)} - E{Y(0, M~p_0)}
    double te_check[2] = {0.0, 0.0};
    double se_de = 0.0, se_ie = 0.0;
    double se_te_check[2] = {0.0, 0.0};
    double p_hat[2] = {0.0, 0.0}; // empirical P(M(a)=1) used for the draws
    double sum_y_a0_pm0 = 0.0;    // sum of Y(0, M~p_0)
    double sum_y_a1_pm0 = 0.0;    // sum of Y(1, M~p_0)
    double sum_y_a1_pm1 = 0.0;    // sum of Y(1, M~p_1)
    std::uint64_t n = 0;
};

inline InterventionalEffects mc_interventional_effects(const ModelConfig& cfg, std::uint64_t n,
                                                       std::uint64_t seed, int jobs = 0) {
    if (n < 1) {
        throw InvalidConfig("mc_interventional_effects: need n >= 1");
    }
    const std::uint64_t n_blocks = (n + detail::kMcBlock - 1) / detail::kMcBlock;

    // Pass 1: the mediator marginals p_a = P(M(a)=1).
    std::vector<std::uint64_t> part_m0(n_blocks, 0), part_m1(n_blocks, 0);
    parallel_for_blocks(n_blocks, jobs, [&](std::uint64_t b) {
        std::uint64_t c0 = 0, c1 = 0;
        const std::uint64_t lo = b * detail::kMcBlock;
        const std::uint64_t hi = std::min(n, lo + detail::kMcBlock);
        for (std::uint64_t i = lo; i < hi; ++i) {
            SplitMix64 stream = substream(seed, i);
            const CounterfactualUnit u = sample_unit(cfg, stream);
            c0 += static_cast<std::uint64_t>(u.m0);
            c1 += static_cast<std::uint64_t>(u.m1);
        }
        part_m0[b] = c0;
        part_m1[b] = c1;
    });
    std::uint64_t m0_count = 0, m1_count = 0;
    for (std::uint64_t b = 0; b < n_blocks; ++b) {
        m0_count += part_m0[b];
        m1_count += part_m1[b];
    }
    const double p0 = static_cast<double>(m0_count) / static_cast<double>(n);
    const double p1 = static_cast<double>(m1_count) / static_cast<double>(n);

    // Pass 2: regenerate the same units, draw M* ~ Bernoulli(p_a) from each
    // unit's stream (after the unit's own draws), and accumulate.
    struct Accum {
        double s00 = 0, s10 = 0, s11 = 0;
        double s_de = 0, s2_de = 0, s_ie = 0, s2_ie = 0;
        double s_tc0 = 0, s2_tc0 = 0, s_tc1 = 0, s2_tc1 = 0;
    };
    std::vector<Accum> partial(n_blocks);
    parallel_for_blocks(n_blocks, jobs, [&](std::uint64_t b) {
        Accum acc;
        const std::uint64_t lo = b * detail::kMcBlock;
        const std::uint64_t hi = std::min(n, lo + detail::kMcBlock);
        for (std::uint64_t i = lo; i < hi; ++i) {
            SplitMix64 stream = substream(seed, i);
            const CounterfactualUnit u = sample_unit(cfg, stream);
            const int mstar0 = stream.bernoulli(p0);
            const int mstar1 = stream.bernoulli(p1);
            const double y00 = u.y_am[0][mstar0];
            const double y10 = u.y_am[1][mstar0];
            const double y11 = u.y_am[1][mstar1];
            acc.s00 += y00;
            acc.s10 += y10;
            acc.s11 += y11;
            const double d_de = y10 - y00;
            const double d_ie = y11 - y10;
            const double d_tc0 = y00 - u.y_am[0][u.m0];
            const double d_tc1 = y11 - u.y_am[1][u.m1];
            acc.s_de += d_de;
            acc.s2_de += d_de * d_de;
            acc.s_ie += d_ie;
            acc.s2_ie += d_ie * d_ie;
            acc.s_tc0 += d_tc0;
            acc.s2_tc0 += d_tc0 * d_tc0;
            acc.s_tc1 += d_tc1;
            acc.s2_tc1 += d_tc1 * d_tc1;
        }
        partial[b] = acc;
    });
    Accum total;
    for (const auto& p : partial) {
        total.s00 += p.s00;
        total.s10 += p.s10;
        total.s11 += p.s11;
        total.s_de += p.s_de;
        total.s2_de += p.s2_de;
        total.s_ie += p.s_ie;
        total.s2_ie += p.s2_ie;
        total.s_tc0 += p.s_tc0;
        total.s2_tc0 += p.s2_tc0;
        total.s_tc1 += p.s_tc1;
        total.s2_tc1 += p.s2_tc1;
    }

    InterventionalEffects out;
    out.n = n;
    out.p_hat[0] = p0;
    out.p_hat[1] = p1;
    out.sum_y_a0_pm0 = total.s00;
    out.sum_y_a1_pm0 = total.s10;
    out.sum_y_a1_pm1 = total.s11;
    const double dn = static_cast<double>(n);
    out.de_st = (total.s10 - total.s00) / dn;
    out.ie_st = (total.s11 - total.s10) / dn;
    out.contrast = (total.s11 - total.s00) / dn;
    out.te_check[0] = total.s_tc0 / dn;
    out.te_check[1] = total.s_tc1 / dn;
    out.se_de = detail::mean_se(total.s_de, total.s2_de, n);
    out.se_ie = detail::mean_se(total.s_ie, total.s2_ie, n);
    out.se_te_check[0] = detail::mean_se(total.s_tc0, total.s2_tc0, n);
    out.se_te_check[1] = detail::mean_se(total.s_tc1, total.s2_tc1, n);
    return out;
}

// Mean outcome when the treatment is decomposed into a component acting on
// the mediator path (set to a_m) and a component acting elsewhere (set to
// a_y), evaluated on shared latent draws. In this structural family the
// mediator equation sees only the a_m component and the outcome equation only
// the a_y component, so the evaluation reduces to the counterfactual cell
// Y(a_y, M(a_m)).
inline double mc_separable_effects(const ModelConfig& cfg, int a_y, int a_m, std::uint64_t n,
                                   std::uint64_t seed, int jobs = 0) {
    if (n < 1) {
        throw InvalidConfig("mc_separable_effects: need n >= 1");
    }
    if ((a_y != 0 && a_y != 1) || (a_m != 0 && a_m != 1)) {
        throw InvalidConfig("mc_separable_effects: treatment components must be 0 or 1");
    }
    const std::uint64_t n_blocks = (n + detail::kMcBlock - 1) / detail::kMcBlock;
    std::vector<double> partial(n_blocks, 0.0);
    parallel_for_blocks(n_blocks, jobs, [&](std::uint64_t b) {
        double s = 0.0;
        const std::uint64_t lo = b * detail::kMcBlock;
        const std::uint64_t hi = std::min(n, lo + detail::kMcBlock);
        for (std::uint64_t i = lo; i < hi; ++i) {
            SplitMix64 stream = substream(seed, i);
            const CounterfactualUnit u = sample_unit(cfg, stream);
            const int m = a_m ? u.m1 : u.m0;
            s += u.y_am[a_y][m];
        }
        partial[b] = s;
    });
    double total = 0.0;
    for (const double s : partial) {
        total += s;
    }
    return total / static_cast<double>(n);
}

} // namespace crossworld
