// crossworld: simulate mediation models with a latent cross-world confounder,
// estimate natural effects, compute assumption-free NDE bounds, and sweep
// parameter grids for the g-formula's bias.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crossworld/crossworld.hpp"

namespace {

using namespace crossworld;

// Writes to stdout when path is "-" or empty, otherwise to the file.
class OutputTarget {
public:
    explicit OutputTarget(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) {
                throw IoError("cannot open for writing: " + path);
            }
            path_ = path;
        }
    }

    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

    void finish() {
        stream().flush();
        if (!stream()) {
            throw IoError("cannot write to " + (path_.empty() ? std::string("stdout") : path_));
        }
    }

private:
    std::ofstream file_;
    std::string path_;
};

ModelConfig require_model(const RunConfig& rc, const std::string& config_path) {
    if (!rc.model) {
        throw InvalidConfig("config " + config_path + " has no \"model\" section");
    }
    return *rc.model;
}

GridSpec require_grid(const RunConfig& rc, const std::string& config_path) {
    if (!rc.grid) {
        throw InvalidConfig("config " + config_path + " has no \"grid\" section");
    }
    return *rc.grid;
}

void emit_estimates(OutputTarget& out, const EffectEstimates& est, OutputFormat format) {
    if (format == OutputFormat::json_lines) {
        write_estimates_jsonl_stream(out.stream(), est);
    } else {
        write_estimates_stream(out.stream(), est);
    }
    out.finish();
}

void emit_bounds(OutputTarget& out, const NdeBounds& b, OutputFormat format) {
    std::ostream& os = out.stream();
    if (format == OutputFormat::json_lines) {
        nlohmann::json j{{"lower", b.lower},
                         {"upper", b.upper},
                         {"informative", b.informative},
                         {"contains_zero", b.contains_zero}};
        os << j.dump() << '\n';
    } else {
        os << "lower=" << detail::format_double(b.lower) << '\n'
           << "upper=" << detail::format_double(b.upper) << '\n'
           << "informative=" << (b.informative ? "true" : "false") << '\n'
           << "contains_zero=" << (b.contains_zero ? "true" : "false") << '\n';
    }
    out.finish();
}

void print_assoc(std::ostream& os, const std::string& name, const AssocStat& s, bool flagged) {
    os << name << ": stat=" << detail::format_double(s.stat)
       << " se=" << detail::format_double(s.se) << " n=" << s.n
       << (flagged ? " [VIOLATION]" : " [ok]") << '\n';
}

int run(int argc, char** argv) {
    CLI::App app{
        "crossworld: mediation effects, NDE bounds, assumption audits, and\n"
        "g-formula bias sweeps for a binary treatment/mediator model with a\n"
        "latent confounder shared across counterfactual worlds"};
    app.require_subcommand(1);

    // Common option storage; each subcommand binds the flags it uses.
    std::string config_path, data_path, out_path, method = "quadrature", format;
    std::uint64_t n = 0, seed = 1;
    int jobs = 0;
    bool with_cf = false;
    double threshold = 5.0;
    std::size_t points = 101;

    auto add_config = [&](CLI::App* cmd, bool required = true) {
        auto* opt = cmd->add_option("--config", config_path, "JSON configuration file");
        if (required) {
            opt->required();
        }
    };
    auto add_out = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_path, "output file ('-' = stdout)");
    };
    auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "output format: csv | jsonl (overrides config)");
    };
    auto add_seed = [&](CLI::App* cmd) { cmd->add_option("--seed", seed, "RNG seed"); };
    auto add_jobs = [&](CLI::App* cmd) {
        cmd->add_option("--jobs", jobs, "worker threads (0 = all cores)");
    };

    CLI::App* c_simulate =
        app.add_subcommand("simulate", "draw a factual dataset from a model config");
    add_config(c_simulate);
    c_simulate->add_option("--n", n, "number of rows")->default_val(1000);
    add_seed(c_simulate);
    add_out(c_simulate);
    c_simulate->add_flag("--cf", with_cf,
                         "include the simulated counterfactual columns (cf_*)");

    CLI::App* c_truth = app.add_subcommand(
        "truth", "true effects, g-formula estimand, and bias for a model config");
    add_config(c_truth);
    c_truth->add_option("--method", method, "quadrature | mc")->default_val("quadrature");
    c_truth->add_option("--n", n, "Monte Carlo sample size (mc method)")->default_val(1000000);
    add_seed(c_truth);
    add_jobs(c_truth);
    add_out(c_truth);
    add_format(c_truth);

    CLI::App* c_estimate =
        app.add_subcommand("estimate", "mediational g-formula estimates from A,M,Y data");
    c_estimate->add_option("--data", data_path, "input dataset (CSV: A,M,Y)")->required();
    add_out(c_estimate);
    add_format(c_estimate);

    CLI::App* c_bounds = app.add_subcommand(
        "bounds", "assumption-free NDE bounds from data or from a binary model config");
    c_bounds->add_option("--data", data_path, "input dataset (CSV: A,M,Y, binary Y)");
    add_config(c_bounds, /*required=*/false);
    add_out(c_bounds);
    add_format(c_bounds);

    CLI::App* c_lsem =
        app.add_subcommand("lsem", "fit the linear SEM (L~A; M~A,L; Y~A,L,M) and report "
                                   "the identified effects for a=1 vs a'=0");
    c_lsem->add_option("--data", data_path, "input dataset (CSV: A,L,M,Y)")->required();
    add_out(c_lsem);
    add_format(c_lsem);

    CLI::App* c_audit = app.add_subcommand(
        "audit", "simulate counterfactuals and probe the identification assumptions");
    add_config(c_audit);
    c_audit->add_option("--n", n, "number of simulated units")->default_val(100000);
    add_seed(c_audit);
    c_audit->add_option("--threshold", threshold, "flag checks above this many SEs")
        ->default_val(5.0);
    add_out(c_audit);
    add_format(c_audit);

    CLI::App* c_grid =
        app.add_subcommand("grid", "evaluate truth/estimand/bias/bounds over a parameter grid");
    add_config(c_grid);
    c_grid->add_option("--method", method, "quadrature | mc (overrides config)");
    add_jobs(c_grid);
    add_out(c_grid);
    add_format(c_grid);

    CLI::App* c_summarize =
        app.add_subcommand("summarize", "bias extremes and worst-case table from grid output");
    c_summarize->add_option("--data", data_path, "grid result CSV")->required();
    add_out(c_summarize);

    CLI::App* c_figure5 = app.add_subcommand(
        "figure5", "bias as a function of beta5, for beta3/beta4 at their grid extremes");
    add_config(c_figure5);
    c_figure5->add_option("--points", points, "sweep resolution")->default_val(101);
    add_out(c_figure5);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Usage problems exit 2; --help/--version exit 0.
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const auto parse_format = [&](OutputFormat fallback) {
        if (format.empty()) {
            return fallback;
        }
        if (format == "csv") {
            return OutputFormat::csv;
        }
        if (format == "jsonl") {
            return OutputFormat::json_lines;
        }
        throw InvalidConfig("--format must be csv or jsonl, got '" + format + "'");
    };

    if (c_simulate->parsed()) {
        const RunConfig rc = load_config(config_path);
        const ModelConfig cfg = validate_config(require_model(rc, config_path));
        if (n < 1) {
            throw InvalidConfig("simulate: --n must be >= 1");
        }
        ObservedDataset rows;
        rows.reserve(n);
        std::vector<CounterfactualUnit> units;
        if (with_cf) {
            units.reserve(n);
        }
        for (std::uint64_t i = 0; i < n; ++i) {
            SplitMix64 stream = substream(seed, i);
            const CounterfactualUnit unit = sample_unit(cfg, stream);
            const int a = stream.bernoulli(0.5);
            rows.push_back(project_factual(unit, a));
            if (with_cf) {
                units.push_back(unit);
            }
        }
        OutputTarget out(out_path);
        write_dataset_stream(out.stream(), rows, with_cf ? &units : nullptr);
        out.finish();
        return 0;
    }

    if (c_truth->parsed()) {
        const RunConfig rc = load_config(config_path);
        const ModelConfig cfg = validate_config(require_model(rc, config_path));
        OutputTarget out(out_path);
        const OutputFormat fmt = parse_format(rc.format);
        if (method == "quadrature") {
            const OracleReport rep = analytic_bias(cfg, rc.nodes);
            std::ostream& os = out.stream();
            if (fmt == OutputFormat::json_lines) {
                nlohmann::json j{{"truth_nde", rep.truth.nde},
                                 {"truth_nie", rep.truth.nie},
                                 {"truth_te", rep.truth.te},
                                 {"estimand_nde", rep.estimand.nde},
                                 {"estimand_nie", rep.estimand.nie},
                                 {"estimand_te", rep.estimand.te},
                                 {"bias_nde", rep.bias_nde},
                                 {"bias_nie", rep.bias_nie},
                                 {"gamma", rep.gamma},
                                 {"psi", rep.psi},
                                 {"ey_nested_true", rep.eta},
                                 {"ey_nested_gformula", rep.eta_prime},
                                 {"nodes", rc.nodes}};
                if (cfg.outcome_kind == OutcomeKind::binary) {
                    const NdeBounds b = bounds_from_model(cfg, rc.nodes);
                    j["bounds_lower"] = b.lower;
                    j["bounds_upper"] = b.upper;
                }
                os << j.dump() << '\n';
            } else {
                os << "truth_nde=" << detail::format_double(rep.truth.nde) << '\n'
                   << "truth_nie=" << detail::format_double(rep.truth.nie) << '\n'
                   << "truth_te=" << detail::format_double(rep.truth.te) << '\n'
                   << "estimand_nde=" << detail::format_double(rep.estimand.nde) << '\n'
                   << "estimand_nie=" << detail::format_double(rep.estimand.nie) << '\n'
                   << "estimand_te=" << detail::format_double(rep.estimand.te) << '\n'
                   << "bias_nde=" << detail::format_double(rep.bias_nde) << '\n'
                   << "bias_nie=" << detail::format_double(rep.bias_nie) << '\n'
                   << "gamma=" << detail::format_double(rep.gamma) << '\n'
                   << "psi=" << detail::format_double(rep.psi) << '\n'
                   << "ey_nested_true=" << detail::format_double(rep.eta) << '\n'
                   << "ey_nested_gformula=" << detail::format_double(rep.eta_prime) << '\n'
                   << "nodes=" << rc.nodes << '\n';
                if (cfg.outcome_kind == OutcomeKind::binary) {
                    const NdeBounds b = bounds_from_model(cfg, rc.nodes);
                    os << "bounds_lower=" << detail::format_double(b.lower) << '\n'
                       << "bounds_upper=" << detail::format_double(b.upper) << '\n';
                }
            }
            out.finish();
        } else if (method == "mc") {
            const EffectEstimates est = mc_true_effects(cfg, n, seed, jobs);
            emit_estimates(out, est, fmt);
        } else {
            throw InvalidConfig("truth: --method must be quadrature or mc, got '" + method + "'");
        }
        return 0;
    }

    if (c_estimate->parsed()) {
        const DatasetFile data = read_dataset(data_path);
        const EffectEstimates est = estimate_gformula(data.rows);
        OutputTarget out(out_path);
        std::cerr << "estimate: " << data.rows.size() << " rows, outcome="
                  << (data.kind == OutcomeKind::binary ? "binary" : "continuous") << '\n';
        emit_estimates(out, est, parse_format(OutputFormat::csv));
        return 0;
    }

    if (c_bounds->parsed()) {
        if (data_path.empty() == config_path.empty()) {
            throw InvalidConfig("bounds: pass exactly one of --data or --config");
        }
        NdeBounds b;
        if (!data_path.empty()) {
            b = bounds_from_data(read_dataset(data_path).rows);
        } else {
            const RunConfig rc = load_config(config_path);
            b = bounds_from_model(validate_config(require_model(rc, config_path)), rc.nodes);
        }
        OutputTarget out(out_path);
        emit_bounds(out, b, parse_format(OutputFormat::csv));
        return 0;
    }

    if (c_lsem->parsed()) {
        const LsemDataset data = read_lsem_dataset(data_path);
        const LsemCoefficients coef = fit_lsem(data);
        const EffectEstimates est = lsem_effects(coef, 1.0, 0.0);
        OutputTarget out(out_path);
        std::ostream& os = out.stream();
        const OutputFormat fmt = parse_format(OutputFormat::csv);
        if (fmt == OutputFormat::json_lines) {
            nlohmann::json j{{"alpha_A", coef.alpha_A},   {"beta_A", coef.beta_A},
                             {"beta_L", coef.beta_L},     {"theta_A", coef.theta_A},
                             {"theta_L", coef.theta_L},   {"theta_M", coef.theta_M},
                             {"nde", est.nde},            {"nie", est.nie},
                             {"te", est.te},              {"n", data.size()}};
            os << j.dump() << '\n';
        } else {
            os << "alpha_A=" << detail::format_double(coef.alpha_A) << '\n'
               << "beta_A=" << detail::format_double(coef.beta_A) << '\n'
               << "beta_L=" << detail::format_double(coef.beta_L) << '\n'
               << "theta_A=" << detail::format_double(coef.theta_A) << '\n'
               << "theta_L=" << detail::format_double(coef.theta_L) << '\n'
               << "theta_M=" << detail::format_double(coef.theta_M) << '\n';
            write_estimates_stream(os, est);
        }
        out.finish();
        return 0;
    }

    if (c_audit->parsed()) {
        const RunConfig rc = load_config(config_path);
        const ModelConfig cfg = validate_config(require_model(rc, config_path));
        const AuditReport rep = run_audit(cfg, n, seed, threshold);
        OutputTarget out(out_path);
        std::ostream& os = out.stream();
        if (parse_format(rc.format) == OutputFormat::json_lines) {
            nlohmann::json j{{"n", rep.n},
                             {"threshold", rep.threshold},
                             {"b_variation", rep.b_variation}};
            for (int m = 0; m < 2; ++m) {
                j["cw_assoc_m" + std::to_string(m)] =
                    nlohmann::json{{"stat", rep.cw_assoc[m].stat}, {"se", rep.cw_assoc[m].se}};
                j["de_gap_m" + std::to_string(m)] = nlohmann::json{
                    {"stat", rep.de_assump_gap[m].stat}, {"se", rep.de_assump_gap[m].se}};
            }
            nlohmann::json sw = nlohmann::json::object();
            for (const auto& [name, stat] : rep.sw_assoc) {
                sw[name] = nlohmann::json{{"stat", stat.stat}, {"se", stat.se}};
            }
            j["single_world"] = sw;
            nlohmann::json flags = nlohmann::json::object();
            for (const auto& [name, bad] : rep.flags) {
                flags[name] = bad;
            }
            j["flags"] = flags;
            os << j.dump() << '\n';
        } else {
            os << "n=" << rep.n << " threshold=" << detail::format_double(rep.threshold)
               << " SE\n";
            for (int m = 0; m < 2; ++m) {
                const std::string name = "cross-world: Y(1," + std::to_string(m) + ") vs M(0)";
                print_assoc(os, name, rep.cw_assoc[m], rep.flags.at(name));
            }
            for (const auto& [name, stat] : rep.sw_assoc) {
                print_assoc(os, "single-world: " + name, stat,
                            rep.flags.at("single-world: " + name));
            }
            os << "no additive interaction: b_variation="
               << detail::format_double(rep.b_variation)
               << (rep.flags.at("no additive interaction") ? " [VIOLATION]" : " [ok]") << '\n';
            for (int m = 0; m < 2; ++m) {
                const std::string name = "direct-effect assumption: m=" + std::to_string(m);
                print_assoc(os, name, rep.de_assump_gap[m], rep.flags.at(name));
            }
        }
        out.finish();
        return 0;
    }

    if (c_grid->parsed()) {
        const RunConfig rc = load_config(config_path);
        GridSpec spec = require_grid(rc, config_path);
        if (!method.empty() && c_grid->count("--method") > 0) {
            if (method == "quadrature") {
                spec.method = GridMethod::quadrature;
            } else if (method == "mc") {
                spec.method = GridMethod::monte_carlo;
            } else {
                throw InvalidConfig("grid: --method must be quadrature or mc, got '" + method +
                                    "'");
            }
        }
        if (c_grid->count("--jobs") > 0) {
            spec.parallelism = jobs;
        }
        std::cerr << "grid: " << grid_size(spec) << " settings, method="
                  << grid_method_name(spec.method) << ", jobs=" << resolve_jobs(spec.parallelism)
                  << '\n';
        const std::vector<GridResultRow> rows = run_grid(spec);
        std::cerr << "grid: done, writing " << rows.size() << " rows\n";
        OutputTarget out(out_path);
        if (parse_format(rc.format) == OutputFormat::csv) {
            write_grid_csv_stream(out.stream(), rows);
        } else {
            write_grid_jsonl_stream(out.stream(), rows);
        }
        out.finish();
        return 0;
    }

    if (c_summarize->parsed()) {
        const std::vector<GridResultRow> rows = read_grid_csv(data_path);
        const BiasSummary summary = summarize_bias(rows);
        OutputTarget out(out_path);
        write_summary_stream(out.stream(), summary);
        out.finish();
        return 0;
    }

    if (c_figure5->parsed()) {
        const RunConfig rc = load_config(config_path);
        const ModelConfig base = validate_config(require_model(rc, config_path));
        // beta3/beta4 extremes and the beta5 range come from the config's grid
        // section when present, else from the default grid for this outcome.
        const GridSpec ranges = rc.grid ? *rc.grid
                                : (base.outcome_kind == OutcomeKind::binary
                                       ? default_binary_grid()
                                       : default_continuous_grid());
        auto minmax = [](const std::vector<double>& v) {
            auto [lo, hi] = std::minmax_element(v.begin(), v.end());
            return std::vector<double>{*lo, *hi};
        };
        const auto [b5_lo, b5_hi] = std::minmax_element(ranges.beta5.begin(), ranges.beta5.end());
        const std::vector<Figure5Point> pts = figure5_slice(
            base, minmax(ranges.beta3), minmax(ranges.beta4), *b5_lo, *b5_hi, points, rc.nodes);
        OutputTarget out(out_path);
        write_figure5_csv_stream(out.stream(), pts);
        out.finish();
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const crossworld::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
