#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "crossworld/errors.hpp"
#include "crossworld/gformula.hpp"
#include "crossworld/grid.hpp"
#include "crossworld/lsem.hpp"
#include "crossworld/model.hpp"

namespace crossworld {

enum class OutputFormat { csv, json_lines };

// Parsed configuration file. A config may carry a model section, a grid
// section, or both; subcommands pick the section they need.
struct RunConfig {
    std::optional<ModelConfig> model;
    std::optional<GridSpec> grid;
    OutputFormat format = OutputFormat::csv;
    int nodes = 64;
};

// A dataset along with the outcome kind inferred from its Y column.
struct DatasetFile {
    ObservedDataset rows;
    OutcomeKind kind = OutcomeKind::binary;
};

namespace detail {

// Shortest decimal form that round-trips to the same double; "nan"/"inf" are
// never emitted because writers validate beforehand.
inline std::string format_double(double v) {
    std::array<char, 64> buf;
    const std::to_chars_result res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

inline double parse_double_field(const std::string& text, const char* column, std::size_t line) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    double value = 0.0;
    const std::from_chars_result res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end || text.empty()) {
        throw FormatError(std::string("line ") + std::to_string(line) + ": column " + column +
                          " has non-numeric value '" + text + "'");
    }
    return value;
}

inline int parse_binary_field(const std::string& text, const char* column, std::size_t line) {
    if (text == "0") {
        return 0;
    }
    if (text == "1") {
        return 1;
    }
    throw FormatError(std::string("line ") + std::to_string(line) + ": column " + column +
                      " must be 0 or 1, got '" + text + "'");
}

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) {
        ++b;
    }
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) {
        --e;
    }
    return s.substr(b, e - b);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        out.push_back(trim(field));
    }
    if (!line.empty() && line.back() == ',') {
        out.push_back("");
    }
    return out;
}

inline void require_keys(const nlohmann::json& obj, const char* where,
                         std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed) {
            if (item.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw SchemaError(std::string(where) + ": unknown key \"" + item.key() + "\"");
        }
    }
}

inline double json_number(const nlohmann::json& obj, const char* where, const std::string& key,
                          double fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    const nlohmann::json& v = obj.at(key);
    if (!v.is_number()) {
        throw SchemaError(std::string(where) + ": key \"" + key + "\" must be a number");
    }
    return v.get<double>();
}

inline std::uint64_t json_count(const nlohmann::json& obj, const char* where,
                                const std::string& key, std::uint64_t fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    const nlohmann::json& v = obj.at(key);
    if (!v.is_number_unsigned() && !v.is_number_integer()) {
        throw SchemaError(std::string(where) + ": key \"" + key +
                          "\" must be a non-negative integer");
    }
    if (v.is_number_integer() && v.get<std::int64_t>() < 0) {
        throw SchemaError(std::string(where) + ": key \"" + key +
                          "\" must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

inline bool json_bool(const nlohmann::json& obj, const char* where, const std::string& key,
                      bool fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    const nlohmann::json& v = obj.at(key);
    if (!v.is_boolean()) {
        throw SchemaError(std::string(where) + ": key \"" + key + "\" must be a boolean");
    }
    return v.get<bool>();
}

inline std::string json_string(const nlohmann::json& obj, const char* where,
                               const std::string& key, const std::string& fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    const nlohmann::json& v = obj.at(key);
    if (!v.is_string()) {
        throw SchemaError(std::string(where) + ": key \"" + key + "\" must be a string");
    }
    return v.get<std::string>();
}

inline OutcomeKind parse_outcome_kind(const std::string& s, const char* where) {
    if (s == "binary") {
        return OutcomeKind::binary;
    }
    if (s == "continuous") {
        return OutcomeKind::continuous;
    }
    throw SchemaError(std::string(where) +
                      ": \"outcome\" must be \"binary\" or \"continuous\", got \"" + s + "\"");
}

inline std::vector<double> json_number_list(const nlohmann::json& v, const char* where,
                                            const std::string& key) {
    if (!v.is_array() || v.empty()) {
        throw SchemaError(std::string(where) + ": key \"" + key +
                          "\" must be a non-empty array of numbers");
    }
    std::vector<double> out;
    out.reserve(v.size());
    for (const nlohmann::json& x : v) {
        if (!x.is_number()) {
            throw SchemaError(std::string(where) + ": key \"" + key +
                              "\" must contain numbers only");
        }
        out.push_back(x.get<double>());
    }
    return out;
}

inline ModelConfig parse_model_section(const nlohmann::json& obj) {
    if (!obj.is_object()) {
        throw SchemaError("config: \"model\" must be an object");
    }
    require_keys(obj, "model",
                 {"outcome", "alpha0", "alpha1", "alpha2", "beta0", "beta1", "beta2", "beta3",
                  "beta4", "beta5", "u_mean", "u_sd", "y_noise_sd", "coupling"});
    ModelConfig cfg;
    cfg.outcome_kind = parse_outcome_kind(json_string(obj, "model", "outcome", "binary"), "model");
    cfg.alpha0 = json_number(obj, "model", "alpha0", cfg.alpha0);
    cfg.alpha1 = json_number(obj, "model", "alpha1", cfg.alpha1);
    cfg.alpha2 = json_number(obj, "model", "alpha2", cfg.alpha2);
    cfg.beta0 = json_number(obj, "model", "beta0", cfg.beta0);
    cfg.beta1 = json_number(obj, "model", "beta1", cfg.beta1);
    cfg.beta2 = json_number(obj, "model", "beta2", cfg.beta2);
    cfg.beta3 = json_number(obj, "model", "beta3", cfg.beta3);
    cfg.beta4 = json_number(obj, "model", "beta4", cfg.beta4);
    cfg.beta5 = json_number(obj, "model", "beta5", cfg.beta5);
    cfg.u_mean = json_number(obj, "model", "u_mean", cfg.u_mean);
    cfg.u_sd = json_number(obj, "model", "u_sd", cfg.u_sd);
    cfg.y_noise_sd = json_number(obj, "model", "y_noise_sd", cfg.y_noise_sd);
    const std::string coupling = json_string(obj, "model", "coupling", "shared_noise");
    if (coupling == "shared_noise") {
        cfg.coupling = Coupling::shared_noise;
    } else if (coupling == "independent_redraw") {
        cfg.coupling = Coupling::independent_redraw;
    } else {
        throw SchemaError(
            "model: \"coupling\" must be \"shared_noise\" or \"independent_redraw\", got \"" +
            coupling + "\"");
    }
    return validate_config(cfg);
}

inline GridSpec parse_grid_section(const nlohmann::json& obj) {
    if (!obj.is_object()) {
        throw SchemaError("config: \"grid\" must be an object");
    }
    require_keys(obj, "grid",
                 {"defaults", "outcome", "alpha0", "alpha1", "alpha2", "beta0", "beta1", "beta2",
                  "beta3", "beta4", "beta5", "method", "mc_n", "base_seed", "parallelism",
                  "max_settings", "allow_big_mc", "quadrature_nodes"});

    GridSpec spec;
    const std::string defaults = json_string(obj, "grid", "defaults", "");
    if (defaults == "binary") {
        spec = default_binary_grid();
    } else if (defaults == "continuous") {
        spec = default_continuous_grid();
    } else if (!defaults.empty()) {
        throw SchemaError("grid: \"defaults\" must be \"binary\" or \"continuous\", got \"" +
                          defaults + "\"");
    }
    if (obj.contains("outcome")) {
        spec.outcome_kind = parse_outcome_kind(json_string(obj, "grid", "outcome", ""), "grid");
    } else if (defaults.empty()) {
        throw SchemaError("grid: \"outcome\" is required when \"defaults\" is not given");
    }

    const std::pair<const char*, std::vector<double>*> lists[] = {
        {"alpha0", &spec.alpha0}, {"alpha1", &spec.alpha1}, {"alpha2", &spec.alpha2},
        {"beta0", &spec.beta0},   {"beta1", &spec.beta1},   {"beta2", &spec.beta2},
        {"beta3", &spec.beta3},   {"beta4", &spec.beta4},   {"beta5", &spec.beta5}};
    for (const auto& [key, target] : lists) {
        if (obj.contains(key)) {
            *target = json_number_list(obj.at(key), "grid", key);
        } else if (defaults.empty()) {
            throw SchemaError(std::string("grid: value list \"") + key +
                              "\" is required when \"defaults\" is not given");
        }
    }

    const std::string method = json_string(obj, "grid", "method", "quadrature");
    if (method == "quadrature") {
        spec.method = GridMethod::quadrature;
    } else if (method == "monte_carlo") {
        spec.method = GridMethod::monte_carlo;
    } else {
        throw SchemaError("grid: \"method\" must be \"quadrature\" or \"monte_carlo\", got \"" +
                          method + "\"");
    }
    spec.mc_n = json_count(obj, "grid", "mc_n", spec.mc_n);
    spec.base_seed = json_count(obj, "grid", "base_seed", spec.base_seed);
    spec.parallelism = static_cast<int>(json_count(obj, "grid", "parallelism",
                                                   static_cast<std::uint64_t>(spec.parallelism)));
    spec.max_settings = json_count(obj, "grid", "max_settings", spec.max_settings);
    spec.allow_big_mc = json_bool(obj, "grid", "allow_big_mc", spec.allow_big_mc);
    spec.quadrature_nodes = static_cast<int>(
        json_count(obj, "grid", "quadrature_nodes",
                   static_cast<std::uint64_t>(spec.quadrature_nodes)));
    detail::validate_grid_lists(spec);
    return spec;
}

} // namespace detail

// Parses and validates a JSON configuration document. Top-level keys:
// "model", "grid", "format" ("csv" | "jsonl"), "nodes". Unknown keys anywhere
// are rejected by name.
inline RunConfig parse_config(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ParseError("config: top level must be a JSON object");
    }
    detail::require_keys(doc, "config", {"model", "grid", "format", "nodes"});

    RunConfig rc;
    if (doc.contains("model")) {
        rc.model = detail::parse_model_section(doc.at("model"));
    }
    if (doc.contains("grid")) {
        rc.grid = detail::parse_grid_section(doc.at("grid"));
    }
    const std::string format = detail::json_string(doc, "config", "format", "csv");
    if (format == "csv") {
        rc.format = OutputFormat::csv;
    } else if (format == "jsonl") {
        rc.format = OutputFormat::json_lines;
    } else {
        throw SchemaError("config: \"format\" must be \"csv\" or \"jsonl\", got \"" + format +
                          "\"");
    }
    rc.nodes = static_cast<int>(
        detail::json_count(doc, "config", "nodes", static_cast<std::uint64_t>(rc.nodes)));
    if (rc.nodes < 8) {
        throw InvalidConfig("config: \"nodes\" must be >= 8");
    }
    return rc;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open config file: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// Reads a factual dataset: a CSV whose header is exactly `A,M,Y`, with
// A,M in {0,1} and numeric Y. The outcome kind is inferred: binary iff every
// Y value is 0 or 1. Error messages cite 1-based file line numbers.
inline DatasetFile read_dataset_stream(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw EmptyFile("dataset: file is empty");
    }
    const std::vector<std::string> header = detail::split_csv_line(line);
    if (header.size() != 3 || header[0] != "A" || header[1] != "M" || header[2] != "Y") {
        throw FormatError("line 1: expected header A,M,Y");
    }

    DatasetFile out;
    bool all_binary = true;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue; // ignore trailing blank lines
        }
        const std::vector<std::string> f = detail::split_csv_line(line);
        if (f.size() != 3) {
            throw FormatError("line " + std::to_string(line_no) + ": expected 3 fields, got " +
                              std::to_string(f.size()));
        }
        ObservedRow row;
        row.a = detail::parse_binary_field(f[0], "A", line_no);
        row.m = detail::parse_binary_field(f[1], "M", line_no);
        row.y = detail::parse_double_field(f[2], "Y", line_no);
        if (!std::isfinite(row.y)) {
            throw FormatError("line " + std::to_string(line_no) + ": column Y must be finite");
        }
        if (row.y != 0.0 && row.y != 1.0) {
            all_binary = false;
        }
        out.rows.push_back(row);
    }
    if (out.rows.empty()) {
        throw EmptyFile("dataset: no data rows after the header");
    }
    out.kind = all_binary ? OutcomeKind::binary : OutcomeKind::continuous;
    return out;
}

inline DatasetFile read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open dataset: " + path);
    }
    return read_dataset_stream(in);
}

// Reads a four-column dataset for the linear-SEM fit: header `A,L,M,Y`,
// with A in {0,1} and numeric L, M, Y.
inline LsemDataset read_lsem_dataset_stream(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw EmptyFile("lsem dataset: file is empty");
    }
    const std::vector<std::string> header = detail::split_csv_line(line);
    if (header.size() != 4 || header[0] != "A" || header[1] != "L" || header[2] != "M" ||
        header[3] != "Y") {
        throw FormatError("line 1: expected header A,L,M,Y");
    }
    LsemDataset rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        const std::vector<std::string> f = detail::split_csv_line(line);
        if (f.size() != 4) {
            throw FormatError("line " + std::to_string(line_no) + ": expected 4 fields, got " +
                              std::to_string(f.size()));
        }
        LsemRow row;
        row.a = detail::parse_binary_field(f[0], "A", line_no);
        row.l = detail::parse_double_field(f[1], "L", line_no);
        row.m = detail::parse_double_field(f[2], "M", line_no);
        row.y = detail::parse_double_field(f[3], "Y", line_no);
        if (!std::isfinite(row.l) || !std::isfinite(row.m) || !std::isfinite(row.y)) {
            throw FormatError("line " + std::to_string(line_no) + ": values must be finite");
        }
        rows.push_back(row);
    }
    if (rows.empty()) {
        throw EmptyFile("lsem dataset: no data rows after the header");
    }
    return rows;
}

inline LsemDataset read_lsem_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open dataset: " + path);
    }
    return read_lsem_dataset_stream(in);
}

namespace detail {

inline void check_stream(const std::ostream& os, const std::string& path) {
    if (!os) {
        throw IoError("cannot write to " + (path.empty() ? std::string("stream") : path));
    }
}

} // namespace detail

// Writes the factual columns, plus the full counterfactual table when units
// are supplied (columns prefixed cf_; cf_yAM is Y(A=a,M=m)). Counterfactual
// columns only ever come from simulation.
inline void write_dataset_stream(std::ostream& os, const ObservedDataset& rows,
                                 const std::vector<CounterfactualUnit>* units = nullptr) {
    if (units != nullptr && units->size() != rows.size()) {
        throw InvalidInput("write_dataset: counterfactual units do not match rows");
    }
    os << (units ? "A,M,Y,cf_u,cf_m0,cf_m1,cf_y00,cf_y01,cf_y10,cf_y11\n" : "A,M,Y\n");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const ObservedRow& r = rows[i];
        os << r.a << ',' << r.m << ',' << detail::format_double(r.y);
        if (units) {
            const CounterfactualUnit& u = (*units)[i];
            os << ',' << detail::format_double(u.u) << ',' << u.m0 << ',' << u.m1;
            for (int a = 0; a < 2; ++a) {
                for (int m = 0; m < 2; ++m) {
                    os << ',' << detail::format_double(u.y_am[a][m]);
                }
            }
        }
        os << '\n';
    }
}

inline void write_dataset(const std::string& path, const ObservedDataset& rows,
                          const std::vector<CounterfactualUnit>* units = nullptr) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw IoError("cannot open for writing: " + path);
    }
    write_dataset_stream(os, rows, units);
    os.flush();
    detail::check_stream(os, path);
}

inline constexpr const char* kGridCsvHeader =
    "index,alpha0,alpha1,alpha2,beta0,beta1,beta2,beta3,beta4,beta5,"
    "true_nde,true_nie,est_nde,est_nie,bias_nde,bias_nie,bounds_lower,bounds_upper,method";

inline void write_grid_csv_stream(std::ostream& os, const std::vector<GridResultRow>& rows) {
    os << kGridCsvHeader << '\n';
    for (const GridResultRow& r : rows) {
        os << r.index;
        for (double v : {r.alpha0, r.alpha1, r.alpha2, r.beta0, r.beta1, r.beta2, r.beta3,
                         r.beta4, r.beta5, r.true_nde, r.true_nie, r.est_nde, r.est_nie,
                         r.bias_nde, r.bias_nie}) {
            os << ',' << detail::format_double(v);
        }
        os << ',' << (r.bounds_lower ? detail::format_double(*r.bounds_lower) : "");
        os << ',' << (r.bounds_upper ? detail::format_double(*r.bounds_upper) : "");
        os << ',' << grid_method_name(r.method) << '\n';
    }
}

inline void write_grid_jsonl_stream(std::ostream& os, const std::vector<GridResultRow>& rows) {
    for (const GridResultRow& r : rows) {
        nlohmann::json j{{"index", r.index},       {"alpha0", r.alpha0},
                         {"alpha1", r.alpha1},     {"alpha2", r.alpha2},
                         {"beta0", r.beta0},       {"beta1", r.beta1},
                         {"beta2", r.beta2},       {"beta3", r.beta3},
                         {"beta4", r.beta4},       {"beta5", r.beta5},
                         {"true_nde", r.true_nde}, {"true_nie", r.true_nie},
                         {"est_nde", r.est_nde},   {"est_nie", r.est_nie},
                         {"bias_nde", r.bias_nde}, {"bias_nie", r.bias_nie},
                         {"method", grid_method_name(r.method)}};
        j["bounds_lower"] = r.bounds_lower ? nlohmann::json(*r.bounds_lower) : nlohmann::json();
        j["bounds_upper"] = r.bounds_upper ? nlohmann::json(*r.bounds_upper) : nlohmann::json();
        os << j.dump() << '\n';
    }
}

inline void write_grid_rows(const std::string& path, const std::vector<GridResultRow>& rows,
                            OutputFormat format) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw IoError("cannot open for writing: " + path);
    }
    if (format == OutputFormat::csv) {
        write_grid_csv_stream(os, rows);
    } else {
        write_grid_jsonl_stream(os, rows);
    }
    os.flush();
    detail::check_stream(os, path);
}

// Reads rows previously written by write_grid_csv_stream (used by the
// summarize subcommand).
inline std::vector<GridResultRow> read_grid_csv_stream(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw EmptyFile("grid csv: file is empty");
    }
    if (detail::trim(line) != kGridCsvHeader) {
        throw FormatError("line 1: not a grid result header");
    }
    std::vector<GridResultRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        const std::vector<std::string> f = detail::split_csv_line(line);
        if (f.size() != 19) {
            throw FormatError("line " + std::to_string(line_no) + ": expected 19 fields, got " +
                              std::to_string(f.size()));
        }
        GridResultRow r;
        r.index = static_cast<std::uint64_t>(
            detail::parse_double_field(f[0], "index", line_no));
        double* nums[] = {&r.alpha0,   &r.alpha1,   &r.alpha2,  &r.beta0,    &r.beta1,
                          &r.beta2,    &r.beta3,    &r.beta4,   &r.beta5,    &r.true_nde,
                          &r.true_nie, &r.est_nde,  &r.est_nie, &r.bias_nde, &r.bias_nie};
        const char* names[] = {"alpha0",   "alpha1",   "alpha2",  "beta0",    "beta1",
                               "beta2",    "beta3",    "beta4",   "beta5",    "true_nde",
                               "true_nie", "est_nde",  "est_nie", "bias_nde", "bias_nie"};
        for (int i = 0; i < 15; ++i) {
            *nums[i] = detail::parse_double_field(f[i + 1], names[i], line_no);
        }
        if (!f[16].empty()) {
            r.bounds_lower = detail::parse_double_field(f[16], "bounds_lower", line_no);
        }
        if (!f[17].empty()) {
            r.bounds_upper = detail::parse_double_field(f[17], "bounds_upper", line_no);
        }
        if (f[18] == "quadrature") {
            r.method = GridMethod::quadrature;
        } else if (f[18] == "monte_carlo") {
            r.method = GridMethod::monte_carlo;
        } else {
            throw FormatError("line " + std::to_string(line_no) + ": unknown method '" + f[18] +
                              "'");
        }
        rows.push_back(r);
    }
    if (rows.empty()) {
        throw EmptyFile("grid csv: no data rows after the header");
    }
    return rows;
}

inline std::vector<GridResultRow> read_grid_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open grid csv: " + path);
    }
    return read_grid_csv_stream(in);
}

// Point estimates as stable key=value lines.
inline void write_estimates_stream(std::ostream& os, const EffectEstimates& est) {
    os << "nde=" << detail::format_double(est.nde) << '\n';
    os << "nie=" << detail::format_double(est.nie) << '\n';
    os << "te=" << detail::format_double(est.te) << '\n';
    os << "ey_nested=" << detail::format_double(est.ey_nested) << '\n';
    os << "method=" << effect_method_name(est.method) << '\n';
    os << "n_or_nodes=" << est.n_or_nodes << '\n';
    if (est.mc_se) {
        os << "mc_se=" << detail::format_double(*est.mc_se) << '\n';
    }
}

inline void write_estimates_jsonl_stream(std::ostream& os, const EffectEstimates& est) {
    nlohmann::json j{{"nde", est.nde},
                     {"nie", est.nie},
                     {"te", est.te},
                     {"ey_nested", est.ey_nested},
                     {"method", effect_method_name(est.method)},
                     {"n_or_nodes", est.n_or_nodes}};
    if (est.mc_se) {
        j["mc_se"] = *est.mc_se;
    }
    os << j.dump() << '\n';
}

namespace detail {

inline void write_extremes_block(std::ostream& os, const char* label, const BiasExtremes& e) {
    os << label << ": n=" << e.count << " min_bias=" << format_double(e.min_bias) << " (setting "
       << e.min_index << ")"
       << " max_bias=" << format_double(e.max_bias) << " (setting " << e.max_index << ")"
       << " max|bias|=" << format_double(e.max_abs_bias) << " (setting " << e.max_abs_index
       << ")\n";
}

inline void write_worst_row(std::ostream& os, const char* label, const GridResultRow& r) {
    os << label << ": setting " << r.index << "\n  parameters: alpha0=" << format_double(r.alpha0)
       << " alpha1=" << format_double(r.alpha1) << " alpha2=" << format_double(r.alpha2)
       << " beta0=" << format_double(r.beta0) << " beta1=" << format_double(r.beta1)
       << " beta2=" << format_double(r.beta2) << " beta3=" << format_double(r.beta3)
       << " beta4=" << format_double(r.beta4) << " beta5=" << format_double(r.beta5)
       << "\n  true_nde=" << format_double(r.true_nde) << " est_nde=" << format_double(r.est_nde)
       << " bias_nde=" << format_double(r.bias_nde);
    if (r.bounds_lower && r.bounds_upper) {
        os << " bounds=(" << format_double(*r.bounds_lower) << ", "
           << format_double(*r.bounds_upper) << ")";
    }
    os << '\n';
}

} // namespace detail

// Human-readable summary block: stratified bias extremes, the two extreme
// settings with their bounds, and the per-(beta4,beta5) worst |bias| table.
inline void write_summary_stream(std::ostream& os, const BiasSummary& s) {
    detail::write_extremes_block(os, "overall", s.overall);
    if (s.beta5_zero.count > 0) {
        detail::write_extremes_block(os, "beta5=0", s.beta5_zero);
    }
    if (s.beta5_nonzero.count > 0) {
        detail::write_extremes_block(os, "beta5!=0", s.beta5_nonzero);
    }
    detail::write_worst_row(os, "most negative bias", s.most_negative);
    detail::write_worst_row(os, "most positive bias", s.most_positive);
    os << "max |bias_nde| by (beta4, beta5):\n";
    for (const InteractionCell& c : s.interaction_table) {
        os << "  beta4=" << detail::format_double(c.beta4)
           << " beta5=" << detail::format_double(c.beta5)
           << " max|bias|=" << detail::format_double(c.max_abs_bias) << " (" << c.count
           << " settings)\n";
    }
}

inline void write_figure5_csv_stream(std::ostream& os, const std::vector<Figure5Point>& points) {
    os << "beta5,beta3,beta4,bias_nde\n";
    for (const Figure5Point& p : points) {
        os << detail::format_double(p.beta5) << ',' << detail::format_double(p.beta3) << ','
           << detail::format_double(p.beta4) << ',' << detail::format_double(p.bias_nde) << '\n';
    }
}

inline void write_figure5_csv(const std::string& path, const std::vector<Figure5Point>& points) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw IoError("cannot open for writing: " + path);
    }
    write_figure5_csv_stream(os, points);
    os.flush();
    detail::check_stream(os, path);
}

} // namespace crossworld
