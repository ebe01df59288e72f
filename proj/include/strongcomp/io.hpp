#pragma once

#include "strongcomp/analysis.hpp"
#include "strongcomp/grid.hpp"
#include "strongcomp/model.hpp"
#include "strongcomp/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace strongcomp {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SnapshotError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// How the initial state of a run is built.
///   constant: u and w (one value per component, or one value broadcast)
///   bumps:    Gaussian bumps amplitude·exp(−|x−c|²/(2 width²)) on constant u;
///             with mirror = true the second half of the components are exact
///             x-reflections of the first half
///   random:   smooth random cosine series, one state per seed
///   snapshot: read from a snapshot file
struct InitialSpec {
    std::string kind = "constant";
    double u = 1.0;
    std::vector<double> w{0.1};
    std::vector<std::vector<double>> centers;
    std::vector<double> amplitudes;
    double width = 0.1;
    bool mirror = false;
    std::vector<std::uint64_t> seeds{1};
    double amplitude = 1.0;
    std::string path;
};

struct AnalysisSpec {
    double alpha = 0.5;
    std::optional<double> threshold;  ///< absent → 0.01 · max ‖w_i‖_sup
    std::vector<double> decay_center;
    double decay_rho = 0.2;
    std::size_t decay_component = 0;
    std::size_t test_functions = 20;
    std::uint64_t seed = 1;
    std::size_t max_pairs = default_max_pairs;
    std::string snapshot;  ///< analyze/eig input; empty → <out>/snapshot.tsv
};

struct ConfigDocument {
    ModelParams model;
    Grid grid = Grid::interval(1.0, 201);
    SolveSettings solve;
    std::vector<double> betas;  ///< continuation schedule (expanded)
    AnalysisSpec analysis;
    InitialSpec initial;
    Admissibility admissibility;
    std::vector<std::string> warnings;
};

/// Parses a JSON config. Overrides ("section.key=value" or a bare key that
/// is unique across sections) are applied to the document before it is
/// interpreted. Unknown keys, type mismatches and syntax errors throw
/// ConfigError; inadmissible parameters only add a warning.
ConfigDocument parse_config(std::string_view text, const std::vector<std::string>& overrides = {});
ConfigDocument load_config(const std::filesystem::path& path,
                           const std::vector<std::string>& overrides = {});

FieldSet build_initial_state(const ConfigDocument& config, std::uint64_t seed);

nlohmann::ordered_json model_to_json(const ModelParams& params);
ModelParams model_from_json(const nlohmann::json& j);
nlohmann::ordered_json grid_to_json(const Grid& grid);
Grid grid_from_json(const nlohmann::json& j);

inline constexpr int snapshot_version = 1;

struct SnapshotMeta {
    ModelParams params;
    double beta = 0.0;
    double residual = 0.0;
    std::string timestamp = "unset";
};

struct Snapshot {
    FieldSet state;
    SnapshotMeta meta;
};

/// Text snapshot: '#'-prefixed header (version, params, grid, beta, residual,
/// timestamp, rows, columns) then one tab-separated row per node with
/// columns x[, y], u, w_1 … w_N at 17 significant digits.
void write_snapshot(const FieldSet& state, const SnapshotMeta& meta,
                    const std::filesystem::path& path);
std::string snapshot_to_string(const FieldSet& state, const SnapshotMeta& meta);
Snapshot read_snapshot(const std::filesystem::path& path);
Snapshot snapshot_from_string(std::string_view text);

/// Flat table: tab-delimited, a single '#'-prefixed header line.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::string str() const;
};

enum class ReportFormat { table, structured };

std::string format_number(double v);

/// Wall-clock times are never serialized, so identical runs give identical files.
Table to_table(const BoundReport& r);
Table to_table(const SegregationReport& r);
Table to_table(const SolveReport& r);
Table to_table(const std::vector<FaberKrahnRecord>& r);
Table to_table(const DecayFit& r);
Table to_table(const ComplementarityReport& r);
Table to_table(const SurvivorReport& r);
Table to_table(const IsolationReport& r);
Table to_table(const Table& t);

nlohmann::ordered_json to_structured(const BoundReport& r);
nlohmann::ordered_json to_structured(const SegregationReport& r);
nlohmann::ordered_json to_structured(const SolveReport& r);
nlohmann::ordered_json to_structured(const std::vector<FaberKrahnRecord>& r);
nlohmann::ordered_json to_structured(const DecayFit& r);
nlohmann::ordered_json to_structured(const ComplementarityReport& r);
nlohmann::ordered_json to_structured(const SurvivorReport& r);
nlohmann::ordered_json to_structured(const IsolationReport& r);
nlohmann::ordered_json to_structured(const Table& t);

/// Per-β rows (β, overlap_i_j, scaled_overlap_i_j for i<j).
Table overlap_table(const ContinuationTrace& trace, const ModelParams& params);
/// Per-β rows of holder_seminorm(w_i, α) for every component.
Table holder_table(const ContinuationTrace& trace, double alpha,
                   std::size_t max_pairs = default_max_pairs);
/// Per-β solve diagnostics.
Table continuation_table(const ContinuationTrace& trace);

void write_text_file(const std::filesystem::path& path, const std::string& text);

template <typename Report>
void write_report(const Report& report, const std::filesystem::path& path, ReportFormat format) {
    if (format == ReportFormat::table)
        write_text_file(path, to_table(report).str());
    else
        write_text_file(path, to_structured(report).dump(2) + "\n");
}

}  // namespace strongcomp
