#pragma once

// Experiment configs, the trial runner behind the CLI, CSV export and the
// plain graymap diagrams.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mulimit/analyzer.hpp"
#include "mulimit/construction.hpp"
#include "mulimit/generators.hpp"
#include "mulimit/rational.hpp"

namespace mulimit {

enum class Mode { ConstructRun, MaxFixture, Oracle };
const char* mode_name(Mode m);

struct ExperimentConfig {
    Mode mode = Mode::ConstructRun;
    std::size_t N = 1024;
    std::uint64_t T = 1000;
    std::size_t trials = 1;
    std::uint64_t seed = 1;
    double star_density = 0.05;
    FamilySpec family;
    std::vector<std::string> queries;
    std::size_t stride = 10;
    std::string out = "out";
    bool diagram = false;
    std::optional<std::uint64_t> transient; // empty: automatic
    Rational inner_speed{1, 2};
    unsigned workspace_constant = 3;
    // oracle mode
    std::string rule = "max";
    std::string word = "0";
    std::size_t n = 0;

    void validate() const;
    ConstructionParams construction_params() const;
    /// Alphabet in which queries are written for this mode.
    Alphabet query_alphabet() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// `key = value` lines, `#` comments, `[family.N]` sections (N = 1, 2, ...).
/// Syntax problems and unknown keys raise ParseError, bad values ValidationError.
ExperimentConfig parse_config(std::string_view text);
std::string render_config(const ExperimentConfig& config);

struct TrialResult {
    std::vector<DensitySeries> densities;
    std::vector<SegmentStats> segments; // construct-run only
    std::optional<std::uint64_t> quiescence;
    std::int64_t worst_workspace_slack = 0;
    std::uint64_t sharp_created = 0;
    std::uint64_t sharp_late = 0; // created after partner_distance * K_c
    std::uint64_t merges = 0;
};

TrialResult run_trial(const ExperimentConfig& config, std::size_t trial);

struct SeriesSummary {
    std::string name;
    std::map<std::uint64_t, double> mean; // time -> mean over trials
};

struct ExperimentResult {
    Alphabet alphabet; // of the query words
    std::vector<TrialResult> trials;
    std::vector<DensitySeries> densities; // averaged over trials
    std::vector<Verdict> verdicts;
    std::uint64_t transient = 0;
    /// Averaged segment series: "sharp", "out_of_segment", "compute", "sep1",
    /// "sep2" and one entry per size bucket.
    std::vector<SeriesSummary> segment_series;

    const SeriesSummary* series(const std::string& name) const;
};

/// Runs all trials (concurrently when `workers` > 1; results do not depend on it).
ExperimentResult run_experiment(const ExperimentConfig& config, unsigned workers = 0);

/// densities.csv, segments.csv, verdicts.csv in `dir`.
void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

// Diagrams. Palette v1: blank 255, # 0, # with L 16, with R 24, with both 8,
// * 32, counter tokens 64, $1 96, probes 112, $2 128, compute 176, output
// symbol i 192 + 8i (i < 8). Rule fixtures map symbol i of q to 255 - 255i/(q-1).
inline constexpr int kPaletteVersion = 1;
std::uint8_t palette_level(const CellState& cell);
std::uint8_t palette_level(Symbol s, std::size_t alphabet_size);

/// Writes the P2 graymap of trial `trial` (rows t = 0..T).
void write_diagram(const ExperimentConfig& config, std::size_t trial, std::ostream& out);

struct OracleOutput {
    std::uint64_t count = 0;
    std::uint64_t total = 0;
    double ratio = 0;
    std::string line; // "count total ratio"
};
OracleOutput run_oracle(const ExperimentConfig& config);

} // namespace mulimit
