#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "normcite/bootstrap.hpp"
#include "normcite/report.hpp"
#include "normcite/synthetic.hpp"

namespace normcite {

/// Command-line indicator names: mnlcs, mncs, lundberg, emnpc, mnpc, prop.
/// "prop" selects both PROP_CITED and EQ_PROP_CITED. Order follows the input,
/// duplicates dropped.
std::vector<Indicator> parse_cli_indicators(const std::vector<std::string>& names);

struct RunConfig {
    std::filesystem::path input_dir;
    ReportConfig report;
    std::optional<std::size_t> sample_size;
    std::optional<std::size_t> world_sample_size;
    std::filesystem::path output;
};

struct SampleConfig {
    std::filesystem::path input_dir;
    std::size_t sample_size = 500;
    std::optional<std::size_t> world_sample_size;
    std::uint64_t seed = 1;
    std::filesystem::path output_dir;
};

struct SimulateConfig {
    ScenarioGridSpec grid;
    std::filesystem::path output_dir;
};

struct CompareConfig {
    /// Corpus directories; when empty the grid is generated instead.
    std::vector<std::filesystem::path> input_dirs;
    ScenarioGridSpec grid;
    std::string source = "synthetic";
    ComparisonOptions options;
    std::filesystem::path output;
};

/// Sidecar path for run metadata: `<output>.meta.json` with the extension replaced.
std::filesystem::path metadata_path(const std::filesystem::path& output);
/// Per-dataset detail next to a comparison summary: `<output>.detail.csv`.
std::filesystem::path detail_path(const std::filesystem::path& output);

/// Each command returns a process exit status. Hard errors are reported on
/// `err` and give a non-zero status; undefined indicator values do not.
int cmd_compute(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_sample(const SampleConfig& config, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateConfig& config, std::ostream& out, std::ostream& err);
int cmd_compare_ci(const CompareConfig& config, std::ostream& out, std::ostream& err);

std::string comparison_summary_csv(const std::vector<ComparisonSummary>& summaries);
std::string comparison_detail_csv(const std::vector<ComparisonRow>& rows);

}  // namespace normcite
