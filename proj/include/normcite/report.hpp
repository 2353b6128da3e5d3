#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "normcite/bootstrap.hpp"
#include "normcite/corpus.hpp"
#include "normcite/indicators.hpp"
#include "normcite/intervals.hpp"

namespace normcite {

enum class CiSelection { Formula, Fieller, Bootstrap, All };

std::string_view to_string(CiSelection ci);
CiSelection parse_ci_selection(std::string_view text);

struct ReportConfig {
    std::vector<Indicator> indicators{Indicator::MNLCS, Indicator::MNCS,       Indicator::LUNDBERG_Z,
                                      Indicator::EMNPC, Indicator::MNPC,       Indicator::PROP_CITED,
                                      Indicator::EQ_PROP_CITED};
    CiSelection ci = CiSelection::Formula;
    double alpha = 0.05;
    /// 0 selects default_iterations() per indicator.
    std::size_t bootstrap_iters = 0;
    std::uint64_t seed = 1;
    Continuity continuity = Continuity::Auto;
    ExpansionMode expansion = ExpansionMode::Literal;
    /// Applied to EMNPC and EQ_PROP_CITED group rows; none when unset.
    std::optional<ExclusionPolicy> exclusion = ExclusionPolicy{};
    unsigned threads = 0;

    void validate() const;
};

struct ReportRow {
    std::string group;
    std::string scope;  ///< "Y<year>" or "ALL"
    std::size_t n = 0;
    std::string indicator;
    std::optional<double> estimate;
    std::optional<double> lower;
    std::optional<double> upper;
    std::string method;
    bool defined = false;  ///< estimate and both limits present
    std::string notes;
};

struct IndicatorReport {
    std::vector<ReportRow> rows;
    nlohmann::json metadata;
};

/// One row per (group, scope, indicator, interval method). Scopes are each
/// year (all fields combined) and ALL; WORLD rows are included. Undefined
/// results are flagged in their rows and never abort the report.
IndicatorReport build_report(const Corpus& corpus, const ReportConfig& config);

inline constexpr const char* kCsvHeader =
    "group,scope,n,indicator,estimate,ci_lower,ci_upper,method,defined,notes";

/// Six significant digits, trailing zeros kept ("1.08952", "1.00000").
std::string format_number(double value);

/// CSV text: stable (group, scope, indicator, method) order, LF endings,
/// RFC-4180 quoting, empty fields for missing values.
std::string to_csv(const IndicatorReport& report);
void write_csv(const IndicatorReport& report, const std::filesystem::path& path);
std::vector<ReportRow> parse_csv(const std::string& text);
std::vector<ReportRow> read_csv(const std::filesystem::path& path);

/// Pretty JSON of the run configuration, next to the CSV.
void write_metadata(const IndicatorReport& report, const std::filesystem::path& path);

/// RFC-4180 helpers shared with the comparison tables.
std::string csv_escape(const std::string& field);
std::vector<std::vector<std::string>> parse_csv_records(const std::string& text);

}  // namespace normcite
