#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "normcite/corpus.hpp"
#include "normcite/indicators.hpp"
#include "normcite/intervals.hpp"

namespace normcite {

struct BootstrapSpec {
    std::size_t iterations = 1000;
    std::uint64_t seed = 0;
    /// Resample world cells too (baselines are then recomputed per replicate).
    bool resample_world = true;
    double alpha = 0.05;
    /// Worker threads; 0 picks the hardware concurrency. Output never depends on it.
    unsigned threads = 1;

    void validate() const;
};

/// Replicate budget used when none is given: 1000 for mean indicators,
/// 10000 for proportion indicators.
std::size_t default_iterations(Indicator indicator);

struct BootstrapResult {
    IntervalEstimate interval;
    /// Defined replicate estimates, ascending.
    std::vector<double> replicates;
    std::size_t undefined_replicates = 0;
};

/// Nearest-rank percentile of an ascending sample: element ceil(q N) - 1,
/// clamped to the valid range. Throws std::invalid_argument on empty input.
double percentile(std::span<const double> sorted, double q);

/// Percentile bootstrap of an indicator over a slice.
///
/// Each replicate resamples every group cell with replacement at its own size
/// (and every world cell when `resample_world`), then re-evaluates the
/// indicator. Replicate r draws from substream(seed, r), so the result does not
/// depend on thread count. Cells are sorted before resampling, which makes the
/// result invariant to article order. Undefined replicates are dropped; if
/// they exceed alpha/2 of the total the interval is flagged undefined.
BootstrapResult bootstrap_indicator(std::span<const CellPair> slice, Indicator indicator,
                                    const std::string& group, const BootstrapSpec& spec);

/// Percentile bootstrap of a plain mean, using the same replicate streams as
/// bootstrap_indicator (the first cell's draws).
BootstrapResult bootstrap_mean(std::span<const double> values, const BootstrapSpec& spec);

enum class WidthBasis { Full, Half };

/// Signed half-width differences between a formula and a bootstrap interval,
///   lower = ((point - formula.lower) - (point - boot.lower)) / basis
///   upper = ((formula.upper - point) - (boot.upper - point)) / basis
/// Positive means the formula side is wider than the bootstrap side. The basis
/// is the full bootstrap width, or that side's bootstrap half-width.
struct CiComparison {
    double lower_pct_diff = 0.0;
    double upper_pct_diff = 0.0;
    double basis_lower = 0.0;
    double basis_upper = 0.0;
};

/// Throws std::invalid_argument when either interval is undefined and
/// std::domain_error when the bootstrap basis has zero width.
CiComparison compare_ci(const IntervalEstimate& formula, const IntervalEstimate& boot, double point,
                        WidthBasis basis = WidthBasis::Full);

struct ComparisonScenario {
    std::string source;  ///< aggregation label (e.g. "lognormal grid")
    std::string label;   ///< scenario label within the source
    Corpus corpus;
};

enum class WorldResampling { Auto, On, Off };

struct ComparisonOptions {
    std::vector<Indicator> indicators{Indicator::MNLCS};
    double alpha = 0.05;
    /// 0 selects default_iterations() per indicator.
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
    /// Auto: off for mean indicators (dataset-only resampling), on for
    /// proportion indicators.
    WorldResampling resample_world = WorldResampling::Auto;
    WidthBasis basis = WidthBasis::Full;
    Continuity continuity = Continuity::Auto;
    unsigned threads = 0;
};

struct ComparisonRow {
    std::string source;
    std::string scenario;
    std::string group;
    std::string scope;
    std::size_t n = 0;
    Indicator indicator = Indicator::MNLCS;
    double point = 0.0;
    IntervalEstimate formula;
    IntervalEstimate boot;
    bool defined = false;  ///< false leaves a gap in the summary
    CiComparison diff;
    std::string note;
};

struct ComparisonSummary {
    std::string source;
    Indicator indicator = Indicator::MNLCS;
    std::string transform;  ///< "ln(1+x)", "x", "z", "proportion"
    std::size_t datasets = 0;
    std::size_t gaps = 0;
    double lower_avg = 0.0;
    double upper_avg = 0.0;
    double lower_abs_avg = 0.0;
    double upper_abs_avg = 0.0;
    double lower_max = 0.0;  ///< largest absolute difference
    double upper_max = 0.0;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
    std::vector<ComparisonSummary> summaries;
};

std::string transform_label(Indicator indicator);

/// Formula-vs-bootstrap comparison over every dataset of every scenario.
/// Mean indicators are compared per cell (each group, WORLD included, in each
/// field/year); proportion indicators per year and over all years.
ComparisonTable comparison_suite(std::span<const ComparisonScenario> scenarios,
                                 const ComparisonOptions& options);

/// Aggregates defined rows per (source, indicator).
std::vector<ComparisonSummary> summarize_comparisons(std::span<const ComparisonRow> rows);

}  // namespace normcite
