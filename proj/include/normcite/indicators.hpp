#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "normcite/corpus.hpp"

namespace normcite {

/// Raised when an indicator cannot be normalised (e.g. an all-zero world cell).
class UndefinedIndicator : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

enum class Indicator { MNLCS, MNCS, LUNDBERG_Z, EMNPC, MNPC, PROP_CITED, EQ_PROP_CITED };

std::string_view to_string(Indicator indicator);
/// Accepts the upper-case tags ("MNLCS", "EQ_PROP_CITED", ...).
Indicator parse_indicator(std::string_view tag);
/// Proportion-type indicators use the larger default bootstrap budget.
bool is_proportion_indicator(Indicator indicator);

enum class Transform { LogRatio, RawRatio, ZScore, CitedReciprocal };

/// World statistics for one field/year cell.
struct NormalizationBaseline {
    FieldYearKey key;
    double log_mean = 0.0;  ///< mean of ln(1+c)
    double log_sd = 0.0;    ///< sample sd of ln(1+c); NaN when n_world < 2
    double raw_mean = 0.0;
    double prop_cited = 0.0;
    std::size_t n_world = 0;
};

NormalizationBaseline compute_baseline(const FieldYearKey& key, std::span<const Count> world);
/// Requires world.group == WORLD.
NormalizationBaseline compute_baseline(const ArticleSet& world);

struct NormalizedScores {
    std::string group;
    FieldYearKey key;
    std::vector<double> values;
    Transform transform = Transform::LogRatio;
};

std::vector<double> log_ratio_scores(std::span<const Count> counts, const NormalizationBaseline& b);
std::vector<double> z_scores(std::span<const Count> counts, const NormalizationBaseline& b);
std::vector<double> raw_ratio_scores(std::span<const Count> counts, const NormalizationBaseline& b);
std::vector<double> cited_reciprocal_scores(std::span<const Count> counts,
                                            const NormalizationBaseline& b);

/// ln(1+c)/l for each article. Throws UndefinedIndicator when l = 0.
NormalizedScores normalize_log(const ArticleSet& set, const NormalizationBaseline& baseline);
/// (ln(1+c) - l)/s. Throws UndefinedIndicator when s is zero or undefined.
NormalizedScores normalize_lundberg(const ArticleSet& set, const NormalizationBaseline& baseline);
/// c / world mean count. Throws UndefinedIndicator when the world mean is zero.
NormalizedScores normalize_raw(const ArticleSet& set, const NormalizationBaseline& baseline);
/// 0 for uncited articles, 1/p_w for cited ones. Throws UndefinedIndicator when p_w = 0.
NormalizedScores normalize_cited(const ArticleSet& set, const NormalizationBaseline& baseline);

struct ProportionSummary {
    std::string group;
    FieldYearKey key;
    std::uint64_t cited = 0;
    std::uint64_t total = 0;

    double proportion() const { return static_cast<double>(cited) / static_cast<double>(total); }
};

ProportionSummary summarize_proportion(const std::string& group, const FieldYearKey& key,
                                       std::span<const Count> counts);
ProportionSummary summarize_proportion(const ArticleSet& set);

struct IndicatorValue {
    std::string group;
    std::vector<FieldYearKey> scope;
    Indicator indicator = Indicator::MNLCS;
    double estimate = 0.0;
    bool defined = true;
    std::string note;
    std::size_t n = 0;  ///< group articles contributing
};

/// Flat mean of every normalised score. The transform picks the tag: log ratios
/// give MNLCS, raw ratios MNCS, z-scores LUNDBERG_Z and cited reciprocals MNPC.
IndicatorValue mean_score(std::span<const NormalizedScores> scores);

/// Pooled proportion cited: sum of cited over sum of totals.
IndicatorValue proportion_cited(std::span<const ProportionSummary> sets);

struct EqualisedProportion {
    IndicatorValue value;
    double effective_cell_size = 0.0;  ///< mean cell size, n-hat
    double total = 0.0;                ///< sum of cell sizes
};

/// Unweighted mean of per-cell proportions.
EqualisedProportion equalised_proportion(std::span<const ProportionSummary> sets);

/// Ratio of equalised proportions; undefined when the world side is zero.
IndicatorValue emnpc(std::span<const ProportionSummary> group_sets,
                     std::span<const ProportionSummary> world_sets);

/// One field's contribution to MNPC.
struct MnpcTerm {
    ProportionSummary group;
    ProportionSummary world;
    double weight = 0.0;  ///< n_gf / n_g
    double ratio = 0.0;   ///< p_gf / p_wf, 1 for 0/0, NaN for k/0
    bool zero_over_zero = false;
    bool positive_over_zero = false;
};

std::vector<MnpcTerm> mnpc_terms(std::span<const ProportionSummary> group_sets,
                                 std::span<const ProportionSummary> world_sets);

/// Size-weighted sum of per-field proportion ratios. A 0/0 field counts as 1;
/// a k/0 field leaves the result undefined.
IndicatorValue mnpc(std::span<const ProportionSummary> group_sets,
                    std::span<const ProportionSummary> world_sets);

/// A group cell and its world cell, borrowed from wherever the counts live.
struct CellPair {
    FieldYearKey key;
    std::span<const Count> group;
    std::span<const Count> world;
};

/// Builds cell pairs for the group's cells restricted to `keys`.
std::vector<CellPair> make_slice(const Corpus& corpus, const std::string& group,
                                 std::span<const FieldYearKey> keys);

/// Evaluates any indicator over a slice. Undefined outcomes come back flagged,
/// never thrown.
IndicatorValue evaluate(Indicator indicator, std::span<const CellPair> slice,
                        const std::string& group);

/// Normalised per-article scores of the group side of a slice, one entry per
/// cell. Throws UndefinedIndicator when a cell cannot be normalised.
std::vector<NormalizedScores> normalized_slice(Transform transform, std::span<const CellPair> slice,
                                               const std::string& group);

}  // namespace normcite
