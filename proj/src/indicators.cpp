#include "normcite/indicators.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace normcite {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<FieldYearKey> keys_of(std::span<const CellPair> slice)
{
    std::vector<FieldYearKey> keys;
    keys.reserve(slice.size());
    for (const auto& cell : slice) {
        keys.push_back(cell.key);
    }
    return keys;
}

IndicatorValue undefined_value(Indicator indicator, std::string group,
                               std::vector<FieldYearKey> scope, std::string note, std::size_t n)
{
    IndicatorValue v;
    v.group = std::move(group);
    v.scope = std::move(scope);
    v.indicator = indicator;
    v.estimate = kNaN;
    v.defined = false;
    v.note = std::move(note);
    v.n = n;
    return v;
}

Indicator indicator_for(Transform t)
{
    switch (t) {
    case Transform::LogRatio: return Indicator::MNLCS;
    case Transform::RawRatio: return Indicator::MNCS;
    case Transform::ZScore: return Indicator::LUNDBERG_Z;
    case Transform::CitedReciprocal: return Indicator::MNPC;
    }
    return Indicator::MNLCS;
}

void require_same_keys(std::span<const ProportionSummary> group_sets,
                       std::span<const ProportionSummary> world_sets)
{
    if (group_sets.size() != world_sets.size()) {
        throw std::invalid_argument("group and world summaries cover different keys");
    }
    for (std::size_t i = 0; i < group_sets.size(); ++i) {
        if (!(group_sets[i].key == world_sets[i].key)) {
            throw std::invalid_argument("group and world summaries cover different keys");
        }
    }
}

}  // namespace

std::string_view to_string(Indicator indicator)
{
    switch (indicator) {
    case Indicator::MNLCS: return "MNLCS";
    case Indicator::MNCS: return "MNCS";
    case Indicator::LUNDBERG_Z: return "LUNDBERG_Z";
    case Indicator::EMNPC: return "EMNPC";
    case Indicator::MNPC: return "MNPC";
    case Indicator::PROP_CITED: return "PROP_CITED";
    case Indicator::EQ_PROP_CITED: return "EQ_PROP_CITED";
    }
    return "?";
}

Indicator parse_indicator(std::string_view tag)
{
    for (auto i : {Indicator::MNLCS, Indicator::MNCS, Indicator::LUNDBERG_Z, Indicator::EMNPC,
                   Indicator::MNPC, Indicator::PROP_CITED, Indicator::EQ_PROP_CITED}) {
        if (to_string(i) == tag) {
            return i;
        }
    }
    throw std::invalid_argument("unknown indicator '" + std::string(tag) + "'");
}

bool is_proportion_indicator(Indicator indicator)
{
    switch (indicator) {
    case Indicator::EMNPC:
    case Indicator::MNPC:
    case Indicator::PROP_CITED:
    case Indicator::EQ_PROP_CITED: return true;
    default: return false;
    }
}

// ---------------------------------------------------------------------------
//  Baselines and normalisation
// ---------------------------------------------------------------------------

NormalizationBaseline compute_baseline(const FieldYearKey& key, std::span<const Count> world)
{
    if (world.empty()) {
        throw std::invalid_argument("world cell " + key.label() + " is empty");
    }
    NormalizationBaseline b;
    b.key = key;
    b.n_world = world.size();

    const double n = static_cast<double>(world.size());
    double log_sum = 0.0;
    double raw_sum = 0.0;
    std::size_t cited = 0;
    for (Count c : world) {
        log_sum += std::log1p(static_cast<double>(c));
        raw_sum += static_cast<double>(c);
        cited += c > 0 ? 1 : 0;
    }
    b.log_mean = log_sum / n;
    b.raw_mean = raw_sum / n;
    b.prop_cited = static_cast<double>(cited) / n;

    if (world.size() < 2) {
        b.log_sd = kNaN;
    } else {
        double ss = 0.0;
        for (Count c : world) {
            const double d = std::log1p(static_cast<double>(c)) - b.log_mean;
            ss += d * d;
        }
        b.log_sd = std::sqrt(ss / (n - 1.0));
    }
    return b;
}

NormalizationBaseline compute_baseline(const ArticleSet& world)
{
    if (!world.is_world()) {
        throw std::invalid_argument("baseline requires a WORLD cell, got group '" + world.group + "'");
    }
    return compute_baseline(world.key, world.counts);
}

std::vector<double> log_ratio_scores(std::span<const Count> counts, const NormalizationBaseline& b)
{
    if (!(b.log_mean > 0.0)) {
        throw UndefinedIndicator("undefined normalisation: all world counts zero for " +
                                 b.key.label());
    }
    std::vector<double> out;
    out.reserve(counts.size());
    for (Count c : counts) {
        out.push_back(std::log1p(static_cast<double>(c)) / b.log_mean);
    }
    return out;
}

std::vector<double> z_scores(std::span<const Count> counts, const NormalizationBaseline& b)
{
    if (!(b.log_sd > 0.0)) {
        throw UndefinedIndicator("undefined normalisation: world log sd is zero or undefined for " +
                                 b.key.label());
    }
    std::vector<double> out;
    out.reserve(counts.size());
    for (Count c : counts) {
        out.push_back((std::log1p(static_cast<double>(c)) - b.log_mean) / b.log_sd);
    }
    return out;
}

std::vector<double> raw_ratio_scores(std::span<const Count> counts, const NormalizationBaseline& b)
{
    if (!(b.raw_mean > 0.0)) {
        throw UndefinedIndicator("undefined normalisation: all world counts zero for " +
                                 b.key.label());
    }
    std::vector<double> out;
    out.reserve(counts.size());
    for (Count c : counts) {
        out.push_back(static_cast<double>(c) / b.raw_mean);
    }
    return out;
}

std::vector<double> cited_reciprocal_scores(std::span<const Count> counts,
                                            const NormalizationBaseline& b)
{
    if (!(b.prop_cited > 0.0)) {
        throw UndefinedIndicator("undefined normalisation: world proportion cited is zero for " +
                                 b.key.label());
    }
    std::vector<double> out;
    out.reserve(counts.size());
    for (Count c : counts) {
        out.push_back(c > 0 ? 1.0 / b.prop_cited : 0.0);
    }
    return out;
}

namespace {

template <typename Fn>
NormalizedScores normalize_with(const ArticleSet& set, const NormalizationBaseline& baseline,
                                Transform transform, Fn&& fn)
{
    if (!(set.key == baseline.key)) {
        throw std::invalid_argument("baseline " + baseline.key.label() + " does not match cell " +
                                    set.key.label());
    }
    return NormalizedScores{set.group, set.key, fn(set.counts, baseline), transform};
}

}  // namespace

NormalizedScores normalize_log(const ArticleSet& set, const NormalizationBaseline& baseline)
{
    return normalize_with(set, baseline, Transform::LogRatio, log_ratio_scores);
}

NormalizedScores normalize_lundberg(const ArticleSet& set, const NormalizationBaseline& baseline)
{
    return normalize_with(set, baseline, Transform::ZScore, z_scores);
}

NormalizedScores normalize_raw(const ArticleSet& set, const NormalizationBaseline& baseline)
{
    return normalize_with(set, baseline, Transform::RawRatio, raw_ratio_scores);
}

NormalizedScores normalize_cited(const ArticleSet& set, const NormalizationBaseline& baseline)
{
    return normalize_with(set, baseline, Transform::CitedReciprocal, cited_reciprocal_scores);
}

// ---------------------------------------------------------------------------
//  Point estimates
// ---------------------------------------------------------------------------

IndicatorValue mean_score(std::span<const NormalizedScores> scores)
{
    if (scores.empty()) {
        throw std::invalid_argument("mean_score: no scores");
    }
    const Transform transform = scores.front().transform;
    IndicatorValue v;
    v.group = scores.front().group;
    v.indicator = indicator_for(transform);

    double sum = 0.0;
    for (const auto& s : scores) {
        if (s.transform != transform) {
            throw std::invalid_argument("mean_score: mixed transforms");
        }
        v.scope.push_back(s.key);
        v.n += s.values.size();
        for (double x : s.values) {
            sum += x;
        }
    }
    if (v.n == 0) {
        throw std::invalid_argument("mean_score: no articles");
    }
    v.estimate = sum / static_cast<double>(v.n);
    return v;
}

ProportionSummary summarize_proportion(const std::string& group, const FieldYearKey& key,
                                       std::span<const Count> counts)
{
    ProportionSummary s{group, key, 0, counts.size()};
    for (Count c : counts) {
        s.cited += c > 0 ? 1 : 0;
    }
    return s;
}

ProportionSummary summarize_proportion(const ArticleSet& set)
{
    return summarize_proportion(set.group, set.key, set.counts);
}

IndicatorValue proportion_cited(std::span<const ProportionSummary> sets)
{
    if (sets.empty()) {
        throw std::invalid_argument("proportion_cited: no cells");
    }
    IndicatorValue v;
    v.group = sets.front().group;
    v.indicator = Indicator::PROP_CITED;
    std::uint64_t cited = 0;
    std::uint64_t total = 0;
    for (const auto& s : sets) {
        cited += s.cited;
        total += s.total;
        v.scope.push_back(s.key);
    }
    v.n = total;
    v.estimate = static_cast<double>(cited) / static_cast<double>(total);
    return v;
}

EqualisedProportion equalised_proportion(std::span<const ProportionSummary> sets)
{
    if (sets.empty()) {
        throw std::invalid_argument("equalised_proportion: no cells");
    }
    EqualisedProportion out;
    out.value.group = sets.front().group;
    out.value.indicator = Indicator::EQ_PROP_CITED;
    double sum = 0.0;
    for (const auto& s : sets) {
        sum += s.proportion();
        out.total += static_cast<double>(s.total);
        out.value.scope.push_back(s.key);
    }
    const double k = static_cast<double>(sets.size());
    out.value.estimate = sum / k;
    out.value.n = static_cast<std::size_t>(out.total);
    out.effective_cell_size = out.total / k;
    return out;
}

IndicatorValue emnpc(std::span<const ProportionSummary> group_sets,
                     std::span<const ProportionSummary> world_sets)
{
    require_same_keys(group_sets, world_sets);
    const auto g = equalised_proportion(group_sets);
    const auto w = equalised_proportion(world_sets);
    if (!(w.value.estimate > 0.0)) {
        return undefined_value(Indicator::EMNPC, g.value.group, g.value.scope,
                               "world equalised proportion cited is zero", g.value.n);
    }
    IndicatorValue v = g.value;
    v.indicator = Indicator::EMNPC;
    v.estimate = g.value.estimate / w.value.estimate;
    return v;
}

std::vector<MnpcTerm> mnpc_terms(std::span<const ProportionSummary> group_sets,
                                 std::span<const ProportionSummary> world_sets)
{
    require_same_keys(group_sets, world_sets);
    double n_group = 0.0;
    for (const auto& s : group_sets) {
        n_group += static_cast<double>(s.total);
    }
    std::vector<MnpcTerm> terms;
    terms.reserve(group_sets.size());
    for (std::size_t i = 0; i < group_sets.size(); ++i) {
        MnpcTerm t;
        t.group = group_sets[i];
        t.world = world_sets[i];
        t.weight = static_cast<double>(t.group.total) / n_group;
        if (t.world.cited == 0) {
            if (t.group.cited == 0) {
                t.zero_over_zero = true;
                t.ratio = 1.0;
            } else {
                t.positive_over_zero = true;
                t.ratio = kNaN;
            }
        } else {
            t.ratio = t.group.proportion() / t.world.proportion();
        }
        terms.push_back(t);
    }
    return terms;
}

IndicatorValue mnpc(std::span<const ProportionSummary> group_sets,
                    std::span<const ProportionSummary> world_sets)
{
    if (group_sets.empty()) {
        throw std::invalid_argument("mnpc: no cells");
    }
    const auto terms = mnpc_terms(group_sets, world_sets);

    IndicatorValue v;
    v.group = group_sets.front().group;
    v.indicator = Indicator::MNPC;
    std::string replaced;
    double sum = 0.0;
    for (const auto& t : terms) {
        v.scope.push_back(t.group.key);
        v.n += t.group.total;
        if (t.positive_over_zero) {
            IndicatorValue u = undefined_value(
                Indicator::MNPC, v.group, {},
                "positive numerator over zero world proportion in " + t.group.key.label(), 0);
            for (const auto& s : group_sets) {
                u.scope.push_back(s.key);
                u.n += s.total;
            }
            return u;
        }
        if (t.zero_over_zero) {
            replaced += (replaced.empty() ? "" : ", ") + t.group.key.label();
        }
        sum += t.weight * t.ratio;
    }
    v.estimate = sum;
    if (!replaced.empty()) {
        v.note = "0/0 field ratio replaced by 1 (" + replaced + ")";
    }
    return v;
}

// ---------------------------------------------------------------------------
//  Slices
// ---------------------------------------------------------------------------

std::vector<CellPair> make_slice(const Corpus& corpus, const std::string& group,
                                 std::span<const FieldYearKey> keys)
{
    std::vector<CellPair> slice;
    slice.reserve(keys.size());
    for (const auto& key : keys) {
        slice.push_back(CellPair{key, corpus.cell(group, key).counts, corpus.world(key).counts});
    }
    return slice;
}

std::vector<NormalizedScores> normalized_slice(Transform transform, std::span<const CellPair> slice,
                                               const std::string& group)
{
    std::vector<NormalizedScores> out;
    out.reserve(slice.size());
    for (const auto& cell : slice) {
        const auto b = compute_baseline(cell.key, cell.world);
        NormalizedScores s{group, cell.key, {}, transform};
        switch (transform) {
        case Transform::LogRatio: s.values = log_ratio_scores(cell.group, b); break;
        case Transform::RawRatio: s.values = raw_ratio_scores(cell.group, b); break;
        case Transform::ZScore: s.values = z_scores(cell.group, b); break;
        case Transform::CitedReciprocal: s.values = cited_reciprocal_scores(cell.group, b); break;
        }
        out.push_back(std::move(s));
    }
    return out;
}

IndicatorValue evaluate(Indicator indicator, std::span<const CellPair> slice,
                        const std::string& group)
{
    std::size_t n = 0;
    for (const auto& cell : slice) {
        n += cell.group.size();
    }
    if (slice.empty()) {
        return undefined_value(indicator, group, {}, "empty scope", 0);
    }

    switch (indicator) {
    case Indicator::MNLCS:
    case Indicator::MNCS:
    case Indicator::LUNDBERG_Z: {
        // Accumulate directly; no per-article vectors on this path.
        double sum = 0.0;
        for (const auto& cell : slice) {
            const auto b = compute_baseline(cell.key, cell.world);
            if (indicator == Indicator::MNLCS) {
                if (!(b.log_mean > 0.0)) {
                    return undefined_value(indicator, group, keys_of(slice),
                                           "undefined normalisation: all world counts zero for " +
                                               cell.key.label(),
                                           n);
                }
                for (Count c : cell.group) {
                    sum += std::log1p(static_cast<double>(c)) / b.log_mean;
                }
            } else if (indicator == Indicator::MNCS) {
                if (!(b.raw_mean > 0.0)) {
                    return undefined_value(indicator, group, keys_of(slice),
                                           "undefined normalisation: all world counts zero for " +
                                               cell.key.label(),
                                           n);
                }
                for (Count c : cell.group) {
                    sum += static_cast<double>(c) / b.raw_mean;
                }
            } else {
                if (!(b.log_sd > 0.0)) {
                    return undefined_value(indicator, group, keys_of(slice),
                                           "undefined normalisation: world log sd is zero or "
                                           "undefined for " +
                                               cell.key.label(),
                                           n);
                }
                for (Count c : cell.group) {
                    sum += (std::log1p(static_cast<double>(c)) - b.log_mean) / b.log_sd;
                }
            }
        }
        IndicatorValue v;
        v.group = group;
        v.scope = keys_of(slice);
        v.indicator = indicator;
        v.n = n;
        v.estimate = sum / static_cast<double>(n);
        return v;
    }
    default: break;
    }

    std::vector<ProportionSummary> g;
    std::vector<ProportionSummary> w;
    g.reserve(slice.size());
    w.reserve(slice.size());
    for (const auto& cell : slice) {
        g.push_back(summarize_proportion(group, cell.key, cell.group));
        w.push_back(summarize_proportion(kWorld, cell.key, cell.world));
    }
    switch (indicator) {
    case Indicator::EMNPC: return emnpc(g, w);
    case Indicator::MNPC: return mnpc(g, w);
    case Indicator::PROP_CITED: return proportion_cited(g);
    case Indicator::EQ_PROP_CITED: return equalised_proportion(g).value;
    default: break;
    }
    throw std::logic_error("unhandled indicator");
}

}  // namespace normcite
