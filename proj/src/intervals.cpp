#include "normcite/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace normcite {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_alpha(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("alpha must lie in (0, 1)");
    }
}

std::vector<double> concat(const std::vector<NormalizedScores>& scores)
{
    std::vector<double> all;
    for (const auto& s : scores) {
        all.insert(all.end(), s.values.begin(), s.values.end());
    }
    return all;
}

std::vector<double> log1p_values(std::span<const Count> counts)
{
    std::vector<double> out;
    out.reserve(counts.size());
    for (Count c : counts) {
        out.push_back(std::log1p(static_cast<double>(c)));
    }
    return out;
}

/// exp(centre -/+ z sqrt(variance)) around the uncorrected log ratio.
IntervalEstimate log_ratio_interval(CitedCounts group, CitedCounts world, double alpha,
                                    double variance, Method method, bool continuity)
{
    const double pg = group.cited / group.total;
    const double pw = world.cited / world.total;
    IntervalEstimate r;
    r.estimate = pg / pw;
    r.alpha = alpha;
    r.method = method;
    r.h = kNaN;
    r.note = continuity ? "continuity=on" : "continuity=off";
    if (!(variance >= 0.0) || !std::isfinite(variance)) {
        return IntervalEstimate::undefined(method, r.estimate, alpha,
                                           "variance term is negative or infinite (" + r.note + ")");
    }
    const double half = z_critical(alpha) * std::sqrt(variance);
    if (group.cited == 0.0) {
        // ln(0) centre: both limits collapse onto the zero estimate.
        r.lower = 0.0;
        r.upper = 0.0;
        r.note += "; zero group cited gives a degenerate interval";
        return r;
    }
    const double centre = std::log(r.estimate);
    r.lower = std::exp(centre - half);
    r.upper = std::exp(centre + half);
    return r;
}

void check_counts(CitedCounts c, const char* side)
{
    if (!(c.total >= 1.0) || c.cited < 0.0 || c.cited > c.total) {
        throw std::invalid_argument(std::string(side) + " counts need 0 <= cited <= total, total >= 1");
    }
}

}  // namespace

std::string_view to_string(Method method)
{
    switch (method) {
    case Method::NORMAL_T: return "NORMAL_T";
    case Method::FIELLER: return "FIELLER";
    case Method::HEURISTIC_EXPANSION: return "HEURISTIC_EXPANSION";
    case Method::WILSON: return "WILSON";
    case Method::RISK_RATIO: return "RISK_RATIO";
    case Method::MNPC_WEIGHTED: return "MNPC_WEIGHTED";
    case Method::BOOTSTRAP_PERCENTILE: return "BOOTSTRAP_PERCENTILE";
    }
    return "?";
}

IntervalEstimate IntervalEstimate::undefined(Method method, double estimate, double alpha,
                                             std::string note)
{
    IntervalEstimate r;
    r.estimate = estimate;
    r.lower = kNaN;
    r.upper = kNaN;
    r.alpha = alpha;
    r.method = method;
    r.defined = false;
    r.h = kNaN;
    r.note = std::move(note);
    return r;
}

SampleMoments SampleMoments::of(std::span<const double> values)
{
    SampleMoments m;
    m.n = values.size();
    if (m.n == 0) {
        throw std::invalid_argument("moments of an empty sample");
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    m.mean = sum / static_cast<double>(m.n);
    if (m.n < 2) {
        m.sd = kNaN;
        m.se = kNaN;
        return m;
    }
    double ss = 0.0;
    for (double v : values) {
        ss += (v - m.mean) * (v - m.mean);
    }
    m.sd = std::sqrt(ss / static_cast<double>(m.n - 1));
    m.se = m.sd / std::sqrt(static_cast<double>(m.n));
    return m;
}

SampleMoments SampleMoments::from_summary(double mean, double se, std::size_t n)
{
    return SampleMoments{mean, se * std::sqrt(static_cast<double>(n)), se, n};
}

double t_critical(std::size_t df, double alpha)
{
    if (df < 1) {
        throw std::invalid_argument("t_critical: df must be at least 1");
    }
    check_alpha(alpha);
    boost::math::students_t dist(static_cast<double>(df));
    return boost::math::quantile(boost::math::complement(dist, alpha / 2.0));
}

double z_critical(double alpha)
{
    check_alpha(alpha);
    boost::math::normal dist;
    return boost::math::quantile(boost::math::complement(dist, alpha / 2.0));
}

IntervalEstimate normal_mean_ci(std::span<const double> values, double alpha)
{
    if (values.size() < 2) {
        throw std::invalid_argument("normal_mean_ci: need at least two values");
    }
    const auto m = SampleMoments::of(values);
    const double half = t_critical(m.n - 1, alpha) * m.se;
    IntervalEstimate r;
    r.estimate = m.mean;
    r.lower = m.mean - half;
    r.upper = m.mean + half;
    r.alpha = alpha;
    r.method = Method::NORMAL_T;
    r.h = kNaN;
    return r;
}

IntervalEstimate fieller_ci(const SampleMoments& group, const SampleMoments& world, double alpha)
{
    if (!(world.mean > 0.0)) {
        throw std::invalid_argument("fieller_ci: world mean must be positive");
    }
    if (group.n < 2 || world.n < 2) {
        throw std::invalid_argument("fieller_ci: need at least two values on each side");
    }
    const double t = t_critical(group.n + world.n - 2, alpha);
    const double ratio = group.mean / world.mean;
    const double rel_w = world.se / world.mean;
    const double h = (t * rel_w) * (t * rel_w);
    if (h >= 1.0) {
        auto r = IntervalEstimate::undefined(Method::FIELLER, ratio, alpha,
                                             "h >= 1: confidence limits are infinite");
        r.h = h;
        return r;
    }
    // MNLCS^2 SE_g^2 / cbar_g^2 is written as SE_g^2 / cbar_w^2 so a zero group
    // mean stays finite.
    const double gw = group.se / world.mean;
    const double se = std::sqrt((1.0 - h) * gw * gw + ratio * ratio * rel_w * rel_w) / (1.0 - h);
    const double centre = ratio / (1.0 - h);

    IntervalEstimate r;
    r.estimate = ratio;
    r.lower = centre - t * se;
    r.upper = centre + t * se;
    r.alpha = alpha;
    r.method = Method::FIELLER;
    r.h = h;
    return r;
}

std::string_view to_string(ExpansionMode mode)
{
    return mode == ExpansionMode::Literal ? "literal" : "expand_from_mean";
}

ExpansionMode parse_expansion_mode(std::string_view text)
{
    if (text == "literal") {
        return ExpansionMode::Literal;
    }
    if (text == "expand_from_mean") {
        return ExpansionMode::ExpandFromMean;
    }
    throw std::invalid_argument("unknown expansion mode '" + std::string(text) + "'");
}

IntervalEstimate heuristic_expanded_ci(std::span<const CellIntervals> per_cell,
                                       const IntervalEstimate& combined, double combined_mean,
                                       ExpansionMode mode)
{
    const std::string mode_note = "mode=" + std::string(to_string(mode));
    if (per_cell.empty()) {
        throw std::invalid_argument("heuristic_expanded_ci: no cells");
    }
    if (!combined.defined) {
        return IntervalEstimate::undefined(Method::HEURISTIC_EXPANSION, combined_mean,
                                           combined.alpha, mode_note + "; combined interval undefined");
    }

    std::size_t n = 0;
    double exp_lower = 0.0;
    double exp_upper = 0.0;
    for (const auto& cell : per_cell) {
        if (!cell.fieller.defined) {
            return IntervalEstimate::undefined(
                Method::HEURISTIC_EXPANSION, combined_mean, combined.alpha,
                mode_note + "; Fieller interval undefined in a cell (" + cell.fieller.note + ")");
        }
        const double lower_half = cell.mean - cell.normal.lower;
        const double upper_half = cell.normal.upper - cell.mean;
        if (!(lower_half > 0.0) || !(upper_half > 0.0)) {
            return IntervalEstimate::undefined(Method::HEURISTIC_EXPANSION, combined_mean,
                                               combined.alpha,
                                               mode_note + "; zero-width normal interval in a cell");
        }
        const double w = static_cast<double>(cell.size);
        exp_lower += w * (cell.normal.lower - cell.fieller.lower) / lower_half;
        exp_upper += w * (cell.fieller.upper - cell.normal.upper) / upper_half;
        n += cell.size;
    }
    exp_lower /= static_cast<double>(n);
    exp_upper /= static_cast<double>(n);

    const double lower_half = combined_mean - combined.lower;
    const double upper_half = combined.upper - combined_mean;
    IntervalEstimate r;
    r.estimate = combined_mean;
    r.alpha = combined.alpha;
    r.method = Method::HEURISTIC_EXPANSION;
    r.h = kNaN;
    if (mode == ExpansionMode::Literal) {
        r.lower = combined.lower - (exp_lower + 1.0) * lower_half;
        r.upper = combined.upper + (exp_upper + 1.0) * upper_half;
    } else {
        r.lower = combined_mean - (exp_lower + 1.0) * lower_half;
        r.upper = combined_mean + (exp_upper + 1.0) * upper_half;
    }
    std::ostringstream note;
    note << mode_note << "; expansion lower=" << exp_lower << " upper=" << exp_upper;
    r.note = note.str();
    return r;
}

IntervalEstimate wilson_ci(std::uint64_t cited, std::uint64_t total, double alpha)
{
    if (total < 1 || cited > total) {
        throw std::invalid_argument("wilson_ci: need 0 <= cited <= total and total >= 1");
    }
    const double z = z_critical(alpha);
    const double n = static_cast<double>(total);
    const double p = static_cast<double>(cited) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;

    IntervalEstimate r;
    r.estimate = p;
    r.lower = cited == 0 ? 0.0 : std::clamp(centre - half, 0.0, p);
    r.upper = cited == total ? 1.0 : std::clamp(centre + half, p, 1.0);
    r.alpha = alpha;
    r.method = Method::WILSON;
    r.h = kNaN;
    return r;
}

IntervalEstimate risk_ratio_ci(CitedCounts group, CitedCounts world, double alpha, bool continuity)
{
    check_counts(group, "group");
    check_counts(world, "world");
    check_alpha(alpha);
    const std::string cc = continuity ? "continuity=on" : "continuity=off";
    if (world.cited == 0.0) {
        return IntervalEstimate::undefined(Method::RISK_RATIO, kNaN, alpha,
                                           "zero world cited (" + cc + ")");
    }
    if (group.cited == 0.0 && !continuity) {
        return IntervalEstimate::undefined(Method::RISK_RATIO, 0.0, alpha,
                                           "zero group cited: log of zero (" + cc + ")");
    }
    const double extra = continuity ? 0.5 : 0.0;
    const double a = group.cited + extra;
    const double b = world.cited + extra;
    const double variance =
        (group.total - a) / a / group.total + (world.total - b) / b / world.total;
    return log_ratio_interval(group, world, alpha, variance, Method::RISK_RATIO, continuity);
}

IntervalEstimate mnpc_field_ci(CitedCounts group, CitedCounts world, double alpha, bool continuity)
{
    check_counts(group, "group");
    check_counts(world, "world");
    check_alpha(alpha);
    const std::string cc = continuity ? "continuity=on" : "continuity=off";
    if (world.cited == 0.0) {
        return IntervalEstimate::undefined(Method::RISK_RATIO, kNaN, alpha,
                                           "zero world cited (" + cc + ")");
    }
    if (group.cited == 0.0 && !continuity) {
        return IntervalEstimate::undefined(Method::RISK_RATIO, 0.0, alpha,
                                           "zero group cited: log of zero (" + cc + ")");
    }
    const double extra = continuity ? 0.5 : 0.0;
    const double a = group.cited + extra;
    const double b = world.cited + extra;
    const double variance =
        ((group.total - a) / a + (world.total - b) / b) / (group.total + world.total);
    return log_ratio_interval(group, world, alpha, variance, Method::RISK_RATIO, continuity);
}

IntervalEstimate mnpc_combined_ci(std::span<const WeightedFieldInterval> per_field, double mnpc)
{
    if (per_field.empty()) {
        throw std::invalid_argument("mnpc_combined_ci: no fields");
    }
    double weight_sum = 0.0;
    for (const auto& f : per_field) {
        weight_sum += f.weight;
    }
    if (std::abs(weight_sum - 1.0) > 1e-9) {
        throw std::invalid_argument("mnpc_combined_ci: weights must sum to 1");
    }
    const double alpha = per_field.front().interval.alpha;
    double down = 0.0;
    double up = 0.0;
    for (const auto& f : per_field) {
        if (!f.interval.defined) {
            return IntervalEstimate::undefined(Method::MNPC_WEIGHTED, mnpc, alpha,
                                               "field interval undefined: " + f.interval.note);
        }
        down += f.weight * (f.ratio - f.interval.lower);
        up += f.weight * (f.interval.upper - f.ratio);
    }
    IntervalEstimate r;
    r.estimate = mnpc;
    r.lower = mnpc - down;
    r.upper = mnpc + up;
    r.alpha = alpha;
    r.method = Method::MNPC_WEIGHTED;
    r.h = kNaN;
    return r;
}

std::string_view to_string(Continuity c)
{
    switch (c) {
    case Continuity::Auto: return "auto";
    case Continuity::On: return "on";
    case Continuity::Off: return "off";
    }
    return "?";
}

Continuity parse_continuity(std::string_view text)
{
    if (text == "auto") return Continuity::Auto;
    if (text == "on") return Continuity::On;
    if (text == "off") return Continuity::Off;
    throw std::invalid_argument("unknown continuity setting '" + std::string(text) + "'");
}

bool resolve_continuity(Continuity mode, std::initializer_list<double> cited_counts)
{
    switch (mode) {
    case Continuity::On: return true;
    case Continuity::Off: return false;
    case Continuity::Auto:
        return std::any_of(cited_counts.begin(), cited_counts.end(),
                           [](double c) { return c < 5.0; });
    }
    return false;
}

// ---------------------------------------------------------------------------
//  Indicator-level dispatch
// ---------------------------------------------------------------------------

bool fieller_applicable(Indicator indicator)
{
    return indicator == Indicator::MNLCS;
}

namespace {

IntervalEstimate mean_indicator_interval(Indicator indicator, std::span<const CellPair> slice,
                                         double alpha)
{
    const Transform transform = indicator == Indicator::MNLCS  ? Transform::LogRatio
                                : indicator == Indicator::MNCS ? Transform::RawRatio
                                                               : Transform::ZScore;
    const auto values = concat(normalized_slice(transform, slice, ""));
    if (values.size() < 2) {
        return IntervalEstimate::undefined(Method::NORMAL_T, kNaN, alpha,
                                           "fewer than two articles");
    }
    return normal_mean_ci(values, alpha);
}

IntervalEstimate fieller_for_cell(const CellPair& cell, double alpha)
{
    const auto g = SampleMoments::of(log1p_values(cell.group));
    const auto w = SampleMoments::of(log1p_values(cell.world));
    if (!(w.mean > 0.0)) {
        return IntervalEstimate::undefined(Method::FIELLER, kNaN, alpha,
                                           "undefined normalisation: all world counts zero for " +
                                               cell.key.label());
    }
    if (g.n < 2 || w.n < 2) {
        return IntervalEstimate::undefined(Method::FIELLER, g.mean / w.mean, alpha,
                                           "fewer than two articles in " + cell.key.label());
    }
    return fieller_ci(g, w, alpha);
}

IntervalEstimate fieller_interval(std::span<const CellPair> slice, const AnalyticOptions& opt)
{
    if (slice.size() == 1) {
        return fieller_for_cell(slice.front(), opt.alpha);
    }
    const auto scores = normalized_slice(Transform::LogRatio, slice, "");
    std::vector<CellIntervals> cells;
    cells.reserve(slice.size());
    for (std::size_t i = 0; i < slice.size(); ++i) {
        const auto& values = scores[i].values;
        if (values.size() < 2) {
            return IntervalEstimate::undefined(Method::HEURISTIC_EXPANSION, kNaN, opt.alpha,
                                               "fewer than two articles in " +
                                                   slice[i].key.label());
        }
        CellIntervals c;
        c.size = values.size();
        c.normal = normal_mean_ci(values, opt.alpha);
        c.mean = c.normal.estimate;
        c.fieller = fieller_for_cell(slice[i], opt.alpha);
        cells.push_back(std::move(c));
    }
    const auto all = concat(scores);
    const auto combined = normal_mean_ci(all, opt.alpha);
    return heuristic_expanded_ci(cells, combined, combined.estimate, opt.expansion);
}

IntervalEstimate proportion_interval(Indicator indicator, std::span<const CellPair> slice,
                                     const AnalyticOptions& opt)
{
    std::vector<ProportionSummary> g;
    std::vector<ProportionSummary> w;
    for (const auto& cell : slice) {
        g.push_back(summarize_proportion("", cell.key, cell.group));
        w.push_back(summarize_proportion(kWorld, cell.key, cell.world));
    }

    switch (indicator) {
    case Indicator::PROP_CITED: {
        std::uint64_t cited = 0;
        std::uint64_t total = 0;
        for (const auto& s : g) {
            cited += s.cited;
            total += s.total;
        }
        return wilson_ci(cited, total, opt.alpha);
    }
    case Indicator::EQ_PROP_CITED: {
        const auto eq = equalised_proportion(g);
        const auto total = static_cast<std::uint64_t>(eq.total);
        const auto cited = static_cast<std::uint64_t>(std::llround(eq.value.estimate * eq.total));
        auto r = wilson_ci(std::min(cited, total), total, opt.alpha);
        r.estimate = eq.value.estimate;
        r.lower = std::min(r.lower, r.estimate);
        r.upper = std::max(r.upper, r.estimate);
        r.note = "equalised counts " + std::to_string(cited) + "/" + std::to_string(total);
        return r;
    }
    case Indicator::EMNPC: {
        const auto eg = equalised_proportion(g);
        const auto ew = equalised_proportion(w);
        const CitedCounts gc{eg.value.estimate * eg.total, eg.total};
        const CitedCounts wc{ew.value.estimate * ew.total, ew.total};
        const bool cc = resolve_continuity(opt.continuity, {gc.cited, wc.cited});
        return risk_ratio_ci(gc, wc, opt.alpha, cc);
    }
    case Indicator::MNPC: {
        const auto terms = mnpc_terms(g, w);
        double estimate = 0.0;
        std::vector<WeightedFieldInterval> fields;
        bool any_cc = false;
        for (const auto& t : terms) {
            if (t.positive_over_zero) {
                return IntervalEstimate::undefined(
                    Method::MNPC_WEIGHTED, kNaN, opt.alpha,
                    "positive numerator over zero world proportion in " + t.group.key.label());
            }
            if (t.zero_over_zero) {
                return IntervalEstimate::undefined(
                    Method::MNPC_WEIGHTED, kNaN, opt.alpha,
                    "no interval for 0/0 field ratio in " + t.group.key.label());
            }
            const CitedCounts gc{static_cast<double>(t.group.cited),
                                 static_cast<double>(t.group.total)};
            const CitedCounts wc{static_cast<double>(t.world.cited),
                                 static_cast<double>(t.world.total)};
            const bool cc = resolve_continuity(opt.continuity, {gc.cited, wc.cited});
            any_cc = any_cc || cc;
            fields.push_back({t.weight, t.ratio, mnpc_field_ci(gc, wc, opt.alpha, cc)});
            estimate += t.weight * t.ratio;
        }
        auto r = mnpc_combined_ci(fields, estimate);
        if (r.defined) {
            r.note = any_cc ? "continuity=on" : "continuity=off";
        }
        return r;
    }
    default: break;
    }
    throw std::logic_error("not a proportion indicator");
}

}  // namespace

Method analytic_method(Indicator indicator, AnalyticKind kind, std::size_t cells)
{
    if (kind == AnalyticKind::Fieller) {
        return cells == 1 ? Method::FIELLER : Method::HEURISTIC_EXPANSION;
    }
    switch (indicator) {
    case Indicator::PROP_CITED:
    case Indicator::EQ_PROP_CITED: return Method::WILSON;
    case Indicator::EMNPC: return Method::RISK_RATIO;
    case Indicator::MNPC: return Method::MNPC_WEIGHTED;
    default: return Method::NORMAL_T;
    }
}

IntervalEstimate analytic_interval(Indicator indicator, AnalyticKind kind,
                                   std::span<const CellPair> slice, const AnalyticOptions& options)
{
    check_alpha(options.alpha);
    if (slice.empty()) {
        return IntervalEstimate::undefined(analytic_method(indicator, kind, 0), kNaN,
                                           options.alpha, "empty scope");
    }
    try {
        if (kind == AnalyticKind::Fieller) {
            if (!fieller_applicable(indicator)) {
                throw std::invalid_argument("Fieller limits apply to MNLCS only");
            }
            return fieller_interval(slice, options);
        }
        switch (indicator) {
        case Indicator::MNLCS:
        case Indicator::MNCS:
        case Indicator::LUNDBERG_Z: return mean_indicator_interval(indicator, slice, options.alpha);
        default: return proportion_interval(indicator, slice, options);
        }
    } catch (const UndefinedIndicator& e) {
        return IntervalEstimate::undefined(analytic_method(indicator, kind, slice.size()), kNaN,
                                           options.alpha, e.what());
    }
}

}  // namespace normcite
