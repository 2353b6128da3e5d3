#include "normcite/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "normcite/seeding.hpp"

namespace normcite {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

unsigned worker_count(unsigned requested, std::size_t jobs)
{
    unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

/// Runs fn(r) for r in [0, count) across workers. fn must only touch slot r.
template <typename Fn>
void for_each_replicate(std::size_t count, unsigned threads, Fn&& fn)
{
    const unsigned workers = worker_count(threads, count);
    if (workers <= 1) {
        for (std::size_t r = 0; r < count; ++r) {
            fn(r);
        }
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t r = w; r < count; r += workers) {
                fn(r);
            }
        });
    }
}

template <typename T>
void resample_into(std::span<const T> source, std::vector<T>& out, Engine& rng)
{
    std::uniform_int_distribution<std::size_t> pick(0, source.size() - 1);
    out.resize(source.size());
    for (auto& x : out) {
        x = source[pick(rng)];
    }
}

BootstrapResult summarise(std::vector<double> estimates, double point, const BootstrapSpec& spec)
{
    BootstrapResult result;
    std::vector<double>& kept = result.replicates;
    kept.reserve(estimates.size());
    for (double v : estimates) {
        if (std::isnan(v)) {
            ++result.undefined_replicates;
        } else {
            kept.push_back(v);
        }
    }
    std::sort(kept.begin(), kept.end());

    const double total = static_cast<double>(estimates.size());
    std::ostringstream note;
    note << "iterations=" << estimates.size() << "; percentile=nearest-rank"
         << "; world=" << (spec.resample_world ? "resampled" : "fixed");
    if (result.undefined_replicates > 0) {
        note << "; undefined replicates=" << result.undefined_replicates;
    }
    if (kept.empty() ||
        static_cast<double>(result.undefined_replicates) / total > spec.alpha / 2.0) {
        result.interval = IntervalEstimate::undefined(
            Method::BOOTSTRAP_PERCENTILE, point, spec.alpha,
            note.str() + "; too many undefined replicates (division by zero)");
        return result;
    }
    IntervalEstimate& r = result.interval;
    r.estimate = point;
    r.lower = percentile(kept, spec.alpha / 2.0);
    r.upper = percentile(kept, 1.0 - spec.alpha / 2.0);
    r.alpha = spec.alpha;
    r.method = Method::BOOTSTRAP_PERCENTILE;
    r.h = kNaN;
    r.note = note.str();
    return result;
}

}  // namespace

void BootstrapSpec::validate() const
{
    if (iterations < 100) {
        throw std::invalid_argument("bootstrap needs at least 100 iterations");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("alpha must lie in (0, 1)");
    }
}

std::size_t default_iterations(Indicator indicator)
{
    return is_proportion_indicator(indicator) ? 10000 : 1000;
}

double percentile(std::span<const double> sorted, double q)
{
    if (sorted.empty()) {
        throw std::invalid_argument("percentile of an empty sample");
    }
    if (!(q >= 0.0 && q <= 1.0)) {
        throw std::invalid_argument("percentile q must lie in [0, 1]");
    }
    const double n = static_cast<double>(sorted.size());
    // q*N is computed in floating point: 0.025 * 1000 must land on rank 25.
    const double rank = std::ceil(q * n - 1e-9);
    const auto idx = static_cast<std::ptrdiff_t>(rank) - 1;
    const auto last = static_cast<std::ptrdiff_t>(sorted.size()) - 1;
    return sorted[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(idx, 0, last))];
}

BootstrapResult bootstrap_indicator(std::span<const CellPair> slice, Indicator indicator,
                                    const std::string& group, const BootstrapSpec& spec)
{
    spec.validate();
    const auto point = evaluate(indicator, slice, group);
    if (!point.defined) {
        BootstrapResult out;
        out.interval = IntervalEstimate::undefined(Method::BOOTSTRAP_PERCENTILE, kNaN, spec.alpha,
                                                   "indicator undefined on the original data: " +
                                                       point.note);
        return out;
    }

    // Fixed-order snapshots: resampling indexes sorted copies.
    std::vector<std::vector<Count>> group_snap;
    std::vector<std::vector<Count>> world_snap;
    for (const auto& cell : slice) {
        group_snap.emplace_back(cell.group.begin(), cell.group.end());
        world_snap.emplace_back(cell.world.begin(), cell.world.end());
        std::sort(group_snap.back().begin(), group_snap.back().end());
        std::sort(world_snap.back().begin(), world_snap.back().end());
    }

    std::vector<double> estimates(spec.iterations, kNaN);
    for_each_replicate(spec.iterations, spec.threads, [&](std::size_t r) {
        Engine rng = substream(spec.seed, r);
        std::vector<std::vector<Count>> g(slice.size());
        std::vector<std::vector<Count>> w(slice.size());
        std::vector<CellPair> replicate;
        replicate.reserve(slice.size());
        for (std::size_t i = 0; i < slice.size(); ++i) {
            resample_into<Count>(group_snap[i], g[i], rng);
            std::span<const Count> world_side = world_snap[i];
            if (spec.resample_world) {
                resample_into<Count>(world_snap[i], w[i], rng);
                world_side = w[i];
            }
            replicate.push_back(CellPair{slice[i].key, g[i], world_side});
        }
        const auto v = evaluate(indicator, replicate, group);
        estimates[r] = v.defined ? v.estimate : kNaN;
    });

    auto result = summarise(std::move(estimates), point.estimate, spec);
    return result;
}

BootstrapResult bootstrap_mean(std::span<const double> values, const BootstrapSpec& spec)
{
    spec.validate();
    if (values.empty()) {
        throw std::invalid_argument("bootstrap_mean: empty sample");
    }
    std::vector<double> snap(values.begin(), values.end());
    std::sort(snap.begin(), snap.end());
    double point = 0.0;
    for (double v : values) {
        point += v;
    }
    point /= static_cast<double>(values.size());

    std::vector<double> estimates(spec.iterations, kNaN);
    for_each_replicate(spec.iterations, spec.threads, [&](std::size_t r) {
        Engine rng = substream(spec.seed, r);
        std::vector<double> sample;
        resample_into<double>(snap, sample, rng);
        double sum = 0.0;
        for (double v : sample) {
            sum += v;
        }
        estimates[r] = sum / static_cast<double>(sample.size());
    });
    BootstrapSpec s = spec;
    s.resample_world = false;
    return summarise(std::move(estimates), point, s);
}

CiComparison compare_ci(const IntervalEstimate& formula, const IntervalEstimate& boot, double point,
                        WidthBasis basis)
{
    if (!formula.defined || !boot.defined) {
        throw std::invalid_argument("compare_ci: both intervals must be defined");
    }
    CiComparison c;
    if (basis == WidthBasis::Full) {
        c.basis_lower = c.basis_upper = boot.upper - boot.lower;
    } else {
        c.basis_lower = point - boot.lower;
        c.basis_upper = boot.upper - point;
    }
    if (!(c.basis_lower > 0.0) || !(c.basis_upper > 0.0)) {
        throw std::domain_error("compare_ci: zero-width bootstrap interval");
    }
    c.lower_pct_diff = ((point - formula.lower) - (point - boot.lower)) / c.basis_lower;
    c.upper_pct_diff = ((formula.upper - point) - (boot.upper - point)) / c.basis_upper;
    return c;
}

std::string transform_label(Indicator indicator)
{
    switch (indicator) {
    case Indicator::MNLCS: return "ln(1+x)";
    case Indicator::MNCS: return "x";
    case Indicator::LUNDBERG_Z: return "z";
    default: return "proportion";
    }
}

namespace {

struct Dataset {
    std::string scope;
    std::vector<FieldYearKey> keys;
};

std::vector<Dataset> datasets_for(const Corpus& corpus, const std::string& group,
                                  Indicator indicator)
{
    const auto keys = corpus.keys_of(group);
    std::vector<Dataset> out;
    if (!is_proportion_indicator(indicator)) {
        for (const auto& key : keys) {
            out.push_back({key.label(), {key}});
        }
        return out;
    }
    for (int year : corpus.years_of(group)) {
        Dataset d{"Y" + std::to_string(year), {}};
        for (const auto& key : keys) {
            if (key.year == year) {
                d.keys.push_back(key);
            }
        }
        out.push_back(std::move(d));
    }
    out.push_back({"ALL", keys});
    return out;
}

}  // namespace

ComparisonTable comparison_suite(std::span<const ComparisonScenario> scenarios,
                                 const ComparisonOptions& options)
{
    if (scenarios.empty()) {
        throw std::invalid_argument("comparison_suite: no scenarios");
    }
    if (options.indicators.empty()) {
        throw std::invalid_argument("comparison_suite: no indicators");
    }
    AnalyticOptions analytic;
    analytic.alpha = options.alpha;
    analytic.continuity = options.continuity;

    ComparisonTable table;
    for (const auto& scenario : scenarios) {
        std::vector<std::string> groups{kWorld};
        groups.insert(groups.end(), scenario.corpus.groups().begin(),
                      scenario.corpus.groups().end());
        for (Indicator indicator : options.indicators) {
            BootstrapSpec spec;
            spec.alpha = options.alpha;
            spec.iterations =
                options.iterations == 0 ? default_iterations(indicator) : options.iterations;
            spec.threads = options.threads;
            spec.resample_world = options.resample_world == WorldResampling::On ||
                                  (options.resample_world == WorldResampling::Auto &&
                                   is_proportion_indicator(indicator));

            for (const auto& group : groups) {
                for (const auto& ds : datasets_for(scenario.corpus, group, indicator)) {
                    const auto slice = make_slice(scenario.corpus, group, ds.keys);
                    spec.seed = derive_seed(options.seed,
                                            {label_hash(scenario.source), label_hash(scenario.label),
                                             label_hash(group), label_hash(ds.scope),
                                             label_hash(to_string(indicator))});
                    ComparisonRow row;
                    row.source = scenario.source;
                    row.scenario = scenario.label;
                    row.group = group;
                    row.scope = ds.scope;
                    row.indicator = indicator;
                    const auto value = evaluate(indicator, slice, group);
                    row.n = value.n;
                    row.point = value.estimate;
                    row.formula = analytic_interval(indicator, AnalyticKind::Formula, slice, analytic);
                    row.boot = bootstrap_indicator(slice, indicator, group, spec).interval;
                    if (!value.defined) {
                        row.note = value.note;
                    } else if (!row.formula.defined) {
                        row.note = "formula undefined: " + row.formula.note;
                    } else if (!row.boot.defined) {
                        row.note = "bootstrap undefined: " + row.boot.note;
                    } else {
                        try {
                            row.diff = compare_ci(row.formula, row.boot, row.point, options.basis);
                            row.defined = true;
                        } catch (const std::domain_error& e) {
                            row.note = e.what();
                        }
                    }
                    table.rows.push_back(std::move(row));
                }
            }
        }
    }
    table.summaries = summarize_comparisons(table.rows);
    return table;
}

std::vector<ComparisonSummary> summarize_comparisons(std::span<const ComparisonRow> rows)
{
    std::map<std::pair<std::string, std::string>, ComparisonSummary> acc;
    for (const auto& row : rows) {
        auto& s = acc[{row.source, std::string(to_string(row.indicator))}];
        s.source = row.source;
        s.indicator = row.indicator;
        s.transform = transform_label(row.indicator);
        if (!row.defined) {
            ++s.gaps;
            continue;
        }
        ++s.datasets;
        s.lower_avg += row.diff.lower_pct_diff;
        s.upper_avg += row.diff.upper_pct_diff;
        s.lower_abs_avg += std::abs(row.diff.lower_pct_diff);
        s.upper_abs_avg += std::abs(row.diff.upper_pct_diff);
        s.lower_max = std::max(s.lower_max, std::abs(row.diff.lower_pct_diff));
        s.upper_max = std::max(s.upper_max, std::abs(row.diff.upper_pct_diff));
    }
    std::vector<ComparisonSummary> out;
    for (auto& [key, s] : acc) {
        if (s.datasets > 0) {
            const double k = static_cast<double>(s.datasets);
            s.lower_avg /= k;
            s.upper_avg /= k;
            s.lower_abs_avg /= k;
            s.upper_abs_avg /= k;
        }
        out.push_back(s);
    }
    return out;
}

}  // namespace normcite
