#include "normcite/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include "normcite/seeding.hpp"

namespace normcite {

namespace fs = std::filesystem;

std::string_view to_string(CiSelection ci)
{
    switch (ci) {
    case CiSelection::Formula: return "formula";
    case CiSelection::Fieller: return "fieller";
    case CiSelection::Bootstrap: return "bootstrap";
    case CiSelection::All: return "all";
    }
    return "?";
}

CiSelection parse_ci_selection(std::string_view text)
{
    for (auto c : {CiSelection::Formula, CiSelection::Fieller, CiSelection::Bootstrap,
                   CiSelection::All}) {
        if (to_string(c) == text) {
            return c;
        }
    }
    throw std::invalid_argument("unknown ci method '" + std::string(text) + "'");
}

void ReportConfig::validate() const
{
    if (!(alpha > 0.0 && alpha < 0.5)) {
        throw std::invalid_argument("alpha must lie in (0, 0.5)");
    }
    if (indicators.empty()) {
        throw std::invalid_argument("at least one indicator is required");
    }
    if (bootstrap_iters != 0 && bootstrap_iters < 100) {
        throw std::invalid_argument("bootstrap needs at least 100 iterations");
    }
    if (exclusion) {
        exclusion->validate();
    }
}

namespace {

struct Scope {
    std::string label;
    std::vector<FieldYearKey> keys;
};

std::vector<Scope> scopes_for(const Corpus& corpus, const std::string& group)
{
    const auto keys = corpus.keys_of(group);
    std::vector<Scope> out;
    for (int year : corpus.years_of(group)) {
        Scope s{"Y" + std::to_string(year), {}};
        std::copy_if(keys.begin(), keys.end(), std::back_inserter(s.keys),
                     [year](const FieldYearKey& k) { return k.year == year; });
        out.push_back(std::move(s));
    }
    out.push_back({"ALL", keys});
    return out;
}

bool uses_exclusion(Indicator indicator)
{
    return indicator == Indicator::EMNPC || indicator == Indicator::EQ_PROP_CITED;
}

std::string join_notes(std::initializer_list<std::string> parts)
{
    std::string out;
    for (const auto& p : parts) {
        if (p.empty()) {
            continue;
        }
        if (!out.empty()) {
            out += "; ";
        }
        out += p;
    }
    return out;
}

ReportRow make_row(const std::string& group, const std::string& scope, const IndicatorValue& value,
                   const IntervalEstimate& interval, const std::string& extra_note)
{
    ReportRow row;
    row.group = group;
    row.scope = scope;
    row.n = value.n;
    row.indicator = std::string(to_string(value.indicator));
    row.method = std::string(to_string(interval.method));
    if (value.defined) {
        row.estimate = value.estimate;
    }
    if (value.defined && interval.defined) {
        row.lower = interval.lower;
        row.upper = interval.upper;
    }
    row.defined = value.defined && interval.defined;
    row.notes = join_notes({value.note, interval.note, extra_note});
    return row;
}

nlohmann::json metadata_for(const ReportConfig& config)
{
    nlohmann::json meta;
    meta["alpha"] = config.alpha;
    meta["ci"] = to_string(config.ci);
    std::vector<std::string> indicators;
    for (auto i : config.indicators) {
        indicators.emplace_back(to_string(i));
    }
    meta["indicators"] = indicators;
    meta["seed"] = config.seed;
    meta["bootstrap_iterations"] =
        config.bootstrap_iters == 0
            ? nlohmann::json{{"mean_indicators", 1000}, {"proportion_indicators", 10000}}
            : nlohmann::json(config.bootstrap_iters);
    meta["bootstrap_percentile"] = "nearest-rank";
    meta["bootstrap_world"] = {{"MNCS", "fixed"}, {"other", "resampled"}};
    meta["continuity"] = to_string(config.continuity);
    meta["expansion_mode"] = to_string(config.expansion);
    if (config.exclusion) {
        meta["exclusion"] = {{"min_articles", config.exclusion->min_articles},
                             {"min_fraction_of_mean", config.exclusion->min_fraction_of_mean},
                             {"applies_to", {"EMNPC", "EQ_PROP_CITED"}}};
    } else {
        meta["exclusion"] = nullptr;
    }
    return meta;
}

}  // namespace

IndicatorReport build_report(const Corpus& corpus, const ReportConfig& config)
{
    config.validate();
    IndicatorReport report;
    report.metadata = metadata_for(config);

    AnalyticOptions analytic;
    analytic.alpha = config.alpha;
    analytic.continuity = config.continuity;
    analytic.expansion = config.expansion;

    const bool want_formula = config.ci == CiSelection::Formula || config.ci == CiSelection::All;
    const bool want_fieller = config.ci == CiSelection::Fieller || config.ci == CiSelection::All;
    const bool want_boot = config.ci == CiSelection::Bootstrap || config.ci == CiSelection::All;

    std::vector<std::string> groups{kWorld};
    groups.insert(groups.end(), corpus.groups().begin(), corpus.groups().end());

    for (const auto& group : groups) {
        std::optional<std::set<FieldYearKey>> retained;
        if (group != kWorld && config.exclusion) {
            retained = apply_exclusion(corpus, group, *config.exclusion);
        }
        for (const auto& scope : scopes_for(corpus, group)) {
            for (Indicator indicator : config.indicators) {
                std::vector<FieldYearKey> keys = scope.keys;
                std::string exclusion_note;
                if (retained && uses_exclusion(indicator)) {
                    std::vector<FieldYearKey> kept;
                    std::string dropped;
                    for (const auto& k : keys) {
                        if (retained->contains(k)) {
                            kept.push_back(k);
                        } else {
                            dropped += (dropped.empty() ? "" : " ") + k.label();
                        }
                    }
                    if (!dropped.empty()) {
                        exclusion_note = "excluded small cells: " + dropped;
                    }
                    keys = std::move(kept);
                }
                const auto slice = make_slice(corpus, group, keys);
                IndicatorValue value = evaluate(indicator, slice, group);
                if (keys.empty()) {
                    value.indicator = indicator;
                    value.note = "no cells retained by exclusion policy";
                }

                if (want_formula) {
                    report.rows.push_back(make_row(
                        group, scope.label, value,
                        analytic_interval(indicator, AnalyticKind::Formula, slice, analytic),
                        exclusion_note));
                }
                if (want_fieller && fieller_applicable(indicator)) {
                    report.rows.push_back(make_row(
                        group, scope.label, value,
                        analytic_interval(indicator, AnalyticKind::Fieller, slice, analytic),
                        exclusion_note));
                }
                if (want_boot) {
                    BootstrapSpec spec;
                    spec.alpha = config.alpha;
                    spec.iterations = config.bootstrap_iters == 0 ? default_iterations(indicator)
                                                                  : config.bootstrap_iters;
                    spec.resample_world = indicator != Indicator::MNCS;
                    spec.threads = config.threads;
                    spec.seed = derive_seed(config.seed, {label_hash(group), label_hash(scope.label),
                                                          label_hash(to_string(indicator))});
                    report.rows.push_back(
                        make_row(group, scope.label, value,
                                 bootstrap_indicator(slice, indicator, group, spec).interval,
                                 exclusion_note));
                }
            }
        }
    }

    std::sort(report.rows.begin(), report.rows.end(), [](const ReportRow& a, const ReportRow& b) {
        return std::tie(a.group, a.scope, a.indicator, a.method) <
               std::tie(b.group, b.scope, b.indicator, b.method);
    });
    return report;
}

// ---------------------------------------------------------------------------
//  CSV
// ---------------------------------------------------------------------------

std::string format_number(double value)
{
    if (value == 0.0) {
        value = 0.0;  // drop the sign of negative zero
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%#.6g", value);
    return buf;
}

std::string csv_escape(const std::string& field)
{
    if (field.find_first_of(",\"\r\n") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::string to_csv(const IndicatorReport& report)
{
    std::ostringstream out;
    out << kCsvHeader << '\n';
    auto num = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    for (const auto& r : report.rows) {
        out << csv_escape(r.group) << ',' << csv_escape(r.scope) << ',' << r.n << ','
            << csv_escape(r.indicator) << ',' << num(r.estimate) << ',' << num(r.lower) << ','
            << num(r.upper) << ',' << csv_escape(r.method) << ',' << (r.defined ? "true" : "false")
            << ',' << csv_escape(r.notes) << '\n';
    }
    return out.str();
}

void write_csv(const IndicatorReport& report, const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << to_csv(report);
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

std::vector<std::vector<std::string>> parse_csv_records(const std::string& text)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool pending = false;  // a record has started
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            quoted = true;
            pending = true;
            break;
        case ',':
            record.push_back(std::move(field));
            field.clear();
            pending = true;
            break;
        case '\r': break;
        case '\n':
            record.push_back(std::move(field));
            field.clear();
            records.push_back(std::move(record));
            record.clear();
            pending = false;
            break;
        default:
            field += c;
            pending = true;
        }
    }
    if (quoted) {
        throw std::runtime_error("unterminated quoted CSV field");
    }
    if (pending) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    return records;
}

std::vector<ReportRow> parse_csv(const std::string& text)
{
    const auto records = parse_csv_records(text);
    if (records.empty()) {
        throw std::runtime_error("empty CSV");
    }
    std::string header;
    for (std::size_t i = 0; i < records.front().size(); ++i) {
        header += (i ? "," : "") + records.front()[i];
    }
    if (header != kCsvHeader) {
        throw std::runtime_error("unexpected CSV header: " + header);
    }
    auto num = [](const std::string& s) -> std::optional<double> {
        if (s.empty()) {
            return std::nullopt;
        }
        return std::stod(s);
    };
    std::vector<ReportRow> rows;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& f = records[i];
        if (f.size() != 10) {
            throw std::runtime_error("CSV record " + std::to_string(i + 1) + " has " +
                                     std::to_string(f.size()) + " fields");
        }
        ReportRow r;
        r.group = f[0];
        r.scope = f[1];
        r.n = static_cast<std::size_t>(std::stoull(f[2]));
        r.indicator = f[3];
        r.estimate = num(f[4]);
        r.lower = num(f[5]);
        r.upper = num(f[6]);
        r.method = f[7];
        r.defined = f[8] == "true";
        r.notes = f[9];
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<ReportRow> read_csv(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

void write_metadata(const IndicatorReport& report, const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << report.metadata.dump(2) << '\n';
}

}  // namespace normcite
