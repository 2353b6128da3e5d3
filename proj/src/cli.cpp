#include "normcite/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace normcite {

namespace fs = std::filesystem;

std::vector<Indicator> parse_cli_indicators(const std::vector<std::string>& names)
{
    static const std::map<std::string, std::vector<Indicator>> table{
        {"mnlcs", {Indicator::MNLCS}},
        {"mncs", {Indicator::MNCS}},
        {"lundberg", {Indicator::LUNDBERG_Z}},
        {"emnpc", {Indicator::EMNPC}},
        {"mnpc", {Indicator::MNPC}},
        {"prop", {Indicator::PROP_CITED, Indicator::EQ_PROP_CITED}},
    };
    std::vector<Indicator> out;
    for (const auto& name : names) {
        auto it = table.find(name);
        if (it == table.end()) {
            throw std::invalid_argument("unknown indicator '" + name +
                                        "' (expected mnlcs, mncs, lundberg, emnpc, mnpc, prop)");
        }
        for (Indicator i : it->second) {
            if (std::find(out.begin(), out.end(), i) == out.end()) {
                out.push_back(i);
            }
        }
    }
    if (out.empty()) {
        throw std::invalid_argument("at least one indicator is required");
    }
    return out;
}

fs::path metadata_path(const fs::path& output)
{
    fs::path p = output;
    p.replace_extension(".meta.json");
    return p;
}

fs::path detail_path(const fs::path& output)
{
    fs::path p = output;
    p.replace_extension(".detail.csv");
    return p;
}

namespace {

void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

std::string pct(double fraction)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * fraction);
    return buf;
}

void print_summary(const IndicatorReport& report, std::ostream& out)
{
    // One line per group: ALL-scope estimate of each indicator, first method.
    std::string group;
    std::string line;
    std::string last_indicator;
    std::size_t undefined = 0;
    auto flush = [&] {
        if (!group.empty()) {
            out << group << ':' << line;
            if (undefined > 0) {
                out << " (" << undefined << " undefined rows)";
            }
            out << '\n';
        }
    };
    for (const auto& row : report.rows) {
        if (row.group != group) {
            flush();
            group = row.group;
            line.clear();
            last_indicator.clear();
            undefined = 0;
        }
        if (!row.defined) {
            ++undefined;
        }
        if (row.scope != "ALL" || row.indicator == last_indicator) {
            continue;
        }
        last_indicator = row.indicator;
        line += ' ' + row.indicator + '=' + (row.estimate ? format_number(*row.estimate) : "NA");
    }
    flush();
}

std::string scenario_dir_name(std::size_t index)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "scenario_%03zu", index);
    return buf;
}

}  // namespace

int cmd_compute(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    try {
        config.report.validate();
        if (config.output.empty()) {
            throw std::invalid_argument("an output path is required");
        }
        Corpus corpus = load_corpus(config.input_dir);
        if (config.sample_size) {
            corpus = sample_corpus(corpus, *config.sample_size, config.world_sample_size,
                                   config.report.seed);
        }
        IndicatorReport report = build_report(corpus, config.report);
        report.metadata["input_dir"] = config.input_dir.generic_string();
        report.metadata["sample_size"] =
            config.sample_size ? nlohmann::json(*config.sample_size) : nlohmann::json(nullptr);
        report.metadata["world_sample_size"] =
            config.world_sample_size ? nlohmann::json(*config.world_sample_size)
                                     : nlohmann::json(nullptr);
        write_text(config.output, to_csv(report));
        write_metadata(report, metadata_path(config.output));
        print_summary(report, out);
        return 0;
    } catch (const std::exception& e) {
        err << "normcite compute: error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_sample(const SampleConfig& config, std::ostream& out, std::ostream& err)
{
    try {
        if (config.sample_size == 0) {
            throw std::invalid_argument("sample size must be positive");
        }
        const Corpus corpus = load_corpus(config.input_dir);
        const Corpus sampled =
            sample_corpus(corpus, config.sample_size, config.world_sample_size, config.seed);
        write_corpus(sampled, config.output_dir);
        out << "sampled " << sampled.cells().size() << " cells into "
            << config.output_dir.generic_string() << '\n';
        return 0;
    } catch (const std::exception& e) {
        err << "normcite sample: error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_simulate(const SimulateConfig& config, std::ostream& out, std::ostream& err)
{
    try {
        const auto scenarios = scenario_grid(config.grid);
        fs::create_directories(config.output_dir);
        std::ostringstream manifest;
        manifest << "directory,label,mu,sigma,zero_inflation,n\n";
        for (std::size_t i = 0; i < scenarios.size(); ++i) {
            const auto& s = scenarios[i];
            const std::string dir = scenario_dir_name(i);
            write_corpus(s.corpus, config.output_dir / dir);
            manifest << dir << ',' << csv_escape(s.label) << ',' << format_number(s.mu) << ','
                     << format_number(s.sigma) << ',' << format_number(s.zero_inflation) << ','
                     << s.n << '\n';
        }
        write_text(config.output_dir / "scenarios.csv", manifest.str());
        out << "wrote " << scenarios.size() << " scenarios into "
            << config.output_dir.generic_string() << '\n';
        return 0;
    } catch (const std::exception& e) {
        err << "normcite simulate: error: " << e.what() << '\n';
        return 1;
    }
}

std::string comparison_summary_csv(const std::vector<ComparisonSummary>& summaries)
{
    std::ostringstream out;
    out << "source,indicator,transform,datasets,gaps,lower_avg_pct,upper_avg_pct,"
           "lower_abs_avg_pct,upper_abs_avg_pct,lower_max_pct,upper_max_pct\n";
    for (const auto& s : summaries) {
        out << csv_escape(s.source) << ',' << to_string(s.indicator) << ','
            << csv_escape(s.transform) << ',' << s.datasets << ',' << s.gaps << ','
            << pct(s.lower_avg) << ',' << pct(s.upper_avg) << ',' << pct(s.lower_abs_avg) << ','
            << pct(s.upper_abs_avg) << ',' << pct(s.lower_max) << ',' << pct(s.upper_max) << '\n';
    }
    return out.str();
}

std::string comparison_detail_csv(const std::vector<ComparisonRow>& rows)
{
    std::ostringstream out;
    out << "source,scenario,group,scope,n,indicator,point,formula_lower,formula_upper,"
           "boot_lower,boot_upper,lower_pct_diff,upper_pct_diff,defined,notes\n";
    auto num = [](bool ok, double v) { return ok ? format_number(v) : std::string(); };
    for (const auto& r : rows) {
        out << csv_escape(r.source) << ',' << csv_escape(r.scenario) << ',' << csv_escape(r.group)
            << ',' << csv_escape(r.scope) << ',' << r.n << ',' << to_string(r.indicator) << ','
            << num(r.formula.defined || r.boot.defined, r.point) << ','
            << num(r.formula.defined, r.formula.lower) << ','
            << num(r.formula.defined, r.formula.upper) << ',' << num(r.boot.defined, r.boot.lower)
            << ',' << num(r.boot.defined, r.boot.upper) << ','
            << (r.defined ? pct(r.diff.lower_pct_diff) : "") << ','
            << (r.defined ? pct(r.diff.upper_pct_diff) : "") << ','
            << (r.defined ? "true" : "false") << ',' << csv_escape(r.note) << '\n';
    }
    return out.str();
}

int cmd_compare_ci(const CompareConfig& config, std::ostream& out, std::ostream& err)
{
    try {
        if (config.output.empty()) {
            throw std::invalid_argument("an output path is required");
        }
        std::vector<ComparisonScenario> scenarios;
        if (config.input_dirs.empty()) {
            for (auto& s : scenario_grid(config.grid)) {
                scenarios.push_back({config.source, s.label, std::move(s.corpus)});
            }
        } else {
            for (const auto& dir : config.input_dirs) {
                scenarios.push_back({config.source, dir.generic_string(), load_corpus(dir)});
            }
        }
        const auto table = comparison_suite(scenarios, config.options);
        write_text(config.output, comparison_summary_csv(table.summaries));
        write_text(detail_path(config.output), comparison_detail_csv(table.rows));
        for (const auto& s : table.summaries) {
            out << s.source << ' ' << to_string(s.indicator) << " [" << s.transform
                << "]: datasets=" << s.datasets << " gaps=" << s.gaps
                << " avg lower/upper=" << pct(s.lower_avg) << "%/" << pct(s.upper_avg)
                << "% abs=" << pct(s.lower_abs_avg) << "%/" << pct(s.upper_abs_avg) << "%\n";
        }
        return 0;
    } catch (const std::exception& e) {
        err << "normcite compare-ci: error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace normcite
