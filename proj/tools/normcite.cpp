#include <iostream>

#include <CLI11.hpp>

#include "normcite/cli.hpp"

namespace {

using namespace normcite;

void add_grid_options(CLI::App* app, ScenarioGridSpec& grid)
{
    app->add_option("--mu", grid.mu, "lognormal mu values")->delimiter(',');
    app->add_option("--sigma", grid.sigma, "lognormal sigma values")->delimiter(',');
    app->add_option("--zero-inflation", grid.zero_inflation, "zero-inflation probabilities")
        ->delimiter(',');
    app->add_option("--n", grid.n, "articles per cell")->delimiter(',');
    app->add_option("--world-n", grid.world_n, "world cell size (0: same as --n)");
    app->add_option("--fields", grid.fields, "field labels")->delimiter(',');
    app->add_option("--years", grid.years, "publication years")->delimiter(',');
}

/// Wiki-like defaults for every distribution flag the user left unset.
void apply_wiki_like(CLI::App* app, ScenarioGridSpec& grid)
{
    const ScenarioGridSpec wiki = wiki_like_grid();
    if (app->get_option("--mu")->count() == 0) grid.mu = wiki.mu;
    if (app->get_option("--sigma")->count() == 0) grid.sigma = wiki.sigma;
    if (app->get_option("--zero-inflation")->count() == 0) grid.zero_inflation = wiki.zero_inflation;
    if (app->get_option("--n")->count() == 0) grid.n = wiki.n;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Field-normalised citation indicators with confidence intervals"};
    app.require_subcommand(1);

    // compute
    RunConfig run;
    std::vector<std::string> run_indicators{"mnlcs", "mncs", "lundberg", "emnpc", "mnpc", "prop"};
    std::string ci = "formula";
    std::string continuity = "auto";
    std::string expansion = "literal";
    std::size_t min_articles = 100;
    double min_fraction = 0.25;
    bool no_exclusion = false;
    auto* compute = app.add_subcommand("compute", "compute indicators and intervals for a corpus");
    compute->add_option("--input-dir", run.input_dir, "directory of cell files")->required();
    compute->add_option("--output", run.output, "report CSV path")->required();
    compute->add_option("--indicators", run_indicators, "mnlcs,mncs,lundberg,emnpc,mnpc,prop")
        ->delimiter(',');
    compute->add_option("--ci-method,--ci", ci, "formula, fieller, bootstrap or all");
    compute->add_option("--alpha", run.report.alpha, "two-sided error rate");
    compute->add_option("--bootstrap-iters", run.report.bootstrap_iters,
                        "bootstrap iterations (0: 1000 mean, 10000 proportion)");
    compute->add_option("--seed", run.report.seed, "random seed");
    compute->add_option("--sample-size", run.sample_size, "sample each cell to this size first");
    compute->add_option("--world-sample-size", run.world_sample_size,
                        "world cell sample size (default: --sample-size)");
    compute->add_option("--exclusion-min-articles", min_articles, "exclude smaller cells");
    compute->add_option("--exclusion-min-fraction", min_fraction,
                        "exclude cells below this fraction of the mean cell size");
    compute->add_flag("--no-exclusion", no_exclusion, "keep every cell");
    compute->add_option("--continuity", continuity, "auto, on or off");
    compute->add_option("--expansion-mode", expansion, "literal or expand_from_mean");
    compute->add_option("--threads", run.report.threads, "bootstrap worker threads (0: auto)");

    // sample
    SampleConfig sample;
    auto* sample_cmd = app.add_subcommand("sample", "sample articles from every cell");
    sample_cmd->add_option("--input-dir", sample.input_dir, "directory of cell files")->required();
    sample_cmd->add_option("--output-dir", sample.output_dir, "destination directory")->required();
    sample_cmd->add_option("--sample-size", sample.sample_size, "articles per cell");
    sample_cmd->add_option("--world-sample-size", sample.world_sample_size,
                           "articles per world cell (default: --sample-size)");
    sample_cmd->add_option("--seed", sample.seed, "random seed");

    // simulate
    SimulateConfig simulate;
    std::vector<std::string> sim_groups{"GROUP"};
    std::vector<double> sim_shifts;
    bool wiki_like = false;
    auto* simulate_cmd = app.add_subcommand("simulate", "write synthetic corpora");
    simulate_cmd->add_option("--output-dir", simulate.output_dir, "destination directory")
        ->required();
    add_grid_options(simulate_cmd, simulate.grid);
    simulate_cmd->add_option("--groups", sim_groups, "group labels")->delimiter(',');
    simulate_cmd->add_option("--group-mu-shift", sim_shifts, "additive mu shift per group")
        ->delimiter(',');
    simulate_cmd->add_flag("--wiki-like", wiki_like, "sparse web-mention style scenario");
    simulate_cmd->add_option("--seed", simulate.grid.seed, "random seed");

    // compare-ci
    CompareConfig compare;
    std::vector<std::string> cmp_indicators{"mnlcs"};
    std::string cmp_continuity = "auto";
    std::string world_mode = "auto";
    std::string basis = "full";
    bool cmp_wiki_like = false;
    auto* compare_cmd =
        app.add_subcommand("compare-ci", "compare formula and bootstrap confidence intervals");
    compare_cmd->add_option("--input-dir", compare.input_dirs,
                            "corpus directories (default: generated grid)");
    compare_cmd->add_option("--output", compare.output, "summary CSV path")->required();
    compare_cmd->add_option("--indicators", cmp_indicators, "mnlcs,mncs,lundberg,emnpc,mnpc,prop")
        ->delimiter(',');
    compare_cmd->add_option("--source", compare.source, "label for the summary rows");
    compare_cmd->add_option("--alpha", compare.options.alpha, "two-sided error rate");
    compare_cmd->add_option("--bootstrap-iters", compare.options.iterations,
                            "bootstrap iterations (0: 1000 mean, 10000 proportion)");
    compare_cmd->add_option("--seed", compare.options.seed, "random seed");
    compare_cmd->add_option("--resample-world", world_mode, "auto, on or off");
    compare_cmd->add_option("--width-basis", basis, "full or half");
    compare_cmd->add_option("--continuity", cmp_continuity, "auto, on or off");
    compare_cmd->add_option("--threads", compare.options.threads,
                            "bootstrap worker threads (0: auto)");
    add_grid_options(compare_cmd, compare.grid);
    compare_cmd->add_flag("--wiki-like", cmp_wiki_like, "sparse web-mention style grid");

    CLI11_PARSE(app, argc, argv);

    try {
        if (compute->parsed()) {
            run.report.indicators = parse_cli_indicators(run_indicators);
            run.report.ci = parse_ci_selection(ci);
            run.report.continuity = parse_continuity(continuity);
            run.report.expansion = parse_expansion_mode(expansion);
            if (no_exclusion) {
                run.report.exclusion.reset();
            } else {
                run.report.exclusion = ExclusionPolicy{min_articles, min_fraction};
            }
            return cmd_compute(run, std::cout, std::cerr);
        }
        if (sample_cmd->parsed()) {
            return cmd_sample(sample, std::cout, std::cerr);
        }
        if (simulate_cmd->parsed()) {
            if (wiki_like) {
                apply_wiki_like(simulate_cmd, simulate.grid);
            }
            if (!sim_shifts.empty() && sim_shifts.size() != sim_groups.size()) {
                throw std::invalid_argument("--group-mu-shift needs one value per group");
            }
            simulate.grid.groups.clear();
            for (std::size_t i = 0; i < sim_groups.size(); ++i) {
                simulate.grid.groups.push_back(
                    {sim_groups[i], sim_shifts.empty() ? 0.0 : sim_shifts[i]});
            }
            return cmd_simulate(simulate, std::cout, std::cerr);
        }
        if (compare_cmd->parsed()) {
            if (cmp_wiki_like) {
                apply_wiki_like(compare_cmd, compare.grid);
            }
            compare.options.indicators = parse_cli_indicators(cmp_indicators);
            compare.options.continuity = parse_continuity(cmp_continuity);
            if (world_mode == "auto") {
                compare.options.resample_world = WorldResampling::Auto;
            } else if (world_mode == "on") {
                compare.options.resample_world = WorldResampling::On;
            } else if (world_mode == "off") {
                compare.options.resample_world = WorldResampling::Off;
            } else {
                throw std::invalid_argument("--resample-world must be auto, on or off");
            }
            if (basis == "full") {
                compare.options.basis = WidthBasis::Full;
            } else if (basis == "half") {
                compare.options.basis = WidthBasis::Half;
            } else {
                throw std::invalid_argument("--width-basis must be full or half");
            }
            compare.grid.seed = compare.options.seed;
            return cmd_compare_ci(compare, std::cout, std::cerr);
        }
    } catch (const std::exception& e) {
        std::cerr << "normcite: error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
