#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "normcite/corpus.hpp"

namespace normcite {

/// Discretised lognormal counts: with probability zero_inflation emit 0,
/// otherwise c = max(0, round(exp(x) - 1)) with x ~ Normal(mu, sigma), so that
/// ln(1+c) is close to x.
struct LognormalSpec {
    double mu = 1.0;
    double sigma = 1.0;
    double zero_inflation = 0.0;
    std::size_t n = 1000;
    std::uint64_t seed = 0;

    void validate() const;
};

ArticleSet generate_cell(const LognormalSpec& spec, const FieldYearKey& key,
                         const std::string& group);

/// Exact E[ln(1+c)] for the generator above, by summing the discretised
/// probability masses (tail beyond ~1e6 handled with the continuous limit).
double population_log_mean(double mu, double sigma, double zero_inflation);
/// Exact P(c > 0) for the generator above.
double population_prop_cited(double mu, double sigma, double zero_inflation);

struct GroupEffect {
    std::string label;
    double mu_shift = 0.0;  ///< additive on mu, i.e. multiplicative on 1+c
};

struct ScenarioGridSpec {
    std::vector<double> mu{1.0};
    std::vector<double> sigma{1.0};
    std::vector<double> zero_inflation{0.0};
    std::vector<std::size_t> n{1000};
    /// World cell size; 0 uses the scenario's n.
    std::size_t world_n = 0;
    std::vector<GroupEffect> groups{{"GROUP", 0.0}};
    std::vector<std::string> fields{"FIELD"};
    std::vector<int> years{2015};
    std::uint64_t seed = 0;

    void validate() const;
};

struct Scenario {
    std::string label;
    double mu = 0.0;
    double sigma = 0.0;
    double zero_inflation = 0.0;
    std::size_t n = 0;
    Corpus corpus;
};

/// One corpus per point of the mu x sigma x zero_inflation x n product. Each
/// has a world cell and one cell per group for every field/year; cell seeds
/// derive from the grid seed and the cell's coordinates only.
std::vector<Scenario> scenario_grid(const ScenarioGridSpec& spec);

/// Sparse, mostly-zero counts in the style of web-mention indicators
/// (proportion cited around 1.3%).
ScenarioGridSpec wiki_like_grid();

}  // namespace normcite
