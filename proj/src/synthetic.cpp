#include "normcite/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "normcite/seeding.hpp"

namespace normcite {

namespace {

constexpr double kMaxCount = 1e15;

double upper_tail(double z)
{
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

double density(double z)
{
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

std::string format_label(double mu, double sigma, double zi, std::size_t n)
{
    std::ostringstream s;
    s << "mu=" << mu << ",sigma=" << sigma << ",zi=" << zi << ",n=" << n;
    return s.str();
}

}  // namespace

void LognormalSpec::validate() const
{
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("sigma must be positive");
    }
    if (!(zero_inflation >= 0.0 && zero_inflation < 1.0)) {
        throw std::invalid_argument("zero_inflation must lie in [0, 1)");
    }
    if (n < 1) {
        throw std::invalid_argument("cell size must be at least 1");
    }
    if (!std::isfinite(mu)) {
        throw std::invalid_argument("mu must be finite");
    }
}

ArticleSet generate_cell(const LognormalSpec& spec, const FieldYearKey& key,
                         const std::string& group)
{
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(spec.mu, spec.sigma);

    ArticleSet cell;
    cell.group = group;
    cell.key = key;
    cell.counts.reserve(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        if (spec.zero_inflation > 0.0 && unit(rng) < spec.zero_inflation) {
            cell.counts.push_back(0);
            continue;
        }
        const double c = std::round(std::exp(normal(rng)) - 1.0);
        cell.counts.push_back(static_cast<Count>(std::clamp(c, 0.0, kMaxCount)));
    }
    return cell;
}

double population_log_mean(double mu, double sigma, double zero_inflation)
{
    LognormalSpec{mu, sigma, zero_inflation, 1, 0}.validate();
    // c = k iff k - 0.5 <= exp(x) - 1 < k + 0.5; c = 0 absorbs everything below.
    const double kmax = std::min(1e6, std::ceil(std::exp(mu + 8.5 * sigma)));
    const auto last = static_cast<std::uint64_t>(std::max(kmax, 2.0));
    double sum = 0.0;
    double tail_lo = upper_tail((std::log(1.5) - mu) / sigma);
    for (std::uint64_t k = 1; k < last; ++k) {
        const double tail_hi = upper_tail((std::log(static_cast<double>(k) + 1.5) - mu) / sigma);
        sum += std::log1p(static_cast<double>(k)) * (tail_lo - tail_hi);
        tail_lo = tail_hi;
    }
    // Beyond the cut ln(1+c) and x differ by under 1e-6.
    const double z = (std::log(static_cast<double>(last) + 0.5) - mu) / sigma;
    sum += mu * upper_tail(z) + sigma * density(z);
    return (1.0 - zero_inflation) * sum;
}

double population_prop_cited(double mu, double sigma, double zero_inflation)
{
    LognormalSpec{mu, sigma, zero_inflation, 1, 0}.validate();
    return (1.0 - zero_inflation) * upper_tail((std::log(1.5) - mu) / sigma);
}

void ScenarioGridSpec::validate() const
{
    if (mu.empty() || sigma.empty() || zero_inflation.empty() || n.empty()) {
        throw std::invalid_argument("scenario grid axes must be non-empty");
    }
    if (groups.empty() || fields.empty() || years.empty()) {
        throw std::invalid_argument("scenario grid needs at least one group, field and year");
    }
    for (const auto& g : groups) {
        if (g.label.empty() || g.label == kWorld) {
            throw std::invalid_argument("invalid group label '" + g.label + "'");
        }
    }
    for (const auto& f : fields) {
        FieldYearKey{f, 2000}.validate();
    }
    for (int y : years) {
        FieldYearKey{"F", y}.validate();
    }
}

std::vector<Scenario> scenario_grid(const ScenarioGridSpec& spec)
{
    spec.validate();
    std::vector<Scenario> out;
    for (std::size_t a = 0; a < spec.mu.size(); ++a) {
        for (std::size_t b = 0; b < spec.sigma.size(); ++b) {
            for (std::size_t c = 0; c < spec.zero_inflation.size(); ++c) {
                for (std::size_t d = 0; d < spec.n.size(); ++d) {
                    Scenario s;
                    s.mu = spec.mu[a];
                    s.sigma = spec.sigma[b];
                    s.zero_inflation = spec.zero_inflation[c];
                    s.n = spec.n[d];
                    s.label = format_label(s.mu, s.sigma, s.zero_inflation, s.n);

                    for (const auto& field : spec.fields) {
                        for (int year : spec.years) {
                            const FieldYearKey key{field, year};
                            auto cell_seed = [&](const std::string& group) {
                                return derive_seed(spec.seed,
                                                   {a, b, c, d, label_hash(group), label_hash(field),
                                                    static_cast<std::uint64_t>(year)});
                            };
                            const std::size_t world_n = spec.world_n == 0 ? s.n : spec.world_n;
                            s.corpus.add(generate_cell(
                                {s.mu, s.sigma, s.zero_inflation, world_n, cell_seed(kWorld)}, key,
                                kWorld));
                            for (const auto& g : spec.groups) {
                                s.corpus.add(generate_cell({s.mu + g.mu_shift, s.sigma,
                                                            s.zero_inflation, s.n,
                                                            cell_seed(g.label)},
                                                           key, g.label));
                            }
                        }
                    }
                    s.corpus.validate();
                    out.push_back(std::move(s));
                }
            }
        }
    }
    return out;
}

ScenarioGridSpec wiki_like_grid()
{
    ScenarioGridSpec spec;
    spec.mu = {0.8};
    spec.sigma = {1.0};
    spec.zero_inflation = {0.98};
    spec.n = {500};
    return spec;
}

}  // namespace normcite
