#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "normcite/indicators.hpp"
#include "normcite/synthetic.hpp"
#include "support.hpp"

using namespace normcite;
using namespace normcite::testing;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

IndicatorValue eval_all(const Corpus& corpus, Indicator indicator, const std::string& group)
{
    const auto keys = corpus.keys_of(group);
    const auto slice = make_slice(corpus, group, keys);
    return evaluate(indicator, slice, group);
}

IndicatorValue eval_key(const Corpus& corpus, Indicator indicator, const std::string& group,
                        const FieldYearKey& key)
{
    const std::vector<FieldYearKey> keys{key};
    const auto slice = make_slice(corpus, group, keys);
    return evaluate(indicator, slice, group);
}

double round_to(double x, int digits)
{
    const double f = std::pow(10.0, digits);
    return std::round(x * f) / f;
}

}  // namespace

TEST_CASE("worked example: log-normalised scores")
{
    const Corpus c = load_corpus(fixture("worked_example"));
    const FieldYearKey a{"A", 2015};
    const FieldYearKey b{"B", 2015};

    const auto la = compute_baseline(c.world(a));
    const auto lb = compute_baseline(c.world(b));
    CHECK_THAT(la.log_mean, WithinAbs(0.6386879, 1e-7));
    CHECK_THAT(lb.log_mean, WithinAbs(0.8265650, 1e-7));
    CHECK(round_to(la.log_mean, 2) == 0.64);
    CHECK(round_to(lb.log_mean, 2) == 0.83);

    const auto sa = normalize_log(c.cell("GROUP", a), la);
    const auto sb = normalize_log(c.cell("GROUP", b), lb);
    double suma = 0.0;
    double sumb = 0.0;
    for (double v : sa.values) suma += v;
    for (double v : sb.values) sumb += v;
    CHECK_THAT(suma, WithinAbs(6.5598, 1e-4));
    CHECK_THAT(sumb, WithinAbs(4.3354, 1e-4));

    CHECK_THAT(eval_key(c, Indicator::MNLCS, "GROUP", a).estimate, WithinAbs(1.31196, 1e-5));
    CHECK_THAT(eval_key(c, Indicator::MNLCS, "GROUP", b).estimate, WithinAbs(0.867087, 1e-6));
    const auto all = eval_all(c, Indicator::MNLCS, "GROUP");
    CHECK_THAT(all.estimate, WithinAbs(1.0895219, 1e-7));
    CHECK(all.n == 10);
    CHECK_THAT(eval_all(c, Indicator::MNLCS, kWorld).estimate, WithinAbs(1.0, 1e-12));
    CHECK_THAT(eval_key(c, Indicator::MNLCS, kWorld, a).estimate, WithinAbs(1.0, 1e-12));
}

TEST_CASE("worked example: proportion indicators")
{
    const Corpus c = load_corpus(fixture("worked_example"));
    CHECK_THAT(eval_all(c, Indicator::EMNPC, "GROUP").estimate, WithinAbs(0.70 / 0.65, 1e-12));
    CHECK_THAT(eval_all(c, Indicator::MNPC, "GROUP").estimate, WithinAbs(1.1, 1e-12));
    CHECK_THAT(eval_key(c, Indicator::EMNPC, "GROUP", {"A", 2015}).estimate, WithinAbs(1.2, 1e-12));
    CHECK_THAT(eval_all(c, Indicator::PROP_CITED, "GROUP").estimate, WithinAbs(0.7, 1e-12));
    CHECK_THAT(eval_all(c, Indicator::PROP_CITED, kWorld).estimate, WithinAbs(0.65, 1e-12));
}

TEST_CASE("Lundberg z-scores against an independent computation")
{
    const Corpus c = load_corpus(fixture("worked_example"));
    const auto v = eval_key(c, Indicator::LUNDBERG_Z, "GROUP", {"A", 2015});
    CHECK_THAT(v.estimate, WithinAbs(0.248795, 1e-6));
    CHECK_THAT(eval_all(c, Indicator::LUNDBERG_Z, kWorld).estimate, WithinAbs(0.0, 1e-12));

    const std::vector<Count> flat{3, 3, 3};
    const auto b = compute_baseline({"F", 2015}, flat);
    CHECK_THROWS_AS(z_scores(flat, b), UndefinedIndicator);
    const std::vector<Count> single{4};
    CHECK(std::isnan(compute_baseline({"F", 2015}, single).log_sd));
}

TEST_CASE("MNCS divides by the world mean count")
{
    const Corpus c = load_corpus(fixture("worked_example"));
    // World A mean 1.7, world B mean 1.6.
    const double expected = ((0 + 0 + 1 + 2 + 10) / 1.7 + (0 + 1 + 1 + 2 + 2) / 1.6) / 10.0;
    CHECK_THAT(eval_all(c, Indicator::MNCS, "GROUP").estimate, WithinAbs(expected, 1e-12));
}

TEST_CASE("fields C and D: EMNPC and MNPC")
{
    const Corpus c = load_corpus(fixture("fields_cd"));
    CHECK(round_to(eval_all(c, Indicator::EMNPC, "GROUP").estimate, 3) == 0.542);
    CHECK(round_to(eval_all(c, Indicator::MNPC, "GROUP").estimate, 3) == 0.833);
    CHECK_THAT(eval_all(c, Indicator::EMNPC, "GROUP").estimate, WithinAbs(0.13 / 0.24, 1e-12));
    CHECK_THAT(eval_all(c, Indicator::MNPC, "GROUP").estimate,
               WithinAbs(100.0 / 300 * 2 + 200.0 / 300 * 0.25, 1e-12));
}

TEST_CASE("equalisation removes the field-mix advantage")
{
    const Corpus c = load_corpus(fixture("groups_ab"));
    CHECK_THAT(eval_all(c, Indicator::PROP_CITED, "A").estimate, WithinAbs(0.60, 1e-12));
    CHECK_THAT(eval_all(c, Indicator::PROP_CITED, "B").estimate, WithinAbs(0.40, 1e-12));
    CHECK_THAT(eval_all(c, Indicator::EQ_PROP_CITED, "A").estimate, WithinAbs(0.50, 1e-12));
    CHECK_THAT(eval_all(c, Indicator::EQ_PROP_CITED, "B").estimate, WithinAbs(0.50, 1e-12));
    CHECK_THAT(eval_all(c, Indicator::EMNPC, "A").estimate,
               WithinAbs(eval_all(c, Indicator::EMNPC, "B").estimate, 1e-12));

    std::vector<ProportionSummary> sets;
    for (const auto& key : c.keys_of("A")) {
        sets.push_back(summarize_proportion(c.cell("A", key)));
    }
    const auto eq = equalised_proportion(sets);
    CHECK_THAT(eq.effective_cell_size, WithinAbs(150.0, 1e-12));
    CHECK_THAT(eq.total, WithinAbs(300.0, 1e-12));
}

TEST_CASE("EMNPC favours success in high-citation fields, MNPC does not")
{
    const Corpus c = load_corpus(fixture("groups_xy"));
    CHECK_THAT(eval_all(c, Indicator::EMNPC, "A").estimate, WithinAbs(1.06, 1e-12));
    CHECK_THAT(eval_all(c, Indicator::EMNPC, "B").estimate, WithinAbs(0.94, 1e-12));
    CHECK_THAT(eval_all(c, Indicator::MNPC, "A").estimate, WithinAbs(1.0, 1e-12));
    CHECK_THAT(eval_all(c, Indicator::MNPC, "B").estimate, WithinAbs(1.0, 1e-12));
}

TEST_CASE("MNPC zero-denominator handling")
{
    SECTION("k/0 leaves MNPC undefined while EMNPC stays defined")
    {
        const Corpus c = load_corpus(fixture("zero_world_cell"));
        const auto m = eval_all(c, Indicator::MNPC, "GROUP");
        CHECK_FALSE(m.defined);
        CHECK(m.note == "positive numerator over zero world proportion in F2/2015");
        CHECK(m.n == 200);
        const auto e = eval_all(c, Indicator::EMNPC, "GROUP");
        CHECK(e.defined);
        CHECK_THAT(e.estimate, WithinAbs((0.25 + 0.03) / 0.2, 1e-12));
    }
    SECTION("all-zero world leaves both undefined")
    {
        const Corpus c = load_corpus(fixture("all_zero_world"));
        CHECK_FALSE(eval_all(c, Indicator::MNPC, "GROUP").defined);
        const auto e = eval_all(c, Indicator::EMNPC, "GROUP");
        CHECK_FALSE(e.defined);
        CHECK(e.note == "world equalised proportion cited is zero");
        CHECK_FALSE(eval_all(c, Indicator::MNLCS, "GROUP").defined);
    }
    SECTION("0/0 counts as one with a note")
    {
        Corpus c;
        c.add(make_cell("G", "F1", 2015, binary_counts(100, 30)));
        c.add(make_cell("G", "F2", 2015, binary_counts(100, 0)));
        c.add(make_cell(kWorld, "F1", 2015, binary_counts(100, 20)));
        c.add(make_cell(kWorld, "F2", 2015, binary_counts(100, 0)));
        const auto m = eval_all(c, Indicator::MNPC, "G");
        CHECK(m.defined);
        CHECK_THAT(m.estimate, WithinAbs(0.5 * 1.5 + 0.5 * 1.0, 1e-12));
        CHECK(m.note == "0/0 field ratio replaced by 1 (F2/2015)");
    }
}

TEST_CASE("undefined normalisation is flagged, not thrown")
{
    Corpus c;
    c.add(make_cell("G", "F", 2015, {1, 2}));
    c.add(make_cell(kWorld, "F", 2015, {0, 0, 0}));
    for (auto i : {Indicator::MNLCS, Indicator::MNCS, Indicator::LUNDBERG_Z}) {
        const auto v = eval_all(c, i, "G");
        CHECK_FALSE(v.defined);
        CHECK(v.indicator == i);
        CHECK(v.note.starts_with("undefined normalisation"));
    }
    const std::vector<FieldYearKey> none;
    CHECK_FALSE(evaluate(Indicator::MNLCS, make_slice(c, "G", none), "G").defined);
    const auto b = compute_baseline(c.world({"F", 2015}));
    CHECK_THROWS_AS(normalize_log(c.cell("G", {"F", 2015}), b), UndefinedIndicator);
    CHECK_THROWS_AS(normalize_cited(c.cell("G", {"F", 2015}), b), UndefinedIndicator);
    CHECK_THROWS_AS(compute_baseline(c.cell("G", {"F", 2015})), std::invalid_argument);
}

TEST_CASE("indicator names")
{
    for (auto i : {Indicator::MNLCS, Indicator::MNCS, Indicator::LUNDBERG_Z, Indicator::EMNPC,
                   Indicator::MNPC, Indicator::PROP_CITED, Indicator::EQ_PROP_CITED}) {
        CHECK(parse_indicator(to_string(i)) == i);
    }
    CHECK_THROWS_AS(parse_indicator("mnlcs"), std::invalid_argument);
    CHECK(is_proportion_indicator(Indicator::EMNPC));
    CHECK_FALSE(is_proportion_indicator(Indicator::MNLCS));
}

TEST_CASE("properties over random corpora")
{
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> mu(0.2, 2.0);
    std::uniform_real_distribution<double> sigma(0.5, 1.5);
    std::uniform_int_distribution<std::size_t> size(20, 400);
    std::uniform_int_distribution<int> cells(1, 4);

    for (int trial = 0; trial < 30; ++trial) {
        Corpus c;
        const int k = cells(rng);
        for (int f = 0; f < k; ++f) {
            const FieldYearKey key{"F" + std::to_string(f), 2010 + f % 2};
            const LognormalSpec world{mu(rng), sigma(rng), 0.1, size(rng), rng()};
            c.add(generate_cell(world, key, kWorld));
            const LognormalSpec group{mu(rng), sigma(rng), 0.1, size(rng), rng()};
            c.add(generate_cell(group, key, "G"));
        }
        const auto keys = c.keys_of("G");
        const auto slice = make_slice(c, "G", keys);

        // The MNPC sum of ratios equals the mean of cited reciprocals.
        const auto scores = normalized_slice(Transform::CitedReciprocal, slice, "G");
        const auto mean = mean_score(scores);
        CHECK(mean.indicator == Indicator::MNPC);
        CHECK_THAT(mean.estimate, WithinRel(evaluate(Indicator::MNPC, slice, "G").estimate, 1e-12));

        // The flat accumulation matches the explicit per-article path.
        const auto logs = normalized_slice(Transform::LogRatio, slice, "G");
        CHECK_THAT(mean_score(logs).estimate,
                   WithinRel(evaluate(Indicator::MNLCS, slice, "G").estimate, 1e-12));
        const auto zs = normalized_slice(Transform::ZScore, slice, "G");
        CHECK_THAT(mean_score(zs).estimate,
                   WithinAbs(evaluate(Indicator::LUNDBERG_Z, slice, "G").estimate, 1e-12));

        // Scaling every group count up never lowers MNLCS.
        Corpus boosted;
        for (const auto& [id, cell] : c.cells()) {
            ArticleSet copy = cell;
            if (!copy.is_world()) {
                for (auto& x : copy.counts) x = 2 * x + 1;
            }
            boosted.add(copy);
        }
        CHECK(eval_all(boosted, Indicator::MNLCS, "G").estimate >
              eval_all(c, Indicator::MNLCS, "G").estimate);
    }
}
