#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "normcite/intervals.hpp"
#include "support.hpp"

using namespace normcite;
using namespace normcite::testing;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("critical values")
{
    CHECK_THAT(t_critical(1, 0.05), WithinAbs(12.7062, 1e-4));
    CHECK_THAT(t_critical(30, 0.05), WithinAbs(2.04227, 1e-5));
    CHECK_THAT(t_critical(1000000, 0.05), WithinAbs(1.959966, 1e-6));
    CHECK_THAT(z_critical(0.05), WithinAbs(1.959964, 1e-6));
    CHECK_THAT(z_critical(0.10), WithinAbs(1.644854, 1e-6));
    CHECK_THROWS_AS(t_critical(0, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(z_critical(0.0), std::invalid_argument);
}

TEST_CASE("normal mean interval")
{
    const std::vector<double> v{1, 2, 3, 4, 5};
    const auto ci = normal_mean_ci(v, 0.05);
    CHECK(ci.method == Method::NORMAL_T);
    CHECK_THAT(ci.estimate, WithinAbs(3.0, 1e-12));
    CHECK_THAT(ci.lower, WithinAbs(1.036757, 1e-6));
    CHECK_THAT(ci.upper, WithinAbs(4.963243, 1e-6));
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(normal_mean_ci(one, 0.05), std::invalid_argument);
}

TEST_CASE("Fieller interval")
{
    const auto g = SampleMoments::from_summary(1.2, 0.02, 500);
    const auto w = SampleMoments::from_summary(1.0, 0.02, 500);
    const auto ci = fieller_ci(g, w, 0.05);
    REQUIRE(ci.defined);
    CHECK(ci.method == Method::FIELLER);
    CHECK_THAT(ci.lower, WithinAbs(1.14047046, 1e-7));
    CHECK_THAT(ci.upper, WithinAbs(1.26323201, 1e-7));
    CHECK_THAT(ci.h, WithinAbs(0.00154032, 1e-8));
    CHECK_THAT(ci.estimate, WithinAbs(1.2, 1e-12));

    SECTION("agrees with a simulated ratio distribution")
    {
        // Quantiles of 1e5 draws of N(1.2, .02)/N(1, .02), computed offline.
        CHECK_THAT(ci.lower, WithinAbs(1.14054, 0.002));
        CHECK_THAT(ci.upper, WithinAbs(1.26305, 0.002));
    }
    SECTION("h >= 1 gives infinite limits")
    {
        const auto noisy = SampleMoments::from_summary(1.0, 0.6, 10);
        const auto r = fieller_ci(g, noisy, 0.05);
        CHECK_FALSE(r.defined);
        CHECK(r.h >= 1.0);
        CHECK(r.note == "h >= 1: confidence limits are infinite");
    }
    SECTION("tiny world error reduces to the scaled normal interval")
    {
        const auto gm = SampleMoments::from_summary(1.3, 0.05, 10000);
        const auto wm = SampleMoments::from_summary(0.9, 1e-12, 10000);
        const auto r = fieller_ci(gm, wm, 0.05);
        const double t = t_critical(19998, 0.05);
        CHECK_THAT(r.lower, WithinRel((1.3 - t * 0.05) / 0.9, 1e-9));
        CHECK_THAT(r.upper, WithinRel((1.3 + t * 0.05) / 0.9, 1e-9));
    }
    SECTION("a zero group mean stays finite")
    {
        const auto zero = SampleMoments::from_summary(0.0, 0.0, 50);
        const auto r = fieller_ci(zero, w, 0.05);
        CHECK(r.defined);
        CHECK_THAT(r.lower, WithinAbs(0.0, 1e-12));
        CHECK_THAT(r.upper, WithinAbs(0.0, 1e-12));
    }
    CHECK_THROWS_AS(fieller_ci(g, SampleMoments::from_summary(0.0, 0.1, 10), 0.05),
                    std::invalid_argument);
    CHECK_THROWS_AS(fieller_ci(g, SampleMoments::from_summary(1.0, 0.1, 1), 0.05),
                    std::invalid_argument);
}

TEST_CASE("heuristic expansion")
{
    const auto g = SampleMoments::from_summary(1.2, 0.05, 100);
    const auto w = SampleMoments::from_summary(1.0, 0.08, 100);
    const auto fieller = fieller_ci(g, w, 0.05);
    const std::vector<double> values{0.7, 1.0, 1.4, 1.7};
    const auto normal = normal_mean_ci(values, 0.05);
    const CellIntervals cell{values.size(), normal, fieller, normal.estimate};
    const std::vector<CellIntervals> cells{cell};

    const auto from_mean =
        heuristic_expanded_ci(cells, normal, normal.estimate, ExpansionMode::ExpandFromMean);
    CHECK_THAT(from_mean.lower, WithinAbs(fieller.lower, 1e-12));
    CHECK_THAT(from_mean.upper, WithinAbs(fieller.upper, 1e-12));
    CHECK(from_mean.method == Method::HEURISTIC_EXPANSION);

    const auto literal =
        heuristic_expanded_ci(cells, normal, normal.estimate, ExpansionMode::Literal);
    CHECK_THAT(literal.lower, WithinAbs(normal.lower - (normal.lower - fieller.lower) -
                                            (normal.estimate - normal.lower),
                                        1e-12));
    CHECK(literal.lower < from_mean.lower);
    CHECK(literal.upper > from_mean.upper);

    SECTION("zero expansion")
    {
        const CellIntervals same{values.size(), normal, normal, normal.estimate};
        const std::vector<CellIntervals> flat{same};
        const auto lit = heuristic_expanded_ci(flat, normal, normal.estimate, ExpansionMode::Literal);
        const double half = normal.estimate - normal.lower;
        CHECK_THAT(lit.lower, WithinAbs(normal.estimate - 2 * half, 1e-12));
        const auto fm =
            heuristic_expanded_ci(flat, normal, normal.estimate, ExpansionMode::ExpandFromMean);
        CHECK_THAT(fm.lower, WithinAbs(normal.lower, 1e-12));
        CHECK_THAT(fm.upper, WithinAbs(normal.upper, 1e-12));
    }
    SECTION("an undefined cell makes the expansion undefined")
    {
        auto bad = cell;
        bad.fieller = IntervalEstimate::undefined(Method::FIELLER, 1.0, 0.05, "h >= 1");
        const std::vector<CellIntervals> two{cell, bad};
        CHECK_FALSE(heuristic_expanded_ci(two, normal, normal.estimate, ExpansionMode::Literal)
                        .defined);
    }
    CHECK(parse_expansion_mode("expand_from_mean") == ExpansionMode::ExpandFromMean);
    CHECK_THROWS_AS(parse_expansion_mode("wide"), std::invalid_argument);
}

TEST_CASE("Wilson interval")
{
    const auto ci = wilson_ci(7, 10, 0.05);
    CHECK(ci.method == Method::WILSON);
    CHECK_THAT(ci.lower, WithinAbs(0.396778, 1e-6));
    CHECK_THAT(ci.upper, WithinAbs(0.892209, 1e-6));
    const auto none = wilson_ci(0, 20, 0.05);
    CHECK(none.lower == 0.0);
    CHECK_THAT(none.upper, WithinAbs(0.161125, 1e-6));
    const auto all = wilson_ci(20, 20, 0.05);
    CHECK(all.upper == 1.0);
    CHECK_THAT(all.lower, WithinAbs(0.838875, 1e-6));
    CHECK_THROWS_AS(wilson_ci(3, 2, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(wilson_ci(0, 0, 0.05), std::invalid_argument);
}

TEST_CASE("risk ratio interval")
{
    const auto rr = risk_ratio_ci({70, 100}, {50, 100}, 0.05, false);
    CHECK(rr.method == Method::RISK_RATIO);
    CHECK_THAT(rr.estimate, WithinAbs(1.4, 1e-12));
    CHECK_THAT(rr.lower, WithinAbs(1.107618, 1e-6));
    CHECK_THAT(rr.upper, WithinAbs(1.769563, 1e-6));
    CHECK_THAT(std::log(rr.upper) - std::log(rr.estimate),
               WithinAbs(std::log(rr.estimate) - std::log(rr.lower), 1e-12));

    SECTION("continuity correction adds one half to cited counts in the variance")
    {
        const auto off = risk_ratio_ci({1, 500}, {5, 500}, 0.05, false);
        const auto on = risk_ratio_ci({1, 500}, {5, 500}, 0.05, true);
        CHECK_THAT(off.lower, WithinAbs(0.0234499, 1e-7));
        CHECK_THAT(off.upper, WithinAbs(1.705765, 1e-6));
        CHECK_THAT(on.lower, WithinAbs(0.0330226, 1e-7));
        CHECK_THAT(on.upper, WithinAbs(1.211292, 1e-6));
        CHECK_THAT(on.estimate, WithinAbs(0.2, 1e-12));
        // Larger cited counts shrink each variance term, so the corrected
        // interval is the narrower one here.
        CHECK(on.width() < off.width());
        CHECK(on.note == "continuity=on");
    }
    SECTION("zero counts")
    {
        CHECK_FALSE(risk_ratio_ci({3, 100}, {0, 100}, 0.05, true).defined);
        CHECK_FALSE(risk_ratio_ci({0, 100}, {5, 100}, 0.05, false).defined);
        const auto z = risk_ratio_ci({0, 100}, {5, 100}, 0.05, true);
        CHECK(z.defined);
        CHECK(z.lower == 0.0);
        CHECK(z.upper == 0.0);
    }
    CHECK_THROWS_AS(risk_ratio_ci({5, 4}, {1, 10}, 0.05, false), std::invalid_argument);
}

TEST_CASE("MNPC intervals")
{
    const auto f = mnpc_field_ci({60, 100}, {50, 100}, 0.05, false);
    CHECK_THAT(f.estimate, WithinAbs(1.2, 1e-12));
    CHECK_THAT(f.lower, WithinAbs(1.003408, 1e-6));
    CHECK_THAT(f.upper, WithinAbs(1.435109, 1e-6));

    const auto g = mnpc_field_ci({20, 100}, {40, 200}, 0.05, false);
    const std::vector<WeightedFieldInterval> fields{{0.25, 1.2, f}, {0.75, 1.0, g}};
    const auto c = mnpc_combined_ci(fields, 0.25 * 1.2 + 0.75);
    CHECK(c.method == Method::MNPC_WEIGHTED);
    CHECK_THAT(c.lower, WithinAbs(1.05 - 0.25 * (1.2 - f.lower) - 0.75 * (1.0 - g.lower), 1e-12));
    CHECK_THAT(c.upper, WithinAbs(1.05 + 0.25 * (f.upper - 1.2) + 0.75 * (g.upper - 1.0), 1e-12));

    const std::vector<WeightedFieldInterval> bad{{0.5, 1.2, f}, {0.4, 1.0, g}};
    CHECK_THROWS_AS(mnpc_combined_ci(bad, 1.0), std::invalid_argument);
    const std::vector<WeightedFieldInterval> undefined{
        {0.5, 1.2, f}, {0.5, 1.0, IntervalEstimate::undefined(Method::RISK_RATIO, 1.0, 0.05, "x")}};
    CHECK_FALSE(mnpc_combined_ci(undefined, 1.1).defined);
}

TEST_CASE("continuity modes")
{
    CHECK(resolve_continuity(Continuity::Auto, {4.0, 100.0}));
    CHECK_FALSE(resolve_continuity(Continuity::Auto, {5.0, 100.0}));
    CHECK(resolve_continuity(Continuity::On, {50.0}));
    CHECK_FALSE(resolve_continuity(Continuity::Off, {0.0}));
    CHECK(parse_continuity("on") == Continuity::On);
    CHECK_THROWS_AS(parse_continuity("yes"), std::invalid_argument);
}

TEST_CASE("analytic intervals over fixtures")
{
    const Corpus c = load_corpus(fixture("worked_example"));
    const auto keys = c.keys_of("GROUP");
    const auto slice = make_slice(c, "GROUP", keys);
    const AnalyticOptions opt;

    const auto mnlcs = analytic_interval(Indicator::MNLCS, AnalyticKind::Formula, slice, opt);
    CHECK(mnlcs.method == Method::NORMAL_T);
    CHECK_THAT(mnlcs.estimate, WithinAbs(1.0895219, 1e-7));

    const auto heuristic = analytic_interval(Indicator::MNLCS, AnalyticKind::Fieller, slice, opt);
    CHECK(heuristic.method == Method::HEURISTIC_EXPANSION);
    const std::vector<CellPair> one{slice.front()};
    CHECK(analytic_interval(Indicator::MNLCS, AnalyticKind::Fieller, one, opt).method ==
          Method::FIELLER);
    CHECK_THROWS_AS(analytic_interval(Indicator::MNCS, AnalyticKind::Fieller, slice, opt),
                    std::invalid_argument);

    const auto emnpc = analytic_interval(Indicator::EMNPC, AnalyticKind::Formula, slice, opt);
    CHECK(emnpc.method == Method::RISK_RATIO);
    CHECK_THAT(emnpc.estimate, WithinAbs(0.70 / 0.65, 1e-12));
    CHECK(emnpc.lower < emnpc.estimate);
    CHECK(emnpc.upper > emnpc.estimate);

    const auto zero = load_corpus(fixture("zero_world_cell"));
    const auto zkeys = zero.keys_of("GROUP");
    const auto zslice = make_slice(zero, "GROUP", zkeys);
    const auto m = analytic_interval(Indicator::MNPC, AnalyticKind::Formula, zslice, opt);
    CHECK_FALSE(m.defined);
    CHECK(m.method == Method::MNPC_WEIGHTED);
    const auto l = analytic_interval(Indicator::MNLCS, AnalyticKind::Formula, zslice, opt);
    CHECK_FALSE(l.defined);
    CHECK(l.method == Method::NORMAL_T);
    CHECK(analytic_interval(Indicator::EMNPC, AnalyticKind::Formula, zslice, opt).defined);
}
