#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "normcite/indicators.hpp"

namespace normcite {

enum class Method {
    NORMAL_T,
    FIELLER,
    HEURISTIC_EXPANSION,
    WILSON,
    RISK_RATIO,
    MNPC_WEIGHTED,
    BOOTSTRAP_PERCENTILE
};

std::string_view to_string(Method method);

/// A point estimate with optional confidence limits. When `defined` is false
/// the limits are NaN and `note` says why.
struct IntervalEstimate {
    double estimate = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double alpha = 0.05;
    Method method = Method::NORMAL_T;
    bool defined = true;
    double h = 0.0;  ///< Fieller curvature term; NaN for other methods
    std::string note;

    double width() const { return upper - lower; }
    static IntervalEstimate undefined(Method method, double estimate, double alpha,
                                      std::string note);
};

struct SampleMoments {
    double mean = 0.0;
    double sd = 0.0;
    double se = 0.0;
    std::size_t n = 0;

    static SampleMoments of(std::span<const double> values);
    static SampleMoments from_summary(double mean, double se, std::size_t n);
};

/// Two-tailed Student t critical value: P(|T_df| > t) = alpha.
double t_critical(std::size_t df, double alpha);
/// Two-tailed standard normal critical value (1.959964 at alpha = 0.05).
double z_critical(double alpha);

/// mean -/+ t_{n-1} s/sqrt(n). Used for MNLCS, MNCS and the z-score mean alike.
IntervalEstimate normal_mean_ci(std::span<const double> values, double alpha);

/// Fieller limits for the ratio of the group and world means of ln(1+c).
/// Undefined when h >= 1. Throws std::invalid_argument for a non-positive world
/// mean or fewer than two observations on either side.
IntervalEstimate fieller_ci(const SampleMoments& group, const SampleMoments& world, double alpha);

enum class ExpansionMode { Literal, ExpandFromMean };
std::string_view to_string(ExpansionMode mode);
ExpansionMode parse_expansion_mode(std::string_view text);

struct CellIntervals {
    std::size_t size = 0;
    IntervalEstimate normal;
    IntervalEstimate fieller;
    double mean = 0.0;  ///< mean normalised score of the cell
};

/// Widens the combined normal interval by the size-weighted average per-cell
/// Fieller expansion, separately for each side.
///
/// Literal mode widens outward from the existing normal limits:
///   lower = L - (AveExp_L + 1)(mean - L)
/// so even zero expansion doubles the half-widths. ExpandFromMean widens from
/// the mean instead:
///   lower = mean - (AveExp_L + 1)(mean - L)
/// which is the plain normal interval when AveExp is zero and recovers the
/// Fieller interval for a single cell.
IntervalEstimate heuristic_expanded_ci(std::span<const CellIntervals> per_cell,
                                       const IntervalEstimate& combined, double combined_mean,
                                       ExpansionMode mode);

/// Wilson score interval for cited/total.
IntervalEstimate wilson_ci(std::uint64_t cited, std::uint64_t total, double alpha);

/// Cited and total counts. Cited may be fractional for equalised proportions.
struct CitedCounts {
    double cited = 0.0;
    double total = 0.0;
};

/// Log risk-ratio interval with per-arm variance terms,
///   exp(ln(pg/pw) -/+ z sqrt((ng - a)/a/ng + (nw - b)/b/nw)),
/// where a and b are the cited counts, each plus 0.5 when `continuity` is set.
/// The centre is always the uncorrected log ratio.
IntervalEstimate risk_ratio_ci(CitedCounts group, CitedCounts world, double alpha,
                               bool continuity);

/// Single-field MNPC interval: as risk_ratio_ci but both odds terms share the
/// pooled denominator (ng + nw).
IntervalEstimate mnpc_field_ci(CitedCounts group, CitedCounts world, double alpha,
                               bool continuity);

struct WeightedFieldInterval {
    double weight = 0.0;  ///< n_gf / n_g
    double ratio = 0.0;   ///< p_gf / p_wf
    IntervalEstimate interval;
};

/// Weighted sum of per-field interval arms around the combined MNPC.
IntervalEstimate mnpc_combined_ci(std::span<const WeightedFieldInterval> per_field, double mnpc);

enum class Continuity { Auto, On, Off };
std::string_view to_string(Continuity c);
Continuity parse_continuity(std::string_view text);
/// Auto switches the correction on when any cited count is below 5.
bool resolve_continuity(Continuity mode, std::initializer_list<double> cited_counts);

/// Which analytic family to use for an indicator.
enum class AnalyticKind { Formula, Fieller };

struct AnalyticOptions {
    double alpha = 0.05;
    Continuity continuity = Continuity::Auto;
    ExpansionMode expansion = ExpansionMode::Literal;
};

/// Fieller limits exist for MNLCS only.
bool fieller_applicable(Indicator indicator);

/// Method tag analytic_interval() reports for an indicator over `cells` cells.
Method analytic_method(Indicator indicator, AnalyticKind kind, std::size_t cells);

/// The analytic interval of an indicator over a slice:
///   Formula: NORMAL_T for mean indicators, WILSON for proportions, RISK_RATIO
///            for EMNPC and MNPC_WEIGHTED for MNPC;
///   Fieller: FIELLER for a single cell, HEURISTIC_EXPANSION otherwise.
/// Never throws for data-dependent failures; those come back undefined.
IntervalEstimate analytic_interval(Indicator indicator, AnalyticKind kind,
                                   std::span<const CellPair> slice, const AnalyticOptions& options);

}  // namespace normcite
