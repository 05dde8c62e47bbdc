#pragma once

#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "infoflow/leakage.hpp"
#include "infoflow/market.hpp"

namespace infoflow {

/// Passive belief trajectory under a constant hazard (rate per day):
///   theta_t = theta_open * (1 - exp(-lambda (D - t))) / (1 - exp(-lambda (D - T_open)))
/// Throws OutOfWindow when t is outside [t_open, deadline].
double theta_baseline(double theta_open, double lambda_per_day, Timestamp t, Timestamp t_open,
                      Timestamp deadline);

struct HazardFit {
  Category category = Category::Other;
  double lambda = 0.0;  // per day
  std::size_t n_events = 0;
  std::size_t n_censored = 0;
  double total_exposure_days = 0.0;
  double ci95_lo = 0.0;
  double ci95_hi = 0.0;
};

struct Exposure {
  Timestamp start{};
  Timestamp end{};
};

/// Exponential-hazard MLE: lambda = events / total exposure (days).
/// 95% interval: chi2(2n; .025)/2T .. chi2(2n; .975)/2T for complete samples
/// (exact, since 2 lambda T ~ chi2(2n)); with censoring the upper bound uses
/// 2n + 2 degrees of freedom.
/// Throws NoEvents, BadExposure.
HazardFit fit_hazard(Category category, std::span<const Exposure> events,
                     std::span<const Exposure> censored = {});

/// Same estimator from exposures already expressed in days.
HazardFit fit_hazard_days(Category category, std::span<const double> event_days,
                          std::span<const double> censored_days = {});

enum class BaselineOption { OpeningPrice, ParametricPrior, EmpiricalBaseRate };

struct DeadlineScore {
  enum class Kind { Value, Missing, StructuralZero };
  Kind kind = Kind::Missing;
  double value = 0.0;

  static DeadlineScore of(double v) { return {Kind::Value, v}; }
  static DeadlineScore missing() { return {Kind::Missing, 0.0}; }
  static DeadlineScore structural_zero() { return {Kind::StructuralZero, 0.0}; }
  bool has_value() const { return kind == Kind::Value; }
};

struct DeadlineLabel {
  std::string market_id;
  DeadlineScore ils_dl;
  double theta_open = 0.0;
  std::optional<double> p_pre_event;
  std::optional<Timestamp> t_event;
  double delta_pre = 0.0;
  double delta_total = 0.0;
  std::set<ScopeFlag> scope_flags;
};

/// (p_pre - baseline) / (1 - baseline): the YES-leg score for a chosen baseline.
/// Returns nullopt when 1 - baseline < epsilon.
std::optional<double> ils_deadline_from_prices(double p_pre_event, double baseline, double epsilon);

/// YES-resolved deadline market anchored at the public event.
/// Throws WrongResolutionType, WrongOutcome, AnchorOutOfRange, NoPreEventPrice,
/// NotImplemented (baseline options other than the opening price).
DeadlineLabel compute_ils_deadline(const MarketRecord& market, const PriceSeries& series,
                                   const NewsAnchor& event_anchor, const ScopeConfig& cfg,
                                   BaselineOption baseline = BaselineOption::OpeningPrice);

/// NO-resolved deadline market. Without a cancellation anchor (or with a
/// deadline_expiry anchor) the score is a structural zero; with one it is the
/// mirrored score on the NO price q = 1 - p.
DeadlineLabel compute_ils_deadline_no(const MarketRecord& market, const PriceSeries& series,
                                      const std::optional<NewsAnchor>& cancellation_anchor,
                                      const ScopeConfig& cfg,
                                      BaselineOption baseline = BaselineOption::OpeningPrice);

}  // namespace infoflow
