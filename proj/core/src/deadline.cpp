#include "infoflow/deadline.hpp"

#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "infoflow/error.hpp"

namespace infoflow {

namespace {

constexpr double kBoundarySlack = 1e-12;

void require_opening_price(BaselineOption baseline) {
  if (baseline != BaselineOption::OpeningPrice) {
    throw Error(ErrorCode::NotImplemented,
                "only the opening-price baseline is implemented for deadline scores");
  }
}

double chi2_quantile(double dof, double p) {
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(dof), p);
}

}  // namespace

double theta_baseline(double theta_open, double lambda_per_day, Timestamp t, Timestamp t_open,
                      Timestamp deadline) {
  if (t < t_open || t > deadline) {
    throw Error(ErrorCode::OutOfWindow, "t outside [t_open, deadline]");
  }
  if (!(lambda_per_day > 0.0)) throw Error(ErrorCode::ConfigError, "lambda must be > 0");
  if (t == t_open) return theta_open;
  const double remaining = to_days(deadline - t);
  const double window = to_days(deadline - t_open);
  // -expm1(-x) = 1 - e^{-x}, accurate as lambda -> 0.
  return theta_open * (-std::expm1(-lambda_per_day * remaining)) /
         (-std::expm1(-lambda_per_day * window));
}

HazardFit fit_hazard_days(Category category, std::span<const double> event_days,
                          std::span<const double> censored_days) {
  if (event_days.empty()) throw Error(ErrorCode::NoEvents, "hazard fit needs at least one event");
  HazardFit fit;
  fit.category = category;
  for (double d : event_days) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw Error(ErrorCode::BadExposure, "event exposure must be positive");
    }
    fit.total_exposure_days += d;
  }
  for (double d : censored_days) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw Error(ErrorCode::BadExposure, "censored exposure must be positive");
    }
    fit.total_exposure_days += d;
  }
  fit.n_events = event_days.size();
  fit.n_censored = censored_days.size();
  const double n = static_cast<double>(fit.n_events);
  const double two_t = 2.0 * fit.total_exposure_days;
  fit.lambda = n / fit.total_exposure_days;
  fit.ci95_lo = chi2_quantile(2.0 * n, 0.025) / two_t;
  fit.ci95_hi = chi2_quantile(fit.n_censored ? 2.0 * n + 2.0 : 2.0 * n, 0.975) / two_t;
  return fit;
}

HazardFit fit_hazard(Category category, std::span<const Exposure> events,
                     std::span<const Exposure> censored) {
  std::vector<double> ev;
  std::vector<double> cens;
  ev.reserve(events.size());
  for (const auto& e : events) ev.push_back(to_days(e.end - e.start));
  for (const auto& c : censored) cens.push_back(to_days(c.end - c.start));
  return fit_hazard_days(category, ev, cens);
}

std::optional<double> ils_deadline_from_prices(double p_pre_event, double baseline,
                                               double epsilon) {
  const double total = 1.0 - baseline;
  if (std::abs(total) < epsilon) return std::nullopt;
  return (p_pre_event - baseline) / total;
}

DeadlineLabel compute_ils_deadline(const MarketRecord& market, const PriceSeries& series,
                                   const NewsAnchor& event_anchor, const ScopeConfig& cfg,
                                   BaselineOption baseline) {
  require_opening_price(baseline);
  if (market.resolution_type != ResolutionType::DeadlineResolved) {
    throw Error(ErrorCode::WrongResolutionType, market.market_id + " is not deadline-resolved");
  }
  if (market.outcome != Outcome::Yes) {
    throw Error(ErrorCode::WrongOutcome,
                market.market_id + " resolved NO; use compute_ils_deadline_no");
  }
  const Timestamp t_event = event_anchor.t_news;
  const Timestamp last = market.deadline_ts.value_or(market.resolve_ts);
  if (!(t_event > market.open_ts) || t_event > last) {
    throw Error(ErrorCode::AnchorOutOfRange,
                market.market_id + ": event time outside (open_ts, deadline]");
  }
  if (series.empty()) throw Error(ErrorCode::NoTrades, market.market_id + ": empty price series");
  const auto pre = series.last_closed_before(t_event);
  if (!pre) {
    throw Error(ErrorCode::NoPreEventPrice,
                market.market_id + ": no completed minute before " + format_iso8601(t_event));
  }

  DeadlineLabel label;
  label.market_id = market.market_id;
  label.theta_open = series.front().vwap;
  label.p_pre_event = pre->vwap;
  label.t_event = t_event;
  label.delta_pre = pre->vwap - label.theta_open;
  label.delta_total = 1.0 - label.theta_open;
  const auto score = ils_deadline_from_prices(pre->vwap, label.theta_open, cfg.epsilon);
  if (score) {
    label.ils_dl = DeadlineScore::of(*score);
  } else {
    label.ils_dl = DeadlineScore::missing();
    label.scope_flags.insert(ScopeFlag::TrivialResolution);
  }
  if (std::abs(label.theta_open - 0.5) > cfg.edge_band + kBoundarySlack) {
    label.scope_flags.insert(ScopeFlag::EdgeEffect);
  }
  return label;
}

DeadlineLabel compute_ils_deadline_no(const MarketRecord& market, const PriceSeries& series,
                                      const std::optional<NewsAnchor>& cancellation_anchor,
                                      const ScopeConfig& cfg, BaselineOption baseline) {
  require_opening_price(baseline);
  if (market.resolution_type != ResolutionType::DeadlineResolved) {
    throw Error(ErrorCode::WrongResolutionType, market.market_id + " is not deadline-resolved");
  }
  if (market.outcome != Outcome::No) {
    throw Error(ErrorCode::WrongOutcome, market.market_id + " resolved YES; use compute_ils_deadline");
  }
  if (series.empty()) throw Error(ErrorCode::NoTrades, market.market_id + ": empty price series");

  DeadlineLabel label;
  label.market_id = market.market_id;
  label.theta_open = series.front().vwap;
  if (std::abs(label.theta_open - 0.5) > cfg.edge_band + kBoundarySlack) {
    label.scope_flags.insert(ScopeFlag::EdgeEffect);
  }
  if (!cancellation_anchor || cancellation_anchor->tier == AnchorTier::DeadlineExpiry) {
    label.ils_dl = DeadlineScore::structural_zero();
    return label;
  }

  const Timestamp t_anchor = cancellation_anchor->t_news;
  const Timestamp last = market.deadline_ts.value_or(market.resolve_ts);
  if (!(t_anchor > market.open_ts) || t_anchor > last) {
    throw Error(ErrorCode::AnchorOutOfRange,
                market.market_id + ": cancellation anchor outside (open_ts, deadline]");
  }
  const auto pre = series.last_closed_before(t_anchor);
  if (!pre) {
    throw Error(ErrorCode::NoPreEventPrice,
                market.market_id + ": no completed minute before " + format_iso8601(t_anchor));
  }
  // Mirror onto the NO leg: q = 1 - p, NO baseline 1 - theta_open, target 1.
  const double q_pre = 1.0 - pre->vwap;
  const double q_open = 1.0 - label.theta_open;
  label.t_event = t_anchor;
  label.p_pre_event = pre->vwap;
  label.delta_pre = q_pre - q_open;
  label.delta_total = 1.0 - q_open;
  const auto score = ils_deadline_from_prices(q_pre, q_open, cfg.epsilon);
  if (score) {
    label.ils_dl = DeadlineScore::of(*score);
  } else {
    label.ils_dl = DeadlineScore::missing();
    label.scope_flags.insert(ScopeFlag::TrivialResolution);
  }
  return label;
}

}  // namespace infoflow
