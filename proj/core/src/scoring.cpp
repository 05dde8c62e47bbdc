#include "infoflow/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "infoflow/error.hpp"
#include "infoflow/normal.hpp"

namespace infoflow {

std::size_t forecast_bin(double forecast, std::size_t bins) {
  const auto b = static_cast<std::size_t>(std::floor(forecast * static_cast<double>(bins)));
  return std::min(b, bins - 1);
}

MurphyDecomposition murphy_decompose(std::span<const ForecastPair> pairs, std::size_t bins,
                                     bool raw_variant) {
  if (pairs.empty()) throw Error(ErrorCode::NoData, "murphy decomposition of an empty population");
  if (bins == 0) throw Error(ErrorCode::ConfigError, "bins must be positive");
  for (const auto& p : pairs) {
    if (!(p.forecast >= 0.0 && p.forecast <= 1.0)) {
      throw Error(ErrorCode::ConfigError, "forecast outside [0, 1]");
    }
    if (p.outcome != 0 && p.outcome != 1) throw Error(ErrorCode::ConfigError, "outcome must be 0 or 1");
  }

  std::vector<std::size_t> count(bins, 0);
  std::vector<double> f_sum(bins, 0.0);
  std::vector<std::size_t> o_sum(bins, 0);
  std::size_t yes = 0;
  for (const auto& p : pairs) {
    const auto b = forecast_bin(p.forecast, bins);
    ++count[b];
    f_sum[b] += p.forecast;
    o_sum[b] += static_cast<std::size_t>(p.outcome);
    yes += static_cast<std::size_t>(p.outcome);
  }

  MurphyDecomposition m;
  m.n = pairs.size();
  m.bins = bins;
  const double n = static_cast<double>(m.n);
  const double obar = static_cast<double>(yes) / n;
  m.unc = obar - obar * obar;

  std::vector<double> f_mean(bins, 0.0);
  std::vector<double> o_mean(bins, 0.0);
  double res_raw = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    if (!count[b]) continue;
    const double nb = static_cast<double>(count[b]);
    f_mean[b] = f_sum[b] / nb;
    o_mean[b] = static_cast<double>(o_sum[b]) / nb;
    const double w = nb / n;
    m.rel += w * (f_mean[b] - o_mean[b]) * (f_mean[b] - o_mean[b]);
    res_raw += w * o_mean[b] * o_mean[b];
  }
  // sum_b w_b (o_b - obar)^2 = sum_b w_b o_b^2 - obar^2; this form reproduces
  // unc exactly for a perfect forecaster.
  m.res = std::max(res_raw - obar * obar, 0.0);

  double brier = 0.0;
  double wbv = 0.0;
  double wbc = 0.0;
  double brier_raw = 0.0;
  for (const auto& p : pairs) {
    const auto b = forecast_bin(p.forecast, bins);
    const double o = static_cast<double>(p.outcome);
    brier += (f_mean[b] - o) * (f_mean[b] - o);
    if (raw_variant) {
      wbv += (p.forecast - f_mean[b]) * (p.forecast - f_mean[b]);
      wbc += (p.forecast - f_mean[b]) * (o - o_mean[b]);
      brier_raw += (p.forecast - o) * (p.forecast - o);
    }
  }
  m.brier = brier / n;
  if (raw_variant) {
    m.brier_raw = brier_raw / n;
    m.within_bin_variance = wbv / n;
    m.within_bin_covariance = wbc / n;
  }
  return m;
}

ResolutionShare resolution_share(std::span<const NewsObservation> obs, std::size_t bins,
                                 double epsilon) {
  if (obs.size() < 2) throw Error(ErrorCode::NoData, "resolution share needs at least two markets");
  std::vector<ForecastPair> news;
  std::vector<ForecastPair> perfect;
  news.reserve(obs.size());
  perfect.reserve(obs.size());
  double ils_sum = 0.0;
  ResolutionShare out;
  for (const auto& o : obs) {
    news.push_back({o.p_news, o.outcome});
    perfect.push_back({static_cast<double>(o.outcome), o.outcome});
    const double total = static_cast<double>(o.outcome) - o.p_open;
    if (!(std::abs(total) < epsilon)) {
      ils_sum += (o.p_news - o.p_open) / total;
      ++out.ils_defined;
    }
  }
  const auto ceiling = murphy_decompose(perfect, bins);
  if (!(ceiling.res > 0.0)) {
    throw Error(ErrorCode::Undefined, "all outcomes identical; resolution ceiling is zero");
  }
  out.unc = ceiling.res;
  out.res_news = murphy_decompose(news, bins).res;
  out.share = out.res_news / out.unc;
  if (out.ils_defined) {
    out.mean_ils = ils_sum / static_cast<double>(out.ils_defined);
    out.gap = out.share - *out.mean_ils;
  }
  return out;
}

LabelVector aggregate_label(const LeakageLabel& leakage, const Thresholds& thresholds) {
  LabelVector v;
  v.market_id = leakage.market_id;
  v.ils = leakage.ils;
  for (const auto& w : leakage.ils_windows.windows) {
    if (w.window == 30 * kMinute) v.ils_30min = w.ils;
    if (w.window == 2 * kHour) v.ils_2h = w.ils;
  }
  v.v_pre = leakage.v_pre;
  v.hhi_top10 = leakage.hhi_top10;
  v.mean_wn = leakage.mean_wallet_novelty;
  v.thresholds = thresholds;
  if (!v.ils || !v.v_pre || !v.mean_wn) {
    v.partial = true;
    return v;
  }
  v.y_bin = *v.ils >= thresholds.ils && *v.v_pre >= thresholds.v_pre &&
            *v.mean_wn >= thresholds.mean_wn;
  return v;
}

int category_code(Category c) { return static_cast<int>(c); }

int liquidity_tier(double volume_usdc) {
  if (!(volume_usdc >= 1.0)) return 0;
  return static_cast<int>(std::floor(std::log10(volume_usdc)));
}

FeatureVector assemble_features(const MicroFeatures& micro, std::optional<double> mean_wn,
                                const MarketRecord& market, Timestamp t,
                                std::optional<double> volume_to_date_usdc) {
  if (t >= market.resolve_ts) {
    throw Error(ErrorCode::MarketClosed,
                market.market_id + ": " + format_iso8601(t) + " is not before resolution");
  }
  FeatureVector fv;
  fv.micro = micro;
  fv.mean_wn = mean_wn;
  fv.c_cat = category_code(market.category);
  fv.c_liq = liquidity_tier(volume_to_date_usdc.value_or(market.total_volume_usdc));
  fv.c_ttr = std::log1p(to_hours(market.resolve_ts - t));
  return fv;
}

PowerResult required_positives(double pi1, double pi0, double kappa, double power,
                               PowerVariant variant) {
  if (!(pi0 > 0.0 && pi0 < pi1 && pi1 < 1.0)) {
    throw Error(ErrorCode::InvalidEffect, "need 0 < pi0 < pi1 < 1");
  }
  if (!(kappa > 0.0 && kappa < 1.0) || !(power > 0.0 && power < 1.0)) {
    throw Error(ErrorCode::ConfigError, "kappa and power must lie in (0, 1)");
  }
  PowerResult r;
  r.z_alpha = normal_quantile(1.0 - (variant.two_sided ? kappa / 2.0 : kappa));
  r.z_power = normal_quantile(power);
  double var = pi1 * (1.0 - pi1);
  if (variant.two_variance) var += pi0 * (1.0 - pi0);
  const double z = r.z_alpha + r.z_power;
  r.n_exact = z * z * var / ((pi1 - pi0) * (pi1 - pi0));
  r.n = static_cast<std::size_t>(std::ceil(r.n_exact - 1e-9));
  return r;
}

}  // namespace infoflow
