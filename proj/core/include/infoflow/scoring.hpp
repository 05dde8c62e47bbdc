#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infoflow/leakage.hpp"
#include "infoflow/market.hpp"
#include "infoflow/microstructure.hpp"

namespace infoflow {

struct ForecastPair {
  double forecast = 0.0;  // [0, 1]
  int outcome = 0;        // 0 or 1
};

/// Brier score split into uncertainty, reliability and resolution on
/// bin-mean-quantized forecasts, so brier = unc + rel - res holds exactly up
/// to rounding. With raw_variant the raw-forecast Brier score is also given:
/// brier_raw = brier + within_bin_variance - 2 * within_bin_covariance.
struct MurphyDecomposition {
  double brier = 0.0;
  double unc = 0.0;
  double rel = 0.0;
  double res = 0.0;
  std::size_t n = 0;
  std::size_t bins = 0;
  std::optional<double> brier_raw;
  std::optional<double> within_bin_variance;
  std::optional<double> within_bin_covariance;
};

/// Equal-width bin index; a forecast of exactly 1 falls in the last bin.
std::size_t forecast_bin(double forecast, std::size_t bins);

/// Throws NoData for empty input, ConfigError for bad forecasts or outcomes.
MurphyDecomposition murphy_decompose(std::span<const ForecastPair> pairs, std::size_t bins = 10,
                                     bool raw_variant = false);

struct NewsObservation {
  double p_open = 0.0;
  double p_news = 0.0;
  int outcome = 0;
};

struct ResolutionShare {
  double share = 0.0;      // RES(p_news) / UNC
  double res_news = 0.0;
  double unc = 0.0;
  std::optional<double> mean_ils;
  std::size_t ils_defined = 0;
  std::optional<double> gap;  // share - mean_ils
};

/// Throws NoData below two markets, Undefined when every outcome is the same.
ResolutionShare resolution_share(std::span<const NewsObservation> obs, std::size_t bins = 10,
                                 double epsilon = 0.05);

struct Thresholds {
  double ils = 0.5;
  double v_pre = 0.5;
  double mean_wn = 0.5;
};

struct LabelVector {
  std::string market_id;
  std::optional<double> ils;
  std::optional<double> ils_30min;
  std::optional<double> ils_2h;
  std::optional<double> v_pre;
  std::optional<double> hhi_top10;
  std::optional<double> mean_wn;
  std::optional<bool> y_bin;  // empty when a thresholded component is missing
  bool partial = false;
  Thresholds thresholds;
};

/// y_bin = ils >= t1 and v_pre >= t2 and mean_wn >= t3. A missing component
/// yields y_bin empty and partial = true rather than an exception.
LabelVector aggregate_label(const LeakageLabel& leakage, const Thresholds& thresholds = {});

struct FeatureVector {
  MicroFeatures micro;
  std::optional<double> mean_wn;
  int c_cat = 0;
  int c_liq = 0;
  double c_ttr = 0.0;
};

int category_code(Category c);

/// floor(log10(volume)), 0 below one unit of volume.
int liquidity_tier(double volume_usdc);

/// Throws MarketClosed when t is at or past the configured resolution date.
FeatureVector assemble_features(const MicroFeatures& micro, std::optional<double> mean_wn,
                                const MarketRecord& market, Timestamp t,
                                std::optional<double> volume_to_date_usdc = std::nullopt);

struct PowerVariant {
  bool two_sided = false;     // z_{1 - kappa/2}
  bool two_variance = false;  // pi1(1-pi1) + pi0(1-pi0) in the numerator
};

struct PowerResult {
  std::size_t n = 0;
  double n_exact = 0.0;  // before the ceiling
  double z_alpha = 0.0;
  double z_power = 0.0;
};

/// n = ceil((z_{1-kappa} + z_power)^2 * pi1 (1 - pi1) / (pi1 - pi0)^2).
/// Throws InvalidEffect unless 0 < pi0 < pi1 < 1.
PowerResult required_positives(double pi1, double pi0, double kappa = 0.05, double power = 0.80,
                               PowerVariant variant = {});

}  // namespace infoflow
