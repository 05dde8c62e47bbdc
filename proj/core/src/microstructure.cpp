#include "infoflow/microstructure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "infoflow/error.hpp"
#include "infoflow/hawkes.hpp"

namespace infoflow {

namespace {

constexpr double kClipLo = 0.001;
constexpr double kClipHi = 0.999;

struct BuySell {
  double buy = 0.0;
  double sell = 0.0;
};

BuySell split_volume(std::span<const Trade> window) {
  BuySell v;
  for (const auto& t : window) (t.side == Side::BuyYes ? v.buy : v.sell) += t.size;
  return v;
}

template <typename F>
std::optional<double> guarded(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::Undefined:
      case ErrorCode::InsufficientVolume:
      case ErrorCode::Degenerate:
      case ErrorCode::FitFailed:
        return std::nullopt;
      default:
        throw;
    }
  }
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::optional<double> WindowSpec::bucket_volume_for(Category c) const {
  if (vpin_bucket_volume) return vpin_bucket_volume;
  auto it = vpin_bucket_by_category.find(c);
  if (it != vpin_bucket_by_category.end()) return it->second;
  return std::nullopt;
}

void WindowSpec::validate() const {
  if (oi_windows.empty()) throw Error(ErrorCode::ConfigError, "oi_windows is empty");
  for (auto w : oi_windows) {
    if (w.count() <= 0) throw Error(ErrorCode::ConfigError, "oi windows must be positive");
  }
  if (vpin_bucket_volume && !(*vpin_bucket_volume > 0.0)) {
    throw Error(ErrorCode::ConfigError, "vpin_bucket_volume must be positive");
  }
  for (const auto& [c, v] : vpin_bucket_by_category) {
    if (!(v > 0.0)) throw Error(ErrorCode::ConfigError, "per-category VPIN buckets must be positive");
  }
  if (vpin_trailing_buckets == 0 || lambda_window == 0 || vr_k == 0) {
    throw Error(ErrorCode::ConfigError, "window counts must be positive");
  }
  if (vr_delta.count() <= 0 || ts_window.count() <= 0 || kurtosis_window.count() <= 0 ||
      hawkes_window.count() <= 0) {
    throw Error(ErrorCode::ConfigError, "window durations must be positive");
  }
}

double order_imbalance(std::span<const Trade> window) {
  const auto v = split_volume(window);
  const double total = v.buy + v.sell;
  if (!(total > 0.0)) throw Error(ErrorCode::Undefined, "order imbalance on an empty window");
  return (v.buy - v.sell) / total;
}

double two_sidedness(std::span<const Trade> window) {
  const auto v = split_volume(window);
  const double total = v.buy + v.sell;
  if (!(total > 0.0)) throw Error(ErrorCode::Undefined, "two-sidedness on an empty window");
  return 1.0 - std::abs(v.buy - v.sell) / total;
}

std::vector<double> vpin_toxicities(std::span<const Trade> trades, double bucket_volume) {
  if (!(bucket_volume > 0.0)) throw Error(ErrorCode::ConfigError, "bucket volume must be positive");
  const double tol = 1e-12 * bucket_volume;
  std::vector<double> tox;
  double buy = 0.0;
  double sell = 0.0;
  double filled = 0.0;
  for (const auto& t : trades) {
    double rem = t.size;
    while (rem > 0.0) {
      const double room = bucket_volume - filled;
      const double take = rem >= room - tol ? room : rem;
      (t.side == Side::BuyYes ? buy : sell) += take;
      filled += take;
      rem -= take;
      if (take == room) {
        tox.push_back(std::abs(buy - sell) / bucket_volume);
        buy = sell = filled = 0.0;
        if (rem < tol) rem = 0.0;
      }
    }
  }
  return tox;
}

double vpin(std::span<const Trade> trades, double bucket_volume, std::size_t trailing) {
  if (trailing == 0) throw Error(ErrorCode::ConfigError, "trailing bucket count must be positive");
  const auto tox = vpin_toxicities(trades, bucket_volume);
  if (tox.empty()) throw Error(ErrorCode::InsufficientVolume, "no complete VPIN bucket");
  const std::size_t n = std::min(trailing, tox.size());
  const double sum = std::accumulate(tox.end() - static_cast<std::ptrdiff_t>(n), tox.end(), 0.0);
  return std::clamp(sum / static_cast<double>(n), 0.0, 1.0);
}

OlsFit ols(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::ConfigError, "ols: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorCode::Degenerate, "ols needs at least two observations");
  const double nd = static_cast<double>(n);
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / nd;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / nd;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::Degenerate, "regressor has zero variance");
  OlsFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n >= 3) {
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      sse += r * r;
    }
    fit.slope_se = std::sqrt(sse / (nd - 2.0) / sxx);
  }
  return fit;
}

OlsFit kyle_lambda(std::span<const Trade> window) {
  if (window.size() < 2) throw Error(ErrorCode::Degenerate, "kyle lambda needs two trades");
  std::vector<double> flow;
  std::vector<double> dp;
  flow.reserve(window.size() - 1);
  dp.reserve(window.size() - 1);
  for (std::size_t i = 1; i < window.size(); ++i) {
    flow.push_back(window[i].signed_size());
    dp.push_back(window[i].price - window[i - 1].price);
  }
  return ols(flow, dp);
}

double variance_ratio_returns(std::span<const double> r, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::ConfigError, "k must be positive");
  const std::size_t n = r.size();
  if (n < 2 * k) throw Error(ErrorCode::Undefined, "variance ratio needs at least 2k returns");
  const double nd = static_cast<double>(n);
  const double mu = std::accumulate(r.begin(), r.end(), 0.0) / nd;
  double var1 = 0.0;
  for (double x : r) var1 += (x - mu) * (x - mu);
  var1 /= nd - 1.0;
  if (!(var1 > 0.0)) throw Error(ErrorCode::Undefined, "one-step returns have zero variance");

  const double kd = static_cast<double>(k);
  double window = std::accumulate(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
  double vark = 0.0;
  const std::size_t m = n - k + 1;
  for (std::size_t j = 0;; ++j) {
    vark += (window - kd * mu) * (window - kd * mu);
    if (j + k >= n) break;
    window += r[j + k] - r[j];
  }
  vark /= static_cast<double>(m) - 1.0;
  return vark / (kd * var1);
}

VarianceRatio variance_ratio(std::span<const PricePoint> points, std::size_t k, Seconds delta,
                             Timestamp t) {
  if (delta.count() <= 0) throw Error(ErrorCode::ConfigError, "delta must be positive");
  if (points.empty() || points.front().minute_ts > t) {
    throw Error(ErrorCode::Undefined, "no prices before t");
  }
  VarianceRatio out;
  std::vector<double> logs;
  std::size_t idx = 0;
  for (Timestamp g = points.front().minute_ts; g <= t; g += delta) {
    while (idx + 1 < points.size() && points[idx + 1].minute_ts <= g) ++idx;
    double p = points[idx].vwap;
    if (p < kClipLo || p > kClipHi) {
      p = std::clamp(p, kClipLo, kClipHi);
      ++out.clipped;
    }
    logs.push_back(std::log(p));
  }
  std::vector<double> r;
  r.reserve(logs.size());
  for (std::size_t i = 1; i < logs.size(); ++i) r.push_back(logs[i] - logs[i - 1]);
  out.returns = r.size();
  out.value = variance_ratio_returns(r, k);
  return out;
}

VarianceRatio variance_ratio(const PriceSeries& series, std::size_t k, Seconds delta, Timestamp t) {
  return variance_ratio(series.points(), k, delta, t);
}

double excess_kurtosis_g2(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 4) throw Error(ErrorCode::Undefined, "kurtosis needs at least four values");
  const double nd = static_cast<double>(n);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / nd;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : x) {
    const double d = (v - mean) * (v - mean);
    m2 += d;
    m4 += d * d;
  }
  m2 /= nd;
  m4 /= nd;
  if (!(m2 > 1e-300) || !(m2 > 1e-24 * mean * mean)) {
    throw Error(ErrorCode::Undefined, "sizes have zero variance");
  }
  const double g2 = m4 / (m2 * m2) - 3.0;
  return ((nd + 1.0) * g2 + 6.0) * (nd - 1.0) / ((nd - 2.0) * (nd - 3.0));
}

double trade_size_kurtosis(std::span<const Trade> window) {
  std::vector<double> sizes;
  sizes.reserve(window.size());
  for (const auto& t : window) sizes.push_back(t.size);
  return excess_kurtosis_g2(sizes);
}

std::span<const Trade> up_to(std::span<const Trade> sorted, Timestamp t) {
  auto end = std::upper_bound(sorted.begin(), sorted.end(), t,
                              [](Timestamp v, const Trade& tr) { return v < tr.ts; });
  return sorted.first(static_cast<std::size_t>(end - sorted.begin()));
}

std::span<const Trade> window_slice(std::span<const Trade> sorted, Timestamp t, Seconds width) {
  const auto upto = up_to(sorted, t);
  const Timestamp lo = t - width;
  auto begin = std::upper_bound(upto.begin(), upto.end(), lo,
                                [](Timestamp v, const Trade& tr) { return v < tr.ts; });
  return upto.subspan(static_cast<std::size_t>(begin - upto.begin()));
}

std::span<const Trade> last_n_slice(std::span<const Trade> sorted, Timestamp t, std::size_t n) {
  const auto upto = up_to(sorted, t);
  return upto.last(std::min(n, upto.size()));
}

MicroFeatures compute_features(std::span<const Trade> sorted, Timestamp t, const WindowSpec& spec,
                               Category category) {
  MicroFeatures f;
  f.at = t;
  const auto visible = up_to(sorted, t);
  for (auto w : spec.oi_windows) {
    const auto slice = window_slice(visible, t, w);
    f.oi[w] = guarded([&] { return order_imbalance(slice); });
  }
  f.ts = guarded([&] { return two_sidedness(window_slice(visible, t, spec.ts_window)); });
  if (auto v = spec.bucket_volume_for(category)) {
    f.vpin = guarded([&] { return vpin(visible, *v, spec.vpin_trailing_buckets); });
  }
  f.kyle_lambda = guarded(
      [&] { return kyle_lambda(last_n_slice(visible, t, spec.lambda_window)).slope; });
  if (!visible.empty()) {
    const auto series = build_price_series(visible);
    f.vr = guarded([&] {
      const auto vr = variance_ratio(series, spec.vr_k, spec.vr_delta, t);
      f.vr_clipped = vr.clipped;
      return vr.value;
    });
  }
  f.size_kurtosis =
      guarded([&] { return trade_size_kurtosis(window_slice(visible, t, spec.kurtosis_window)); });
  if (spec.hawkes) {
    f.hawkes_branching = guarded([&] {
      const auto slice = window_slice(visible, t, spec.hawkes_window);
      std::vector<Timestamp> ts;
      ts.reserve(slice.size());
      for (const auto& tr : slice) ts.push_back(tr.ts);
      return hawkes_branching(ts);
    });
  }
  return f;
}

std::map<Category, double> default_vpin_buckets(
    std::span<const MarketRecord> markets, const std::map<std::string, double>& token_volume) {
  std::map<Category, std::vector<double>> daily;
  for (const auto& m : markets) {
    auto it = token_volume.find(m.market_id);
    if (it == token_volume.end() || !(it->second > 0.0)) continue;
    const double days = std::max(to_days(m.resolve_ts - m.open_ts), 1.0 / 24.0);
    daily[m.category].push_back(it->second / days);
  }
  std::map<Category, double> out;
  for (auto& [c, v] : daily) out[c] = median(std::move(v)) / 50.0;
  return out;
}

MicroEngine::MicroEngine(WindowSpec spec, Category category)
    : spec_(std::move(spec)), category_(category) {
  spec_.validate();
}

void MicroEngine::push(const Trade& trade) {
  if (!trades_.empty() && trade.ts < trades_.back().ts) {
    throw Error(ErrorCode::UnsortedInput, "trade at " + format_iso8601(trade.ts) +
                                              " precedes " + format_iso8601(trades_.back().ts));
  }
  trades_.push_back(trade);
}

MicroFeatures MicroEngine::evaluate(Timestamp t) {
  auto f = compute_features(trades_, t, spec_, category_);
  std::unique_lock lock(mu_);
  latest_ = f;
  return f;
}

std::vector<MicroFeatures> MicroEngine::stream(std::span<const Trade> trades) {
  std::vector<MicroFeatures> rows;
  if (trades.empty()) return rows;
  std::size_t i = 0;
  Timestamp boundary = floor_minute(trades.front().ts) + kMinute;
  const Timestamp last = floor_minute(trades.back().ts) + kMinute;
  for (; boundary <= last; boundary += kMinute) {
    while (i < trades.size() && trades[i].ts <= boundary) push(trades[i++]);
    rows.push_back(evaluate(boundary));
  }
  return rows;
}

std::optional<MicroFeatures> MicroEngine::latest() const {
  std::shared_lock lock(mu_);
  return latest_;
}

}  // namespace infoflow
