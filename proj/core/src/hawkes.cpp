#include "infoflow/hawkes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "infoflow/error.hpp"

namespace infoflow {

namespace {

constexpr std::size_t kMinArrivals = 20;
constexpr double kMaxBranching = 1.0 - 1e-6;

using Vec = std::array<double, 3>;  // (log mu, log beta, logit eta)

double sigmoid(double c) { return 1.0 / (1.0 + std::exp(-c)); }

double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double inf_norm(const Vec& v) {
  return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
}

// Negative log-likelihood and its gradient in the unconstrained coordinates.
struct Objective {
  std::span<const double> t;
  double horizon;

  double operator()(const Vec& x, Vec& grad) const {
    const double mu = std::exp(x[0]);
    const double beta = std::exp(x[1]);
    const double eta = sigmoid(x[2]);
    const double alpha = eta * beta;

    double ll = -mu * horizon;
    double d_mu = -horizon;
    double d_eta = 0.0;
    double d_beta = 0.0;
    double a = 0.0;  // sum_{j<i} exp(-beta (t_i - t_j))
    double b = 0.0;  // d a / d beta
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i > 0) {
        const double dt = t[i] - t[i - 1];
        const double e = std::exp(-beta * dt);
        a = e * (1.0 + a);
        b = -dt * a + e * b;
      }
      const double lambda = mu + alpha * a;
      ll += std::log(lambda);
      d_mu += 1.0 / lambda;
      d_eta += beta * a / lambda;
      d_beta += eta * (a + beta * b) / lambda;

      const double tail = horizon - t[i];
      const double e_tail = std::exp(-beta * tail);
      ll -= eta * (1.0 - e_tail);
      d_eta -= 1.0 - e_tail;
      d_beta -= eta * tail * e_tail;
    }
    grad = {-mu * d_mu, -beta * d_beta, -eta * (1.0 - eta) * d_eta};
    return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
  }
};

struct StartResult {
  bool converged = false;
  Vec x{};
  double f = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

StartResult bfgs(const Objective& obj, Vec x, double scale) {
  constexpr int kMaxIter = 1000;
  constexpr double kMaxStep = 5.0;
  const double g_tol = 1e-6 * scale;
  const double g_loose = 1e-3 * scale;

  std::array<Vec, 3> h{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  Vec g{};
  double f = obj(x, g);
  StartResult out;
  if (!std::isfinite(f)) return out;

  for (int iter = 0; iter < kMaxIter; ++iter) {
    out.iterations = iter;
    if (inf_norm(g) <= g_tol) {
      out.converged = true;
      break;
    }
    Vec p{};
    for (int i = 0; i < 3; ++i) p[i] = -dot(h[i], g);
    double slope = dot(p, g);
    if (!(slope < 0.0)) {
      h = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
      p = {-g[0], -g[1], -g[2]};
      slope = dot(p, g);
    }
    const double len = inf_norm(p);
    double step = len > kMaxStep ? kMaxStep / len : 1.0;

    Vec x_new{};
    Vec g_new{};
    double f_new = 0.0;
    bool accepted = false;
    for (int k = 0; k < 60; ++k, step *= 0.5) {
      for (int i = 0; i < 3; ++i) x_new[i] = x[i] + step * p[i];
      f_new = obj(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.converged = inf_norm(g) <= g_loose;
      break;
    }

    Vec s{};
    Vec y{};
    for (int i = 0; i < 3; ++i) {
      s[i] = x_new[i] - x[i];
      y[i] = g_new[i] - g[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-12) {
      const double rho = 1.0 / sy;
      Vec hy{};
      for (int i = 0; i < 3; ++i) hy[i] = dot(h[i], y);
      const double yhy = dot(y, hy);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          h[i][j] += (1.0 + rho * yhy) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
      }
    }
    const double f_prev = f;
    x = x_new;
    g = g_new;
    f = f_new;
    if (std::abs(f_prev - f) <= 1e-15 * std::max(1.0, std::abs(f)) && inf_norm(g) <= g_loose) {
      out.converged = true;
      break;
    }
  }
  out.x = x;
  out.f = f;
  return out;
}

}  // namespace

double hawkes_log_likelihood(std::span<const double> times, double horizon, double mu,
                             double alpha, double beta) {
  double ll = -mu * horizon;
  double a = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0) a = std::exp(-beta * (times[i] - times[i - 1])) * (1.0 + a);
    ll += std::log(mu + alpha * a);
    ll -= alpha / beta * (1.0 - std::exp(-beta * (horizon - times[i])));
  }
  return ll;
}

HawkesFit fit_hawkes(std::span<const double> times, double horizon) {
  const std::size_t n = times.size();
  if (n < kMinArrivals) {
    throw Error(ErrorCode::Undefined,
                "hawkes fit needs at least 20 arrivals, got " + std::to_string(n));
  }
  if (!(horizon > 0.0) || times.front() < 0.0 || times.back() > horizon) {
    throw Error(ErrorCode::Undefined, "arrivals must lie in [0, horizon] with horizon > 0");
  }
  const double scale = horizon / static_cast<double>(n);
  std::vector<double> norm(times.begin(), times.end());
  for (auto& v : norm) v /= scale;
  const Objective obj{norm, horizon / scale};

  constexpr std::array<std::pair<double, double>, 3> kStarts{{{0.1, 1.0}, {0.5, 0.3}, {0.8, 3.0}}};
  StartResult best;
  HawkesFit fit;
  std::string diagnostics;
  for (const auto& [eta, beta] : kStarts) {
    const double mu = (1.0 - eta) * static_cast<double>(n) / obj.horizon;
    const Vec x0{std::log(mu), std::log(beta), std::log(eta / (1.0 - eta))};
    const auto r = bfgs(obj, x0, static_cast<double>(n));
    fit.iterations += r.iterations;
    diagnostics += " start(eta=" + std::to_string(eta) + ", beta=" + std::to_string(beta) +
                   "): iters=" + std::to_string(r.iterations) +
                   " nll=" + std::to_string(r.f) + (r.converged ? " ok;" : " no;");
    if (!r.converged) continue;
    ++fit.starts_converged;
    if (r.f < best.f) best = r;
  }
  if (fit.starts_converged == 0) {
    throw Error(ErrorCode::FitFailed, "hawkes optimizer did not converge:" + diagnostics);
  }
  const double eta = sigmoid(best.x[2]);
  fit.mu = std::exp(best.x[0]) / scale;
  fit.beta = std::exp(best.x[1]) / scale;
  fit.alpha = eta * fit.beta;
  fit.branching = std::clamp(eta, 0.0, kMaxBranching);
  fit.log_likelihood = -best.f - static_cast<double>(n) * std::log(scale);
  return fit;
}

double hawkes_branching(std::span<const Timestamp> arrivals) {
  if (arrivals.size() < kMinArrivals) {
    throw Error(ErrorCode::Undefined,
                "hawkes fit needs at least 20 arrivals, got " + std::to_string(arrivals.size()));
  }
  const Timestamp t0 = arrivals.front();
  std::vector<double> t;
  t.reserve(arrivals.size());
  for (auto a : arrivals) t.push_back(static_cast<double>((a - t0).count()));
  if (!std::is_sorted(t.begin(), t.end())) {
    throw Error(ErrorCode::UnsortedInput, "arrival times must be sorted");
  }
  return fit_hawkes(t, t.back()).branching;
}

}  // namespace infoflow
