#include "ffrate/decay_fit.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "ffrate/errors.hpp"
#include "ffrate/rng.hpp"

namespace ffrate::decay {

void DecayTrace::validate() const {
  if (t.size() != y.size()) throw InvalidInput("trace: time and value columns differ in length");
  if (t.size() < 8) throw InvalidInput("trace: need at least 8 samples");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i]) || !std::isfinite(y[i])) throw InvalidInput("trace: non-finite sample");
    if (i > 0 && !(t[i] > t[i - 1])) throw InvalidInput("trace: times must be strictly increasing");
  }
}

double evaluate(const ModelParams& p, double t) {
  double sum_a = 0.0;
  double value = 0.0;
  for (const auto& c : p.components) {
    sum_a += c.a;
    value += c.a * std::exp(-t / c.tau);
  }
  return p.alpha_l * ((1.0 - sum_a) * std::exp(-t / p.t1_opt) + value);
}

DecayTrace synthesize_trace(const ModelParams& p, std::span<const double> times, double noise_level,
                            std::uint64_t seed) {
  if (!(p.alpha_l > 0.0) || !(p.t1_opt > 0.0)) {
    throw InvalidInput("synthesize: alphaL and T1opt must be positive");
  }
  for (const auto& c : p.components) {
    if (!(c.tau > 0.0) || c.a < 0.0) throw InvalidInput("synthesize: need a >= 0 and tau > 0");
  }
  if (noise_level < 0.0) throw InvalidInput("synthesize: noise level must be >= 0");
  DecayTrace trace;
  trace.t.assign(times.begin(), times.end());
  trace.y.resize(times.size());
  Rng rng(seed);
  const double sigma = noise_level * std::abs(p.alpha_l);
  for (std::size_t i = 0; i < times.size(); ++i) {
    trace.y[i] = evaluate(p, times[i]);
    if (sigma > 0.0) trace.y[i] += sigma * rng.normal();
  }
  if (sigma > 0.0) trace.noise = sigma;
  return trace;
}

namespace {

double data_scale(const DecayTrace& trace) {
  double m = 0.0;
  for (double v : trace.y) m = std::max(m, std::abs(v));
  return m;
}

// Parameter vector: [alphaL, a_1..a_n, log tau_1..log tau_n].
struct Problem {
  const DecayTrace& trace;
  int n;
  double t1_opt;
  double inv_scale;
  double log_tau_lo;
  double log_tau_hi;

  [[nodiscard]] int dim() const { return 1 + 2 * n; }

  void residuals(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) const {
    const auto m = static_cast<Eigen::Index>(trace.size());
    r.resize(m);
    if (jac) jac->resize(m, dim());
    const double alpha = p(0);
    double sum_a = 0.0;
    for (int i = 0; i < n; ++i) sum_a += p(1 + i);
    for (Eigen::Index k = 0; k < m; ++k) {
      const double t = trace.t[k];
      const double e0 = std::exp(-t / t1_opt);
      double shape = (1.0 - sum_a) * e0;
      for (int i = 0; i < n; ++i) {
        const double tau = std::exp(p(1 + n + i));
        const double ei = std::exp(-t / tau);
        shape += p(1 + i) * ei;
        if (jac) {
          (*jac)(k, 1 + i) = alpha * (ei - e0) * inv_scale;
          (*jac)(k, 1 + n + i) = alpha * p(1 + i) * ei * (t / tau) * inv_scale;
        }
      }
      if (jac) (*jac)(k, 0) = shape * inv_scale;
      r(k) = (alpha * shape - trace.y[k]) * inv_scale;
    }
  }

  [[nodiscard]] double cost(const Eigen::VectorXd& p) const {
    Eigen::VectorXd r;
    residuals(p, r, nullptr);
    return r.squaredNorm();
  }

  void clamp(Eigen::VectorXd& p) const {
    for (int i = 0; i < n; ++i) p(1 + n + i) = std::clamp(p(1 + n + i), log_tau_lo, log_tau_hi);
  }
};

// Levenberg-Marquardt with Marquardt scaling; only cost-decreasing steps
// are accepted, so the result is never worse than the start.
double levenberg_marquardt(const Problem& prob, Eigen::VectorXd& p) {
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  prob.residuals(p, r, &jac);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  for (int iter = 0; iter < 400; ++iter) {
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;
    bool accepted = false;
    for (int attempt = 0; attempt < 30 && !accepted; ++attempt) {
      Eigen::MatrixXd a = jtj;
      for (int i = 0; i < prob.dim(); ++i) a(i, i) += lambda * std::max(jtj(i, i), 1e-12);
      const Eigen::VectorXd step = a.ldlt().solve(-grad);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      Eigen::VectorXd trial = p + step;
      prob.clamp(trial);
      const double trial_cost = prob.cost(trial);
      if (std::isfinite(trial_cost) && trial_cost < cost) {
        const double improvement = cost - trial_cost;
        p = trial;
        cost = trial_cost;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (improvement <= 1e-10 * std::max(cost, 1e-300) || step.norm() < 1e-10) return cost;
      } else {
        lambda *= 4.0;
      }
    }
    if (!accepted) break;
    prob.residuals(p, r, &jac);
  }
  return cost;
}

// Linear least squares for the amplitudes at fixed lifetimes.
Eigen::VectorXd linear_start(const Problem& prob, const std::vector<double>& taus) {
  const auto m = static_cast<Eigen::Index>(prob.trace.size());
  const int n = prob.n;
  Eigen::MatrixXd basis(m, n + 1);
  Eigen::VectorXd y(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double t = prob.trace.t[k];
    basis(k, 0) = std::exp(-t / prob.t1_opt);
    for (int i = 0; i < n; ++i) basis(k, 1 + i) = std::exp(-t / taus[i]);
    y(k) = prob.trace.y[k];
  }
  const Eigen::VectorXd c = basis.colPivHouseholderQr().solve(y);
  Eigen::VectorXd p(prob.dim());
  double alpha = c.sum();
  if (!(std::abs(alpha) > 1e-12 * (1.0 / prob.inv_scale)) || !std::isfinite(alpha)) {
    alpha = prob.trace.y.front();
    for (int i = 0; i < n; ++i) p(1 + i) = 0.1;
  } else {
    for (int i = 0; i < n; ++i) p(1 + i) = c(1 + i) / alpha;
  }
  p(0) = alpha;
  for (int i = 0; i < n; ++i) p(1 + n + i) = std::log(taus[i]);
  prob.clamp(p);
  return p;
}

bool admissible(const Eigen::VectorXd& p, int n, double cost) {
  if (!p.allFinite() || !std::isfinite(cost)) return false;
  double sum_abs = 0.0;
  for (int i = 0; i < n; ++i) sum_abs += std::abs(p(1 + i));
  return sum_abs <= 2.0;
}

void combinations(int k, int n, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == n) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < k; ++i) {
    cur.push_back(i);
    combinations(k, n, i + 1, cur, out);
    cur.pop_back();
  }
}

FitResult to_result(const Eigen::VectorXd& p, int n, double cost, const DecayTrace& trace,
                    const FitOptions& options) {
  FitResult out;
  out.n = n;
  out.alpha_l = p(0);
  out.t1_opt = options.t1_opt;
  std::vector<Component> comps(n);
  for (int i = 0; i < n; ++i) comps[i] = {p(1 + i), std::exp(p(1 + n + i))};
  std::stable_sort(comps.begin(), comps.end(),
                   [](const Component& x, const Component& y) { return x.tau < y.tau; });
  for (const auto& c : comps) {
    out.a.push_back(c.a);
    out.tau.push_back(c.tau);
    out.reliable.push_back(c.tau >= options.resolution_s);
  }
  out.chi2 = cost / static_cast<double>(trace.size());
  out.converged = out.chi2 < options.chi2_threshold;
  return out;
}

Eigen::VectorXd to_vector(const FitResult& fit) {
  Eigen::VectorXd p(1 + 2 * fit.n);
  p(0) = fit.alpha_l;
  for (int i = 0; i < fit.n; ++i) {
    p(1 + i) = fit.a[i];
    p(1 + fit.n + i) = std::log(fit.tau[i]);
  }
  return p;
}

// Multi-start fit; `nested` (an N-1 solution) seeds extra starts so the
// N fit can never be worse than it.
FitResult fit_n(const DecayTrace& trace, int n, const FitOptions& options,
                const FitResult* nested) {
  const double scale = data_scale(trace);
  if (!(scale > 0.0)) throw InvalidInput("trace: all values are zero");
  double min_dt = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < trace.size(); ++i) min_dt = std::min(min_dt, trace.t[i] - trace.t[i - 1]);
  const double t_max = trace.t.back();
  const double seed_lo = 0.5 * min_dt;
  const double seed_hi = 2.0 * t_max;
  Problem prob{trace, n, options.t1_opt, 1.0 / scale, std::log(seed_lo * 1e-2), std::log(seed_hi * 1e2)};

  const int k = std::max(options.tau_seeds, n);
  std::vector<double> seeds(k);
  for (int i = 0; i < k; ++i) {
    const double f = k == 1 ? 0.0 : static_cast<double>(i) / (k - 1);
    seeds[i] = std::exp(std::log(seed_lo) + f * (std::log(seed_hi) - std::log(seed_lo)));
  }

  std::vector<Eigen::VectorXd> starts;
  if (nested) {
    const Eigen::VectorXd base = to_vector(*nested);
    for (double s : seeds) {
      Eigen::VectorXd p(prob.dim());
      p(0) = base(0);
      for (int i = 0; i < n - 1; ++i) {
        p(1 + i) = base(1 + i);
        p(1 + n + i) = base(n + i);
      }
      p(n) = 0.0;
      p(2 * n) = std::log(s);
      prob.clamp(p);
      starts.push_back(p);
    }
  }
  std::vector<std::vector<int>> combos;
  std::vector<int> cur;
  combinations(k, n, 0, cur, combos);
  for (const auto& combo : combos) {
    std::vector<double> taus;
    for (int idx : combo) taus.push_back(seeds[idx]);
    starts.push_back(linear_start(prob, taus));
  }

  double best_cost = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best;
  for (Eigen::VectorXd p : starts) {
    const double cost = levenberg_marquardt(prob, p);
    if (admissible(p, n, cost) && cost < best_cost) {
      best_cost = cost;
      best = p;
    }
  }
  if (best.size() == 0) {
    throw NotConverged("fit: no admissible solution with N = " + std::to_string(n) +
                       " after " + std::to_string(starts.size()) + " starts");
  }
  return to_result(best, n, best_cost, trace, options);
}

}  // namespace

double chi_squared(const DecayTrace& trace, const ModelParams& p) {
  const double scale = data_scale(trace);
  if (!(scale > 0.0)) throw InvalidInput("trace: all values are zero");
  double total = 0.0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const double d = (evaluate(p, trace.t[k]) - trace.y[k]) / scale;
    total += d * d;
  }
  return total / static_cast<double>(trace.size());
}

ModelParams FitResult::params() const {
  ModelParams p;
  p.alpha_l = alpha_l;
  p.t1_opt = t1_opt;
  for (int i = 0; i < n; ++i) p.components.push_back({a[i], tau[i]});
  return p;
}

FitResult fit_fixed_n(const DecayTrace& trace, int n, const FitOptions& options) {
  trace.validate();
  if (n < 1) throw InvalidInput("fit: N must be >= 1");
  return fit_n(trace, n, options, nullptr);
}

FitResult fit_decay(const DecayTrace& trace, const FitOptions& options) {
  trace.validate();
  if (options.n_max < 1) throw InvalidInput("fit: N_max must be >= 1");
  if (!(options.t1_opt > 0.0)) throw InvalidInput("fit: T1opt must be > 0");
  const auto [lo, hi] = std::minmax_element(trace.y.begin(), trace.y.end());
  if (*lo == *hi) throw InvalidInput("fit: degenerate (constant) trace");

  std::vector<double> history;
  FitResult best;
  for (int n = 1; n <= options.n_max; ++n) {
    FitResult fit = fit_n(trace, n, options, n > 1 ? &best : nullptr);
    history.push_back(fit.chi2);
    best = std::move(fit);
    if (best.converged) break;
  }
  best.chi2_by_n = std::move(history);
  return best;
}

DominantTime dominant_time(const FitResult& fit) {
  if (fit.n < 1 || fit.a.empty()) throw InvalidInput("dominant time: fit has no components");
  DominantTime out;
  out.index = 0;
  for (std::size_t i = 1; i < fit.a.size(); ++i) {
    if (fit.a[i] > fit.a[out.index]) out.index = i;
  }
  for (std::size_t i = 0; i < fit.a.size(); ++i) {
    if (i != out.index && fit.a[i] == fit.a[out.index]) {
      out.tie = true;
      if (fit.tau[i] < fit.tau[out.index]) out.index = i;
    }
  }
  out.tau = fit.tau[out.index];
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

DecayTrace read_trace_csv(std::istream& in) {
  DecayTrace trace;
  std::string line;
  std::size_t line_no = 0;
  bool seen_row = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto comma = view.find(',');
    if (comma == std::string_view::npos) {
      throw InvalidInput("trace line " + std::to_string(line_no) + ": expected two comma-separated columns");
    }
    double t = 0.0;
    double y = 0.0;
    const bool ok = parse_double(view.substr(0, comma), t) && parse_double(view.substr(comma + 1), y);
    if (!ok) {
      if (!seen_row) {
        seen_row = true;  // header
        continue;
      }
      throw InvalidInput("trace line " + std::to_string(line_no) + ": not a number");
    }
    seen_row = true;
    trace.t.push_back(t);
    trace.y.push_back(y);
  }
  trace.validate();
  return trace;
}

}  // namespace ffrate::decay
