#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

// Multi-exponential population-decay model
//   y(t) = alphaL * ((1 - sum a_i) exp(-t/T1opt) + sum a_i exp(-t/tau_i))
// with the optical lifetime T1opt held fixed.
namespace ffrate::decay {

struct DecayTrace {
  std::vector<double> t;  // s, strictly increasing
  std::vector<double> y;  // absorption change
  std::optional<double> noise;

  /// At least 8 finite samples with strictly increasing times.
  void validate() const;
  [[nodiscard]] std::size_t size() const { return t.size(); }
};

struct Component {
  double a = 0.0;
  double tau = 0.0;  // s
};

struct ModelParams {
  double alpha_l = 1.0;
  std::vector<Component> components;
  double t1_opt = 11e-3;
};

double evaluate(const ModelParams& p, double t);

/// Exact model plus Gaussian noise with standard deviation
/// noise_level * |alpha_l|.
DecayTrace synthesize_trace(const ModelParams& p, std::span<const double> times, double noise_level,
                            std::uint64_t seed);

/// (1/M) sum ((model - data) / max|data|)^2.
double chi_squared(const DecayTrace& trace, const ModelParams& p);

struct FitOptions {
  double t1_opt = 11e-3;
  int n_max = 4;
  double chi2_threshold = 1e-3;
  double resolution_s = 10e-6;  // fastest measurable lifetime
  int tau_seeds = 10;           // log-spaced multi-start seeds
};

struct FitResult {
  int n = 0;
  double alpha_l = 0.0;
  std::vector<double> a;
  std::vector<double> tau;        // ascending
  std::vector<bool> reliable;     // tau >= resolution
  double t1_opt = 0.0;
  double chi2 = 0.0;
  bool converged = false;         // chi2 below threshold
  std::vector<double> chi2_by_n;  // chi2 of every N tried, N = 1, 2, ...

  [[nodiscard]] ModelParams params() const;
};

/// Best fit with exactly n free exponentials (multi-start Levenberg-Marquardt).
/// Throws NotConverged if no start produces a finite, admissible solution.
FitResult fit_fixed_n(const DecayTrace& trace, int n, const FitOptions& options = {});

/// Raises N from 1 until chi2 < threshold; returns the N_max fit flagged
/// non-converged if the threshold is never met. Throws InvalidInput for a
/// constant trace.
FitResult fit_decay(const DecayTrace& trace, const FitOptions& options = {});

struct DominantTime {
  double tau = 0.0;
  std::size_t index = 0;
  bool tie = false;
};

/// tau of the component with the largest a; ties resolve to the smaller tau.
DominantTime dominant_time(const FitResult& fit);

/// Two columns (t_s, delta_alphaL); '#' comments and one header row allowed.
DecayTrace read_trace_csv(std::istream& in);

}  // namespace ffrate::decay
