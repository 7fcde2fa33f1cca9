#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "splitreg/box_qp.hpp"
#include "splitreg/correlation.hpp"
#include "splitreg/dataset.hpp"
#include "splitreg/elastic_net.hpp"
#include "splitreg/errors.hpp"
#include "splitreg/estimators.hpp"
#include "splitreg/format.hpp"
#include "splitreg/mspe_closed.hpp"
#include "splitreg/parallel.hpp"
#include "splitreg/rng.hpp"
#include "splitreg/splits.hpp"
#include "splitreg/targetcov.hpp"

namespace splitreg {

/// One experiment: fixed design size, coefficient structure, noise level via
/// SNR, correlation pair (r empirical, rho population) and replication counts.
struct Scenario {
  int n = 10;            // observations per training set
  int d = 2;             // predictors
  double beta1 = 1.0;    // value of the first k coefficients
  double beta2 = 0.0;    // value of the remaining d-k coefficients
  int k = 1;             // defaults: 1 for d=2, 2 otherwise (see scenario_defaults)
  double snr = 1.0;      // signal-to-noise ratio: sigma2 = beta' Gamma_rho beta / snr
  double r = 0.0;        // empirical correlation forced on every training design
  double rho = 0.0;      // population correlation of the test points
  int num_train = 200;   // N training replicates
  int num_test = 500;    // M test pairs
  std::uint64_t seed = 1;
};

inline void validate_scenario(const Scenario& sc) {
  if (sc.d < 2) throw ParameterError("scenario: d must be >= 2");
  if (sc.n <= sc.d) throw ParameterError("scenario: need n > d to hit an exact sample covariance");
  if (!(sc.k >= 1 && sc.k < sc.d)) throw ParameterError("scenario: k must lie in [1, d-1]");
  if (!(sc.snr > 0.0)) throw ParameterError("scenario: snr must be > 0");
  if (sc.num_train < 1 || sc.num_test < 1)
    throw ParameterError("scenario: replicate and test counts must be >= 1");
}

inline CorrelationSpec scenario_correlation(const Scenario& sc) {
  return equicorrelation_spec(sc.d, sc.rho, sc.r);
}

inline Eigen::VectorXd scenario_beta(const Scenario& sc) {
  Eigen::VectorXd beta(sc.d);
  for (int j = 0; j < sc.d; ++j) beta[j] = j < sc.k ? sc.beta1 : sc.beta2;
  return beta;
}

inline double scenario_sigma2(const Scenario& sc) {
  Eigen::VectorXd beta = scenario_beta(sc);
  double signal = beta.dot(scenario_correlation(sc).gamma_rho * beta);
  if (!(signal > 0.0))
    throw ParameterError("scenario: beta' Gamma_rho beta must be > 0 so snr can set sigma2");
  return signal / sc.snr;
}

/// Log-spaced grid with the endpoints hit exactly (so grids rebuilt from a
/// file echo of their endpoints are bit-identical).
inline std::vector<double> log_spaced_grid(double lo, double hi, int points, bool descending) {
  if (!(lo > 0.0) || !(hi > 0.0) || !(lo <= hi))
    throw ParameterError("log_spaced_grid: need 0 < min <= max");
  if (points < 1) throw ParameterError("log_spaced_grid: need at least 1 point");
  if (points == 1 && lo != hi)
    throw ParameterError("log_spaced_grid: a single point needs min = max");
  std::vector<double> out;
  out.reserve(points);
  for (int i = 0; i < points; ++i) {
    if (i == 0) out.push_back(lo);
    else if (i == points - 1) out.push_back(hi);
    else {
      double t = static_cast<double>(i) / (points - 1);
      out.push_back(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))));
    }
  }
  if (points == 1) out.back() = hi;
  if (descending) std::reverse(out.begin(), out.end());
  return out;
}

/// Tuning grids for the grid-searched methods. Weight-type tunings (omega, w,
/// delta) are never gridded - they are minimized exactly - so only the lambda
/// and alpha families live here.
struct TuningGrid {
  std::vector<double> lambda;    // shared by ridge / lasso / EN / SplitReg lambda_s; descending
  std::vector<double> alpha;    // elastic-net mixing values in [0,1]
  std::vector<double> lambda_d;  // SplitReg diversity penalties; must contain 0

  /// 50 log-spaced lambdas in [1e-4, 1e3] scaled by n, descending; alpha in
  /// steps of 0.25; lambda_d = {0} plus 20 log-spaced values in [1e-3, 1e2].
  static TuningGrid defaults(int n) {
    TuningGrid g;
    g.lambda = log_spaced_grid(1e-4 * n, 1e3 * n, 50, true);
    g.alpha = {0.0, 0.25, 0.5, 0.75, 1.0};
    g.lambda_d.push_back(0.0);
    std::vector<double> tail = log_spaced_grid(1e-3, 1e2, 20, false);
    g.lambda_d.insert(g.lambda_d.end(), tail.begin(), tail.end());
    return g;
  }

  void validate() const {
    if (lambda.empty() || alpha.empty() || lambda_d.empty())
      throw ParameterError("tuning grid: all grids must be nonempty");
    for (std::size_t i = 0; i < lambda.size(); ++i) {
      if (!(lambda[i] > 0.0)) throw ParameterError("tuning grid: lambda values must be > 0");
      if (i > 0 && !(lambda[i] < lambda[i - 1]))
        throw ParameterError("tuning grid: lambda grid must be strictly descending");
    }
    for (double a : alpha)
      if (!(a >= 0.0 && a <= 1.0)) throw ParameterError("tuning grid: alpha must lie in [0,1]");
    bool has_zero = false;
    for (double ld : lambda_d) {
      if (!(ld >= 0.0)) throw ParameterError("tuning grid: lambda_d must be >= 0");
      if (ld == 0.0) has_zero = true;
    }
    if (!has_zero)
      throw ParameterError("tuning grid: lambda_d grid must contain 0 (the uncoupled case)");
  }
};

/// The shared Monte Carlo sample: N training sets whose designs all have
/// empirical covariance exactly gamma_r, plus M test pairs drawn from the
/// population law. Every method and tuning value is evaluated on this one
/// object (common random numbers); the checksum lets consumers assert that.
struct McSamples {
  std::vector<Dataset> train;
  Eigen::MatrixXd test_x;  // M x d
  Eigen::VectorXd test_y;
  Eigen::VectorXd beta;
  double sigma2 = 0.0;
  std::uint64_t checksum = 0;

  int num_train() const { return static_cast<int>(train.size()); }
  int num_test() const { return static_cast<int>(test_x.rows()); }
};

namespace detail {

inline std::uint64_t fnv_update(std::uint64_t h, const double* data, std::size_t count) {
  const unsigned char* bytes = reinterpret_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < count * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

inline std::uint64_t samples_checksum(const McSamples& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& ds : s.train) {
    h = detail::fnv_update(h, ds.x.data(), static_cast<std::size_t>(ds.x.size()));
    h = detail::fnv_update(h, ds.y.data(), static_cast<std::size_t>(ds.y.size()));
  }
  h = detail::fnv_update(h, s.test_x.data(), static_cast<std::size_t>(s.test_x.size()));
  h = detail::fnv_update(h, s.test_y.data(), static_cast<std::size_t>(s.test_y.size()));
  return h;
}

/// Draws the shared sample for a scenario. Per-replicate RNG streams are
/// derived from (seed, replicate, purpose), so the result is byte-identical
/// for any parallelism degree.
inline McSamples make_samples(const Scenario& sc, int jobs = 1) {
  validate_scenario(sc);
  CorrelationSpec spec = scenario_correlation(sc);
  McSamples s;
  s.beta = scenario_beta(sc);
  s.sigma2 = scenario_sigma2(sc);
  double sigma = std::sqrt(s.sigma2);
  s.train.resize(sc.num_train);
  parallel_for(static_cast<std::size_t>(sc.num_train), jobs, [&](std::size_t i) {
    try {
      RngStream design_stream = derive_stream(sc.seed, i, "train_design");
      Eigen::MatrixXd x = generate(TargetCovRequest{sc.n, spec, design_stream});
      RngStream noise_stream = derive_stream(sc.seed, i, "train_noise");
      Eigen::VectorXd y = x * s.beta + sigma * noise_stream.normals(sc.n);
      s.train[i] = Dataset{std::move(x), std::move(y), true};
    } catch (const Error& e) {
      throw GenerationError("training replicate " + std::to_string(i + 1) + ": " + e.what());
    }
  });
  RngStream test_stream = derive_stream(sc.seed, 0, "test_pairs");
  s.test_x = draw_population(sc.num_test, spec.gamma_rho, test_stream);
  s.test_y = s.test_x * s.beta + sigma * test_stream.normals(sc.num_test);
  s.checksum = samples_checksum(s);
  return s;
}

/// Monte Carlo estimate of the prediction error g: mean over replicates and
/// test points of (prediction - y0)^2. se_replicate is the standard error of
/// the replicate means (the spread induced by training randomness);
/// se_test is the standard error induced by the shared test sample, needed
/// when comparing against an exact constant. Both are reported.
struct GEstimate {
  double value = 0.0;
  double se_replicate = 0.0;
  double se_test = 0.0;

  double se_total() const {
    return std::sqrt(se_replicate * se_replicate + se_test * se_test);
  }
};

namespace detail {

/// Mean that is invariant to the order of its inputs: sort ascending, then
/// pairwise-sum. Permuting replicates therefore cannot change any output bit.
inline double stable_mean(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  return pairwise_sum(values) / static_cast<double>(values.size());
}

/// Standard error of the mean of `values` (sample sd over sqrt(count)).
inline double standard_error(const std::vector<double>& values, double mean) {
  const std::size_t count = values.size();
  if (count < 2) return 0.0;
  std::vector<double> sq(count);
  for (std::size_t i = 0; i < count; ++i) sq[i] = (values[i] - mean) * (values[i] - mean);
  std::sort(sq.begin(), sq.end());
  double var = pairwise_sum(sq) / static_cast<double>(count - 1);
  return std::sqrt(var / static_cast<double>(count));
}

struct ValueSe {
  double value = 0.0;
  double se = 0.0;
};

inline ValueSe summarize(const std::vector<double>& replicate_means) {
  ValueSe out;
  out.value = stable_mean(replicate_means);
  out.se = standard_error(replicate_means, out.value);
  return out;
}

}  // namespace detail

/// Evaluates one fitting rule at fixed tuning on the shared sample: fits every
/// training replicate, predicts every test point, averages the squared errors.
inline GEstimate estimate_g(const McSamples& samples,
                            const std::function<Eigen::VectorXd(const Dataset&)>& fit,
                            int jobs = 1) {
  const int num_train = samples.num_train();
  const int num_test = samples.num_test();
  std::vector<double> replicate_means(num_train);
  Eigen::MatrixXd sq_errors(num_test, num_train);
  parallel_for(static_cast<std::size_t>(num_train), jobs, [&](std::size_t i) {
    Eigen::VectorXd coef = fit(samples.train[i]);
    Eigen::VectorXd err = samples.test_x * coef - samples.test_y;
    sq_errors.col(i) = err.array().square();
    replicate_means[i] = pairwise_sum(sq_errors.col(i).data(), num_test) /
                         static_cast<double>(num_test);
  });
  detail::ValueSe vs = detail::summarize(replicate_means);
  std::vector<double> test_means(num_test);
  std::vector<double> row(num_train);
  for (int j = 0; j < num_test; ++j) {
    for (int i = 0; i < num_train; ++i) row[i] = sq_errors(j, i);
    test_means[j] = detail::stable_mean(row);
  }
  double test_mean_avg = detail::stable_mean(test_means);
  return GEstimate{vs.value, vs.se, detail::standard_error(test_means, test_mean_avg)};
}

/// One row of a results table: the minimum attainable prediction error of one
/// method at one scenario point, with the tuning that attained it. `mspe` is
/// the g scale (irreducible sigma2 included); `mspe_minus_sigma2` aligns with
/// the closed forms. `se` is the replicate-level Monte Carlo standard error
/// (0 for closed-form records).
struct MspeRecord {
  std::string method;
  double beta2 = 0.0;
  double snr = 0.0;
  double r = 0.0;
  double rho = 0.0;
  double mspe = 0.0;
  double mspe_minus_sigma2 = 0.0;
  double se = 0.0;
  std::string argmin_tuning;
};

enum class Method { ls, ridge, lasso, elastic_net, garrote, split, splitreg, splitreg_delta };

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::ls: return "ls";
    case Method::ridge: return "ridge";
    case Method::lasso: return "lasso";
    case Method::elastic_net: return "elastic_net";
    case Method::garrote: return "garrote";
    case Method::split: return "split";
    case Method::splitreg: return "splitreg";
    case Method::splitreg_delta: return "splitreg_delta";
  }
  throw ParameterError("method_name: unknown method");
}

inline Method parse_method(std::string_view name) {
  for (Method m : {Method::ls, Method::ridge, Method::lasso, Method::elastic_net, Method::garrote,
                   Method::split, Method::splitreg, Method::splitreg_delta})
    if (method_name(m) == name) return m;
  throw ParameterError("unknown method '" + std::string(name) +
                       "' (expected one of: ls, ridge, lasso, elastic_net, garrote, split, "
                       "splitreg, splitreg_delta)");
}

/// True when the two-predictor closed forms cover the method.
inline bool has_closed_form(Method m) {
  return m == Method::ls || m == Method::ridge || m == Method::garrote || m == Method::split;
}

struct SweepOptions {
  TuningGrid grid;
  int splitreg_groups = 2;
  int jobs = 1;
  bool closed_form_d2 = true;      // use closed forms instead of MC when d = 2
  long long partition_cap = 10'000'000;
  int cd_max_sweeps = 100000;
  double cd_tolerance = 1e-8;
};

namespace detail {

/// Shared evaluation context: test-sample second moments. For a linear
/// predictor with coefficients b, the mean squared test error is exactly
/// b'Sx b - 2 u'b + c, a quadratic used both for evaluation and for the
/// exact weight optimizations.
struct GContext {
  const McSamples& samples;
  Eigen::MatrixXd sx;   // (1/M) Xt' Xt
  Eigen::VectorXd u;    // (1/M) Xt' yt
  double c = 0.0;       // (1/M) yt' yt

  explicit GContext(const McSamples& s)
      : samples(s),
        sx((s.test_x.transpose() * s.test_x) / static_cast<double>(s.num_test())),
        u((s.test_x.transpose() * s.test_y) / static_cast<double>(s.num_test())),
        c(s.test_y.squaredNorm() / static_cast<double>(s.num_test())) {}

  double eval(const Eigen::VectorXd& coef) const {
    return coef.dot(sx * coef) - 2.0 * u.dot(coef) + c;
  }
};

inline std::vector<Eigen::VectorXd> ls_coefficients(const McSamples& samples, int jobs) {
  std::vector<Eigen::VectorXd> coefs(samples.train.size());
  parallel_for(samples.train.size(), jobs,
               [&](std::size_t i) { coefs[i] = fit_ls(samples.train[i]).coef; });
  return coefs;
}

inline std::vector<double> eval_all(const GContext& ctx,
                                    const std::vector<Eigen::VectorXd>& coefs) {
  std::vector<double> e(coefs.size());
  for (std::size_t i = 0; i < coefs.size(); ++i) e[i] = ctx.eval(coefs[i]);
  return e;
}

struct WeightedMinResult {
  double value = 0.0;
  double se = 0.0;
  Eigen::VectorXd w;
};

/// Exact inner minimization for estimators of the form diag(w) * coef_i with
/// w in [0,1]^d: the pooled error is the convex quadratic
/// w' (B2 o Sx) w - 2 (bbar o u)'w + c with B2 = mean_i coef_i coef_i' and
/// bbar = mean_i coef_i (o = entrywise product). The box minimizer and the
/// unshrunken w = 1 are both evaluated exactly and the better one is kept, so
/// the reported value can never exceed the plain estimator's.
inline WeightedMinResult weighted_exact_min(const GContext& ctx,
                                            const std::vector<Eigen::VectorXd>& coefs) {
  const int d = static_cast<int>(coefs.front().size());
  const double inv_n = 1.0 / static_cast<double>(coefs.size());
  Eigen::MatrixXd b2 = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd bbar = Eigen::VectorXd::Zero(d);
  for (const auto& b : coefs) {
    b2.noalias() += b * b.transpose();
    bbar += b;
  }
  b2 *= inv_n;
  bbar *= inv_n;
  Eigen::MatrixXd q_mat = b2.cwiseProduct(ctx.sx);
  Eigen::VectorXd q_vec = bbar.cwiseProduct(ctx.u);
  Eigen::VectorXd w_opt = minimize_box_quadratic(q_mat, q_vec, 0.0, 1.0);

  auto evaluate = [&](const Eigen::VectorXd& w) {
    std::vector<double> e(coefs.size());
    for (std::size_t i = 0; i < coefs.size(); ++i)
      e[i] = ctx.eval(w.cwiseProduct(coefs[i]));
    return summarize(e);
  };
  ValueSe at_opt = evaluate(w_opt);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(d);
  ValueSe at_ones = evaluate(ones);
  if (at_ones.value < at_opt.value) return WeightedMinResult{at_ones.value, at_ones.se, ones};
  return WeightedMinResult{at_opt.value, at_opt.se, w_opt};
}

inline std::string format_vector(const Eigen::VectorXd& v) {
  std::string s = "[";
  for (int j = 0; j < v.size(); ++j) {
    if (j > 0) s += ' ';
    s += format_double(v[j]);
  }
  s += ']';
  return s;
}

/// Grid engine shared by lasso, elastic net and SplitReg: `groups` models fit
/// jointly by block coordinate descent over the (alpha, lambda_d, lambda
/// descending) grid with warm starts along each lambda path. Uniform
/// aggregation is always evaluated; when `optimize_delta` is set, nonnegative
/// pooled stacking weights are solved per grid point as well. With groups = 1
/// and lambda_d = {0} this is exactly the elastic-net path, sharing every
/// arithmetic step - the foundation of the exact SplitReg <= elastic-net
/// comparison on shared grids.
struct PenalizedGridSpec {
  std::vector<double> lambda_s;  // descending
  std::vector<double> alpha;
  std::vector<double> lambda_d;
  int groups = 1;
  bool optimize_delta = false;
  int max_sweeps = 100000;
  double tolerance = 1e-8;
};

struct PenalizedGridResult {
  double value = 0.0;
  double se = 0.0;
  double lambda_s = 0.0;
  double alpha = 0.0;
  double lambda_d = 0.0;
  Eigen::VectorXd delta;  // empty unless optimize_delta
};

inline PenalizedGridResult penalized_grid_min(const GContext& ctx,
                                              const PenalizedGridSpec& grid, int jobs) {
  const std::size_t num_train = ctx.samples.train.size();
  const int g_count = grid.groups;
  const std::size_t num_alpha = grid.alpha.size();
  const std::size_t num_ld = grid.lambda_d.size();
  const std::size_t num_ls = grid.lambda_s.size();
  const std::size_t grid_size = num_alpha * num_ld * num_ls;

  std::vector<double> e_uniform(grid_size * num_train);
  std::vector<double> m_stats, v_stats;
  if (grid.optimize_delta) {
    m_stats.resize(grid_size * num_train * g_count * g_count);
    v_stats.resize(grid_size * num_train * g_count);
  }

  parallel_for(num_train, jobs, [&](std::size_t i) {
    const Dataset& ds = ctx.samples.train[i];
    std::vector<Eigen::VectorXd> betas(g_count);
    std::vector<Eigen::VectorXd> sx_betas(g_count);
    for (std::size_t ai = 0; ai < num_alpha; ++ai) {
      for (std::size_t li = 0; li < num_ld; ++li) {
        for (int g = 0; g < g_count; ++g) betas[g] = Eigen::VectorXd::Zero(ds.d());
        for (std::size_t si = 0; si < num_ls; ++si) {
          block_cd(ds.x, ds.y, grid.lambda_s[si], grid.alpha[ai], grid.lambda_d[li], betas,
                   grid.max_sweeps, grid.tolerance);
          const std::size_t gp = (ai * num_ld + li) * num_ls + si;
          Eigen::VectorXd pooled = Eigen::VectorXd::Zero(ds.d());
          for (int g = 0; g < g_count; ++g) pooled += betas[g];
          pooled /= static_cast<double>(g_count);
          e_uniform[gp * num_train + i] = ctx.eval(pooled);
          if (grid.optimize_delta) {
            for (int g = 0; g < g_count; ++g) sx_betas[g] = ctx.sx * betas[g];
            double* m_slot = m_stats.data() + (gp * num_train + i) * g_count * g_count;
            double* v_slot = v_stats.data() + (gp * num_train + i) * g_count;
            for (int g = 0; g < g_count; ++g) {
              v_slot[g] = ctx.u.dot(betas[g]);
              for (int h = 0; h < g_count; ++h) m_slot[g * g_count + h] = betas[g].dot(sx_betas[h]);
            }
          }
        }
      }
    }
  });

  PenalizedGridResult best;
  bool first = true;
  std::vector<double> e(num_train);
  for (std::size_t ai = 0; ai < num_alpha; ++ai) {
    for (std::size_t li = 0; li < num_ld; ++li) {
      for (std::size_t si = 0; si < num_ls; ++si) {
        const std::size_t gp = (ai * num_ld + li) * num_ls + si;
        PenalizedGridResult candidate;
        candidate.lambda_s = grid.lambda_s[si];
        candidate.alpha = grid.alpha[ai];
        candidate.lambda_d = grid.lambda_d[li];
        if (!grid.optimize_delta) {
          std::copy_n(e_uniform.data() + gp * num_train, num_train, e.begin());
          ValueSe vs = summarize(e);
          candidate.value = vs.value;
          candidate.se = vs.se;
        } else {
          Eigen::MatrixXd q_mat = Eigen::MatrixXd::Zero(g_count, g_count);
          Eigen::VectorXd q_vec = Eigen::VectorXd::Zero(g_count);
          for (std::size_t i = 0; i < num_train; ++i) {
            const double* m_slot = m_stats.data() + (gp * num_train + i) * g_count * g_count;
            const double* v_slot = v_stats.data() + (gp * num_train + i) * g_count;
            for (int g = 0; g < g_count; ++g) {
              q_vec[g] += v_slot[g];
              for (int h = 0; h < g_count; ++h) q_mat(g, h) += m_slot[g * g_count + h];
            }
          }
          q_mat /= static_cast<double>(num_train);
          q_vec /= static_cast<double>(num_train);
          Eigen::VectorXd delta = nnls_normal(q_mat, q_vec);
          for (std::size_t i = 0; i < num_train; ++i) {
            const double* m_slot = m_stats.data() + (gp * num_train + i) * g_count * g_count;
            const double* v_slot = v_stats.data() + (gp * num_train + i) * g_count;
            double quad = 0.0, lin = 0.0;
            for (int g = 0; g < g_count; ++g) {
              lin += v_slot[g] * delta[g];
              for (int h = 0; h < g_count; ++h)
                quad += delta[g] * m_slot[g * g_count + h] * delta[h];
            }
            e[i] = quad - 2.0 * lin + ctx.c;
          }
          ValueSe vs = summarize(e);
          candidate.value = vs.value;
          candidate.se = vs.se;
          candidate.delta = delta;
        }
        if (first || candidate.value < best.value) {
          best = candidate;
          first = false;
        }
      }
    }
  }
  return best;
}

}  // namespace detail

/// Minimum attainable prediction error of one method on the shared sample,
/// minimizing over the method's tuning exactly (weights) or over the grid
/// (penalty parameters). All methods evaluate predictions through the same
/// quadratic test-moment path, so the containment orderings
/// split <= garrote <= ls and splitreg <= elastic_net hold exactly.
inline MspeRecord min_g(Method method, const Scenario& sc, const McSamples& samples,
                        const SweepOptions& opt) {
  if (samples_checksum(samples) != samples.checksum)
    throw Error("min_g: sample checksum mismatch - the shared-sample discipline was violated");
  if (static_cast<int>(samples.train.size()) != sc.num_train ||
      samples.num_test() != sc.num_test)
    throw ParameterError("min_g: samples do not match the scenario's replication counts");
  opt.grid.validate();

  detail::GContext ctx(samples);
  MspeRecord rec;
  rec.method = std::string(method_name(method));
  rec.beta2 = sc.beta2;
  rec.snr = sc.snr;
  rec.r = sc.r;
  rec.rho = sc.rho;

  auto finish = [&](double value, double se, std::string argmin) {
    rec.mspe = value;
    rec.mspe_minus_sigma2 = value - samples.sigma2;
    rec.se = se;
    rec.argmin_tuning = std::move(argmin);
    return rec;
  };

  switch (method) {
    case Method::ls: {
      std::vector<double> e = detail::eval_all(ctx, detail::ls_coefficients(samples, opt.jobs));
      detail::ValueSe vs = detail::summarize(e);
      return finish(vs.value, vs.se, "-");
    }
    case Method::ridge: {
      const std::size_t num_train = samples.train.size();
      const std::size_t num_lambda = opt.grid.lambda.size();
      std::vector<double> e_all(num_lambda * num_train);
      parallel_for(num_train, opt.jobs, [&](std::size_t i) {
        const Dataset& ds = samples.train[i];
        Eigen::MatrixXd a = ds.x.transpose() * ds.x;
        Eigen::VectorXd xty = ds.x.transpose() * ds.y;
        Eigen::MatrixXd shifted = a;
        for (std::size_t li = 0; li < num_lambda; ++li) {
          shifted = a;
          shifted.diagonal().array() += opt.grid.lambda[li];
          Eigen::VectorXd coef = shifted.ldlt().solve(xty);
          e_all[li * num_train + i] = ctx.eval(coef);
        }
      });
      detail::ValueSe best;
      double best_lambda = 0.0;
      bool first = true;
      std::vector<double> e(num_train);
      for (std::size_t li = 0; li < num_lambda; ++li) {
        std::copy_n(e_all.data() + li * num_train, num_train, e.begin());
        detail::ValueSe vs = detail::summarize(e);
        if (first || vs.value < best.value) {
          best = vs;
          best_lambda = opt.grid.lambda[li];
          first = false;
        }
      }
      return finish(best.value, best.se, "lambda=" + format_double(best_lambda));
    }
    case Method::garrote: {
      detail::WeightedMinResult wm =
          detail::weighted_exact_min(ctx, detail::ls_coefficients(samples, opt.jobs));
      return finish(wm.value, wm.se, "omega=" + detail::format_vector(wm.w));
    }
    case Method::split: {
      std::vector<Partition> partitions =
          adaptive_split_set(sc.d, std::min(3, sc.d), opt.partition_cap);
      std::vector<Eigen::VectorXd> ls_coefs = detail::ls_coefficients(samples, opt.jobs);
      const std::size_t num_train = samples.train.size();
      detail::WeightedMinResult best;
      const Partition* best_partition = nullptr;
      std::vector<Eigen::VectorXd> coefs(num_train);
      for (const Partition& partition : partitions) {
        if (partition.num_groups() == 1) {
          // The single-group split *is* the least-squares fit; reusing the
          // vectors keeps this branch bit-identical to the garrote search.
          coefs = ls_coefs;
        } else {
          parallel_for(num_train, opt.jobs, [&](std::size_t i) {
            coefs[i] = fit_split(samples.train[i], partition).coef;
          });
        }
        detail::WeightedMinResult wm = detail::weighted_exact_min(ctx, coefs);
        if (best_partition == nullptr || wm.value < best.value) {
          best = wm;
          best_partition = &partition;
        }
      }
      return finish(best.value, best.se,
                    "partition=" + best_partition->to_string() +
                        ";w=" + detail::format_vector(best.w));
    }
    case Method::lasso:
    case Method::elastic_net:
    case Method::splitreg:
    case Method::splitreg_delta: {
      detail::PenalizedGridSpec grid;
      grid.lambda_s = opt.grid.lambda;
      grid.max_sweeps = opt.cd_max_sweeps;
      grid.tolerance = opt.cd_tolerance;
      if (method == Method::lasso) {
        grid.alpha = {1.0};
        grid.lambda_d = {0.0};
        grid.groups = 1;
      } else if (method == Method::elastic_net) {
        grid.alpha = opt.grid.alpha;
        grid.lambda_d = {0.0};
        grid.groups = 1;
      } else {
        if (opt.splitreg_groups < 1)
          throw ParameterError("min_g: splitreg_groups must be >= 1");
        grid.alpha = opt.grid.alpha;
        grid.lambda_d = opt.grid.lambda_d;
        grid.groups = opt.splitreg_groups;
        grid.optimize_delta = method == Method::splitreg_delta;
      }
      if (opt.cd_max_sweeps < 1 || !(opt.cd_tolerance > 0.0))
        throw ParameterError("min_g: invalid coordinate-descent controls");
      detail::PenalizedGridResult res = detail::penalized_grid_min(ctx, grid, opt.jobs);
      std::string argmin;
      if (method == Method::lasso) {
        argmin = "lambda=" + format_double(res.lambda_s);
      } else if (method == Method::elastic_net) {
        argmin = "lambda=" + format_double(res.lambda_s) + ";alpha=" + format_double(res.alpha);
      } else {
        argmin = "lambda_s=" + format_double(res.lambda_s) + ";alpha=" + format_double(res.alpha) +
                 ";lambda_d=" + format_double(res.lambda_d);
        if (method == Method::splitreg_delta)
          argmin += ";delta=" + detail::format_vector(res.delta);
      }
      return finish(res.value, res.se, std::move(argmin));
    }
  }
  throw ParameterError("min_g: unknown method");
}

/// Closed-form counterpart of min_g for the two-predictor case. Records carry
/// the same g scale as the Monte Carlo path (sigma2 added back in `mspe`) and
/// zero standard error.
inline MspeRecord minimize_closed_record(Method method, const Scenario& sc) {
  validate_scenario(sc);
  if (sc.d != 2) throw ParameterError("minimize_closed_record: closed forms require d = 2");
  if (!has_closed_form(method))
    throw ParameterError("minimize_closed_record: no closed form for method '" +
                         std::string(method_name(method)) + "'");
  Eigen::Vector2d beta = scenario_beta(sc);
  double sigma2 = scenario_sigma2(sc);
  MspeRecord rec;
  rec.method = std::string(method_name(method));
  rec.beta2 = sc.beta2;
  rec.snr = sc.snr;
  rec.r = sc.r;
  rec.rho = sc.rho;
  rec.se = 0.0;
  double excess = 0.0;
  switch (method) {
    case Method::ls:
      excess = mspe_ls_closed(sigma2, sc.n, sc.r, sc.rho);
      rec.argmin_tuning = "-";
      break;
    case Method::ridge: {
      RidgeClosedMin m = minimize_ridge_closed(beta, sigma2, sc.n, sc.r, sc.rho);
      excess = m.value;
      rec.argmin_tuning = "lambda=" + format_double(m.lambda);
      break;
    }
    case Method::garrote: {
      WeightsClosedMin m = minimize_garrote_closed(beta, sigma2, sc.n, sc.r, sc.rho);
      excess = m.value;
      rec.argmin_tuning = "omega=" + detail::format_vector(m.w);
      break;
    }
    case Method::split: {
      AdaptiveSplitClosedMin m = minimize_adaptive_split_closed(beta, sigma2, sc.n, sc.r, sc.rho);
      excess = m.value;
      rec.argmin_tuning = std::string("partition=") + (m.two_groups ? "{1|2}" : "{1,2}") +
                          ";w=" + detail::format_vector(m.w);
      break;
    }
    default:
      throw ParameterError("minimize_closed_record: unreachable");
  }
  rec.mspe = excess + sigma2;
  rec.mspe_minus_sigma2 = excess;
  return rec;
}

/// Sweeps beta2 over a grid for a list of methods: one MspeRecord per
/// (beta2 point, method), methods in the order given. When d = 2 and closed
/// forms are enabled, methods that have one use it (and need no samples);
/// everything else shares one Monte Carlo sample per beta2 point.
inline std::vector<MspeRecord> sweep_curve(const Scenario& base,
                                           const std::vector<double>& beta2_grid,
                                           const std::vector<Method>& methods,
                                           const SweepOptions& opt) {
  if (beta2_grid.empty()) throw ParameterError("sweep_curve: empty beta2 grid");
  if (methods.empty()) throw ParameterError("sweep_curve: empty method list");
  opt.grid.validate();
  std::vector<MspeRecord> out;
  out.reserve(beta2_grid.size() * methods.size());
  for (double beta2 : beta2_grid) {
    Scenario sc = base;
    sc.beta2 = beta2;
    validate_scenario(sc);
    auto closed_covers = [&](Method m) {
      return sc.d == 2 && opt.closed_form_d2 && has_closed_form(m);
    };
    bool need_samples = false;
    for (Method m : methods)
      if (!closed_covers(m)) need_samples = true;
    std::optional<McSamples> samples;
    if (need_samples) samples = make_samples(sc, opt.jobs);
    for (Method m : methods)
      out.push_back(closed_covers(m) ? minimize_closed_record(m, sc)
                                     : min_g(m, sc, *samples, opt));
  }
  return out;
}

}  // namespace splitreg
