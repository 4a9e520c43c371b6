#include "fstwfr/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "fstwfr/error.hpp"

namespace fstwfr {
namespace {

constexpr double kMinScale = 1e-12;
constexpr std::size_t kKMeansIters = 20;
const double kLog2Pi = std::log(2.0 * std::numbers::pi);

double Uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double LogSumExp(std::span<const double> xs) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : xs) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

// Per-component log(w_k) + log N(x; mu_k, diag var_k).
void ComponentLogDensities(const GmmModel& m, std::span<const double> x,
                           std::span<double> out) {
  for (std::size_t k = 0; k < m.n_components(); ++k) {
    if (m.weights[k] <= 0.0) {
      out[k] = -std::numeric_limits<double>::infinity();
      continue;
    }
    const auto mu = m.means.row(k);
    const auto var = m.variances.row(k);
    double acc = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
      const double diff = x[d] - mu[d];
      acc += kLog2Pi + std::log(var[d]) + diff * diff / var[d];
    }
    out[k] = std::log(m.weights[k]) - 0.5 * acc;
  }
}

// E-step: fills responsibilities (n x K) and returns the mean log-likelihood.
double ExpectationStep(const GmmModel& m, const Matrix& x, Matrix& resp) {
  const std::size_t k_count = m.n_components();
  std::vector<double> logp(k_count);
  double total = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    ComponentLogDensities(m, x.row(i), logp);
    const double ll = LogSumExp(logp);
    total += ll;
    for (std::size_t k = 0; k < k_count; ++k) resp(i, k) = std::exp(logp[k] - ll);
  }
  return total / static_cast<double>(x.rows());
}

void MaximizationStep(GmmModel& m, const Matrix& x, const Matrix& resp, double floor) {
  const std::size_t n = x.rows();
  const std::size_t dim = x.cols();
  const std::size_t k_count = m.n_components();
  std::vector<double> nk(k_count, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < k_count; ++k) nk[k] += resp(i, k);
  }
  for (std::size_t k = 0; k < k_count; ++k) {
    // A component that lost all support keeps its parameters at zero weight.
    if (nk[k] <= std::numeric_limits<double>::min()) {
      nk[k] = 0.0;
      continue;
    }
    auto mu = m.means.row(k);
    std::fill(mu.begin(), mu.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = resp(i, k);
      const auto xi = x.row(i);
      for (std::size_t d = 0; d < dim; ++d) mu[d] += r * xi[d];
    }
    for (double& v : mu) v /= nk[k];
    auto var = m.variances.row(k);
    std::fill(var.begin(), var.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = resp(i, k);
      const auto xi = x.row(i);
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = xi[d] - mu[d];
        var[d] += r * diff * diff;
      }
    }
    for (double& v : var) v = std::max(v / nk[k], floor);
  }
  double sum = 0.0;
  for (double v : nk) sum += v;
  for (std::size_t k = 0; k < k_count; ++k) m.weights[k] = nk[k] / sum;
}

// k-means++ seeding followed by a few Lloyd iterations; returns the hard
// assignment of every sample.
std::vector<std::size_t> KMeansInit(const Matrix& x, std::size_t k_count,
                                    std::mt19937_64& rng) {
  const std::size_t n = x.rows();
  const std::size_t dim = x.cols();
  Matrix centers(k_count, dim);

  std::size_t first = static_cast<std::size_t>(Uniform01(rng) * static_cast<double>(n));
  first = std::min(first, n - 1);
  std::copy(x.row(first).begin(), x.row(first).end(), centers.row(0).begin());
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = SquaredDistance(x.row(i), centers.row(0));

  for (std::size_t c = 1; c < k_count; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick = 0;
    if (total > 0.0) {
      double target = Uniform01(rng) * total;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        target -= d2[i];
        if (target < 0.0 && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = (first + c) % n;
    }
    std::copy(x.row(pick).begin(), x.row(pick).end(), centers.row(c).begin());
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], SquaredDistance(x.row(i), centers.row(c)));
    }
  }

  std::vector<std::size_t> assign(n, 0);
  for (std::size_t iter = 0; iter < kKMeansIters; ++iter) {
    bool changed = iter == 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = SquaredDistance(x.row(i), centers.row(0));
      for (std::size_t c = 1; c < k_count; ++c) {
        const double d = SquaredDistance(x.row(i), centers.row(c));
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) changed = true;
      assign[i] = best;
    }
    if (!changed) break;
    Matrix sums(k_count, dim);
    std::vector<std::size_t> counts(k_count, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[assign[i]];
      auto s = sums.row(assign[i]);
      const auto xi = x.row(i);
      for (std::size_t d = 0; d < dim; ++d) s[d] += xi[d];
    }
    for (std::size_t c = 0; c < k_count; ++c) {
      if (counts[c] == 0) continue;
      auto ctr = centers.row(c);
      const auto s = sums.row(c);
      for (std::size_t d = 0; d < dim; ++d) ctr[d] = s[d] / static_cast<double>(counts[c]);
    }
  }
  return assign;
}

}  // namespace

void GmmFitConfig::Validate() const {
  Require(n_components >= 1, "gmm n_components must be >= 1");
  Require(max_iters >= 1, "gmm max_iters must be >= 1");
  Require(tol > 0.0, "gmm tol must be positive");
  Require(variance_floor > 0.0, "gmm variance_floor must be positive");
}

std::vector<double> GmmModel::Standardize(std::span<const double> x) const {
  if (x.size() != dim()) {
    Fail(ErrorKind::kMismatch, "feature dimension " + std::to_string(x.size()) +
                                   " does not match model dimension " + std::to_string(dim()));
  }
  std::vector<double> out(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) out[d] = (x[d] - feature_mean[d]) / feature_scale[d];
  return out;
}

double GmmModel::ScoreStandardized(std::span<const double> x_std) const {
  if (x_std.size() != dim()) {
    Fail(ErrorKind::kMismatch, "feature dimension " + std::to_string(x_std.size()) +
                                   " does not match model dimension " + std::to_string(dim()));
  }
  std::vector<double> logp(n_components());
  ComponentLogDensities(*this, x_std, logp);
  return -LogSumExp(logp);
}

double GmmModel::Score(std::span<const double> x) const {
  return ScoreStandardized(Standardize(x));
}

std::size_t GmmModel::ParameterCount() const {
  const std::size_t k = n_components();
  const std::size_t m = dim();
  Require(k >= 1, "model has no components");
  return k * (2 * m + 1) + 2 * m;
}

void GmmModel::Validate() const {
  config.Validate();
  const std::size_t k = weights.size();
  const std::size_t m = feature_mean.size();
  Require(k >= 1 && m >= 1, "model must have at least one component and one dimension");
  Require(feature_scale.size() == m, "feature_scale size mismatch");
  Require(means.rows() == k && means.cols() == m, "means shape mismatch");
  Require(variances.rows() == k && variances.cols() == m, "variances shape mismatch");
  double sum = 0.0;
  for (double w : weights) {
    Require(w >= 0.0, "negative mixture weight");
    sum += w;
  }
  Require(std::abs(sum - 1.0) <= 1e-9, "mixture weights do not sum to one");
  for (double s : feature_scale) Require(s > 0.0, "feature_scale must be positive");
  for (double v : variances.data()) {
    Require(v >= config.variance_floor, "variance below floor");
  }
}

GmmFitResult FitGmm(const Matrix& train, const GmmFitConfig& cfg) {
  cfg.Validate();
  const std::size_t n = train.rows();
  const std::size_t dim = train.cols();
  if (n < cfg.n_components) {
    Fail(ErrorKind::kInvalidArgument, "gmm needs at least " + std::to_string(cfg.n_components) +
                                          " samples, got " + std::to_string(n));
  }
  Require(dim >= 1, "gmm training vectors are empty");

  GmmFitResult result;
  GmmModel& m = result.model;
  m.config = cfg;
  m.feature_mean.assign(dim, 0.0);
  m.feature_scale.assign(dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = train.row(i);
    for (std::size_t d = 0; d < dim; ++d) m.feature_mean[d] += xi[d];
  }
  for (double& v : m.feature_mean) v /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = train.row(i);
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = xi[d] - m.feature_mean[d];
      m.feature_scale[d] += diff * diff;
    }
  }
  std::size_t flat = 0;
  for (double& v : m.feature_scale) {
    v = std::sqrt(v / static_cast<double>(n));
    if (v < kMinScale) {
      v = kMinScale;
      ++flat;
    }
  }
  if (flat > 0) {
    result.warnings.push_back(std::to_string(flat) +
                              " feature dimension(s) have zero variance; scale floored at 1e-12");
  }

  Matrix x(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = m.Standardize(train.row(i));
    std::copy(z.begin(), z.end(), x.row(i).begin());
  }

  const std::size_t k_count = cfg.n_components;
  std::mt19937_64 rng(cfg.seed);
  const auto assign = KMeansInit(x, k_count, rng);
  Matrix resp(n, k_count);
  for (std::size_t i = 0; i < n; ++i) resp(i, assign[i]) = 1.0;
  m.weights.assign(k_count, 0.0);
  m.means = Matrix(k_count, dim);
  m.variances = Matrix(k_count, dim, 1.0);
  MaximizationStep(m, x, resp, cfg.variance_floor);

  double prev = ExpectationStep(m, x, resp);
  result.log_likelihood.push_back(prev);
  for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
    MaximizationStep(m, x, resp, cfg.variance_floor);
    const double ll = ExpectationStep(m, x, resp);
    result.log_likelihood.push_back(ll);
    ++result.iterations;
    const double improvement = (ll - prev) / std::max(std::abs(prev), 1.0);
    prev = ll;
    if (improvement < cfg.tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

GmmFitResult FitGmm(std::span<const TwfrVector> train, const GmmFitConfig& cfg) {
  Require(!train.empty(), "gmm training set is empty");
  const std::size_t dim = train.front().size();
  Matrix x(train.size(), dim);
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train[i].size() != dim) {
      Fail(ErrorKind::kMismatch, "training vector " + std::to_string(i) + " has dimension " +
                                     std::to_string(train[i].size()) + ", expected " +
                                     std::to_string(dim));
    }
    std::copy(train[i].values.begin(), train[i].values.end(), x.row(i).begin());
  }
  return FitGmm(x, cfg);
}

nlohmann::json ToJson(const GmmFitConfig& cfg) {
  return {{"n_components", cfg.n_components},
          {"max_iters", cfg.max_iters},
          {"tol", cfg.tol},
          {"variance_floor", cfg.variance_floor},
          {"seed", cfg.seed}};
}

GmmFitConfig GmmFitConfigFromJson(const nlohmann::json& j) {
  GmmFitConfig cfg;
  cfg.n_components = j.value("n_components", cfg.n_components);
  cfg.max_iters = j.value("max_iters", cfg.max_iters);
  cfg.tol = j.value("tol", cfg.tol);
  cfg.variance_floor = j.value("variance_floor", cfg.variance_floor);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.Validate();
  return cfg;
}

nlohmann::json ToJson(const GmmModel& model) {
  return {{"config", ToJson(model.config)},
          {"n_components", model.n_components()},
          {"dim", model.dim()},
          {"feature_mean", model.feature_mean},
          {"feature_scale", model.feature_scale},
          {"weights", model.weights},
          {"means", model.means.data()},
          {"variances", model.variances.data()}};
}

GmmModel GmmModelFromJson(const nlohmann::json& j) {
  try {
    GmmModel m;
    m.config = GmmFitConfigFromJson(j.at("config"));
    const auto k = j.at("n_components").get<std::size_t>();
    const auto dim = j.at("dim").get<std::size_t>();
    m.feature_mean = j.at("feature_mean").get<std::vector<double>>();
    m.feature_scale = j.at("feature_scale").get<std::vector<double>>();
    m.weights = j.at("weights").get<std::vector<double>>();
    Require(m.weights.size() == k, "weights length does not match n_components");
    Require(m.feature_mean.size() == dim, "feature_mean length does not match dim");
    m.means = Matrix(k, dim, j.at("means").get<std::vector<double>>());
    m.variances = Matrix(k, dim, j.at("variances").get<std::vector<double>>());
    m.Validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorKind::kFormat, std::string("malformed gmm model: ") + e.what());
  } catch (const Error& e) {
    Fail(ErrorKind::kFormat, std::string("invalid gmm model: ") + e.what());
  }
}

}  // namespace fstwfr
