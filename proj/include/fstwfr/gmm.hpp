#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fstwfr/matrix.hpp"
#include "fstwfr/twfr.hpp"
#include "json.hpp"

namespace fstwfr {

struct GmmFitConfig {
  std::size_t n_components = 2;
  std::size_t max_iters = 100;
  double tol = 1e-6;  // relative mean log-likelihood improvement
  double variance_floor = 1e-6;
  std::uint64_t seed = 0;

  void Validate() const;
  friend bool operator==(const GmmFitConfig&, const GmmFitConfig&) = default;
};

// Diagonal-covariance mixture over standardised features. Scores are
// negative log-likelihoods, so larger means more anomalous.
struct GmmModel {
  GmmFitConfig config;
  std::vector<double> feature_mean;   // M
  std::vector<double> feature_scale;  // M, positive
  std::vector<double> weights;        // K, sums to one
  Matrix means;                       // K x M, standardised space
  Matrix variances;                   // K x M, >= variance_floor

  std::size_t n_components() const { return weights.size(); }
  std::size_t dim() const { return feature_mean.size(); }

  std::vector<double> Standardize(std::span<const double> x) const;
  double Score(std::span<const double> x) const;
  double Score(const TwfrVector& x) const { return Score(x.values); }
  double ScoreStandardized(std::span<const double> x_std) const;

  // K * (2M + 1) + 2M: means, variances and weights plus the standardisation
  // vectors.
  std::size_t ParameterCount() const;

  void Validate() const;
};

struct GmmFitResult {
  GmmModel model;
  // Mean log-likelihood (standardised space) at the initial parameters and
  // after every EM iteration.
  std::vector<double> log_likelihood;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};

// Rows of `train` are samples.
GmmFitResult FitGmm(const Matrix& train, const GmmFitConfig& cfg);
GmmFitResult FitGmm(std::span<const TwfrVector> train, const GmmFitConfig& cfg);

nlohmann::json ToJson(const GmmFitConfig& cfg);
GmmFitConfig GmmFitConfigFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const GmmModel& model);
GmmModel GmmModelFromJson(const nlohmann::json& j);

}  // namespace fstwfr
