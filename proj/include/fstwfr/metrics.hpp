#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fstwfr/metadata.hpp"

namespace fstwfr {

struct ScoredClip {
  std::string clip_id;
  double score = 0.0;  // higher = more anomalous
  Condition label = Condition::kNormal;
};

enum class ObjectiveMode { kAuc, kPauc, kArithmetic, kHarmonic };

std::string_view ToString(ObjectiveMode mode);
ObjectiveMode ParseObjectiveMode(std::string_view name);

// Mann-Whitney statistic: share of (anomaly, normal) pairs where the anomaly
// scores strictly higher, ties counting one half.
double Auc(std::span<const ScoredClip> scored);

// AUC of all anomalies against the floor(p * n_normal) highest-scoring
// normals (ties broken by clip_id).
double Pauc(std::span<const ScoredClip> scored, double p);

double CombineMetrics(double auc, double pauc, ObjectiveMode mode);
double Objective(std::span<const ScoredClip> scored, ObjectiveMode mode, double p);

struct EvalReport {
  double auc = 0.0;
  double pauc = 0.0;
  double p = 0.1;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  double objective = 0.0;
};

EvalReport Evaluate(std::span<const ScoredClip> scored, ObjectiveMode mode, double p);

// Harmonic mean; zero if any value is zero.
double HarmonicMean(std::span<const double> values);

// ROC operating points (fpr, tpr) from (0, 0) to (1, 1), one per distinct
// score threshold.
std::vector<std::pair<double, double>> RocPoints(std::span<const ScoredClip> scored);

// Shortest decimal that round-trips the double exactly.
std::string FormatDouble(double v);

// CSV with header clip_id,score,label.
void WriteScoredCsv(const std::filesystem::path& path, std::span<const ScoredClip> scored);
std::vector<ScoredClip> ReadScoredCsv(const std::filesystem::path& path);

}  // namespace fstwfr
