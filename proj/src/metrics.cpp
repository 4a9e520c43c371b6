#include "fstwfr/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>

#include "fstwfr/csv.hpp"
#include "fstwfr/error.hpp"

namespace fstwfr {
namespace {

struct ClassCounts {
  std::size_t pos = 0;
  std::size_t neg = 0;
};

ClassCounts CountAndCheck(std::span<const ScoredClip> scored) {
  ClassCounts c;
  for (const auto& s : scored) {
    if (!std::isfinite(s.score)) {
      Fail(ErrorKind::kInvalidArgument, "non-finite score for clip " + s.clip_id);
    }
    (s.label == Condition::kAnomaly ? c.pos : c.neg) += 1;
  }
  if (c.pos == 0 || c.neg == 0) {
    Fail(ErrorKind::kInvalidArgument,
         "AUC needs at least one normal and one anomaly clip (got " + std::to_string(c.neg) +
             " normal, " + std::to_string(c.pos) + " anomaly)");
  }
  return c;
}

}  // namespace

std::string_view ToString(ObjectiveMode mode) {
  switch (mode) {
    case ObjectiveMode::kAuc: return "auc";
    case ObjectiveMode::kPauc: return "pauc";
    case ObjectiveMode::kArithmetic: return "arithmetic";
    case ObjectiveMode::kHarmonic: return "harmonic";
  }
  return "harmonic";
}

ObjectiveMode ParseObjectiveMode(std::string_view name) {
  if (name == "auc") return ObjectiveMode::kAuc;
  if (name == "pauc") return ObjectiveMode::kPauc;
  if (name == "arithmetic") return ObjectiveMode::kArithmetic;
  if (name == "harmonic") return ObjectiveMode::kHarmonic;
  Fail(ErrorKind::kParse, "unknown objective mode \"" + std::string(name) +
                              "\" (expected auc, pauc, arithmetic or harmonic)");
}

double Auc(std::span<const ScoredClip> scored) {
  const auto counts = CountAndCheck(scored);
  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scored[a].score < scored[b].score; });

  // Counted in half-pairs so the statistic is an exact integer ratio.
  std::uint64_t half_pairs = 0;
  std::uint64_t neg_below = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::uint64_t pos_here = 0;
    std::uint64_t neg_here = 0;
    while (j < order.size() && scored[order[j]].score == scored[order[i]].score) {
      (scored[order[j]].label == Condition::kAnomaly ? pos_here : neg_here) += 1;
      ++j;
    }
    half_pairs += pos_here * (2 * neg_below + neg_here);
    neg_below += neg_here;
    i = j;
  }
  return static_cast<double>(half_pairs) /
         (2.0 * static_cast<double>(counts.pos) * static_cast<double>(counts.neg));
}

double Pauc(std::span<const ScoredClip> scored, double p) {
  Require(p > 0.0 && p <= 1.0, "pAUC requires 0 < p <= 1");
  const auto counts = CountAndCheck(scored);
  const auto keep = static_cast<std::size_t>(std::floor(p * static_cast<double>(counts.neg) + 1e-9));
  if (keep < 1) {
    Fail(ErrorKind::kInvalidArgument, "pAUC with p = " + FormatDouble(p) + " and " +
                                          std::to_string(counts.neg) +
                                          " normal clips keeps no normals");
  }
  std::vector<ScoredClip> negatives;
  std::vector<ScoredClip> subset;
  for (const auto& s : scored) {
    (s.label == Condition::kAnomaly ? subset : negatives).push_back(s);
  }
  std::sort(negatives.begin(), negatives.end(), [](const ScoredClip& a, const ScoredClip& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.clip_id < b.clip_id;
  });
  subset.insert(subset.end(), negatives.begin(),
                negatives.begin() + static_cast<std::ptrdiff_t>(keep));
  return Auc(subset);
}

double CombineMetrics(double auc, double pauc, ObjectiveMode mode) {
  switch (mode) {
    case ObjectiveMode::kAuc: return auc;
    case ObjectiveMode::kPauc: return pauc;
    case ObjectiveMode::kArithmetic: return 0.5 * (auc + pauc);
    case ObjectiveMode::kHarmonic:
      return auc + pauc == 0.0 ? 0.0 : 2.0 * auc * pauc / (auc + pauc);
  }
  return 0.0;
}

double Objective(std::span<const ScoredClip> scored, ObjectiveMode mode, double p) {
  return Evaluate(scored, mode, p).objective;
}

EvalReport Evaluate(std::span<const ScoredClip> scored, ObjectiveMode mode, double p) {
  const auto counts = CountAndCheck(scored);
  EvalReport r;
  r.auc = Auc(scored);
  r.pauc = Pauc(scored, p);
  r.p = p;
  r.n_pos = counts.pos;
  r.n_neg = counts.neg;
  r.objective = CombineMetrics(r.auc, r.pauc, mode);
  return r;
}

double HarmonicMean(std::span<const double> values) {
  Require(!values.empty(), "harmonic mean of an empty list");
  double acc = 0.0;
  for (double v : values) {
    Require(v >= 0.0, "harmonic mean needs nonnegative values");
    if (v == 0.0) return 0.0;
    acc += 1.0 / v;
  }
  return static_cast<double>(values.size()) / acc;
}

std::vector<std::pair<double, double>> RocPoints(std::span<const ScoredClip> scored) {
  const auto counts = CountAndCheck(scored);
  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scored[a].score > scored[b].score; });
  std::vector<std::pair<double, double>> points{{0.0, 0.0}};
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scored[order[j]].score == scored[order[i]].score) {
      (scored[order[j]].label == Condition::kAnomaly ? tp : fp) += 1;
      ++j;
    }
    points.emplace_back(static_cast<double>(fp) / static_cast<double>(counts.neg),
                        static_cast<double>(tp) / static_cast<double>(counts.pos));
    i = j;
  }
  return points;
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void WriteScoredCsv(const std::filesystem::path& path, std::span<const ScoredClip> scored) {
  CsvWriter out(path, {"clip_id", "score", "label"});
  for (const auto& s : scored) {
    out.Row({s.clip_id, FormatDouble(s.score), std::string(ToString(s.label))});
  }
}

std::vector<ScoredClip> ReadScoredCsv(const std::filesystem::path& path) {
  const auto table = ReadCsv(path);
  const auto id_col = table.Column("clip_id");
  const auto score_col = table.Column("score");
  const auto label_col = table.Column("label");
  std::vector<ScoredClip> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    out.push_back({row[id_col], ParseDouble(row[score_col], path.string()),
                   ParseCondition(row[label_col])});
  }
  return out;
}

}  // namespace fstwfr
