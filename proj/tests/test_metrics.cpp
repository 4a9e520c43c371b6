#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "fstwfr/error.hpp"
#include "fstwfr/metrics.hpp"

using namespace fstwfr;

namespace {

std::vector<ScoredClip> Make(const std::vector<double>& anomalies, const std::vector<double>& normals) {
  std::vector<ScoredClip> out;
  for (std::size_t i = 0; i < anomalies.size(); ++i) {
    out.push_back({"a" + std::to_string(i), anomalies[i], Condition::kAnomaly});
  }
  for (std::size_t i = 0; i < normals.size(); ++i) {
    out.push_back({"n" + std::to_string(i), normals[i], Condition::kNormal});
  }
  return out;
}

double BruteAuc(const std::vector<ScoredClip>& s) {
  double wins = 0;
  double pairs = 0;
  for (const auto& a : s) {
    if (a.label != Condition::kAnomaly) continue;
    for (const auto& n : s) {
      if (n.label != Condition::kNormal) continue;
      pairs += 1;
      if (a.score > n.score) wins += 1;
      else if (a.score == n.score) wins += 0.5;
    }
  }
  return wins / pairs;
}

std::vector<ScoredClip> RandomSet(std::mt19937_64& rng, bool with_ties) {
  std::uniform_int_distribution<int> count(2, 200);
  const int n = count(rng);
  std::uniform_int_distribution<int> pos(1, n - 1);
  const int n_pos = pos(rng);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> coarse(0, 9);
  std::vector<ScoredClip> s;
  for (int i = 0; i < n; ++i) {
    const bool anomaly = i < n_pos;
    const double score = with_ties ? coarse(rng) : g(rng) + (anomaly ? 0.7 : 0.0);
    s.push_back({"c" + std::to_string(i), score, anomaly ? Condition::kAnomaly : Condition::kNormal});
  }
  return s;
}

}  // namespace

TEST_CASE("auc examples") {
  CHECK(Auc(Make({0.9, 0.8}, {0.1, 0.85})) == 0.75);
  CHECK(Auc(Make({2.0, 3.0}, {0.0, 1.0})) == 1.0);
  CHECK(Auc(Make({1.0, 1.0}, {1.0, 1.0, 1.0})) == 0.5);
}

TEST_CASE("pauc examples") {
  const auto s = Make({0.9, 0.8}, {0.1, 0.85});
  CHECK(Pauc(s, 1.0) == Auc(s));
  CHECK(Pauc(s, 0.5) == 0.5);
  const auto sep = Make({5, 6, 7}, {0, 1, 2, 3, 4, 0.5, 1.5, 2.5, 3.5, 4.5});
  for (double p : {0.1, 0.3, 0.55, 1.0}) CHECK(Pauc(sep, p) == 1.0);
}

TEST_CASE("pauc restricts to the top-scoring normals") {
  // 20 normals, p = 0.1 keeps the top two (0.95 and 0.9).
  std::vector<double> normals;
  for (int i = 0; i < 20; ++i) normals.push_back(i * 0.05);
  const auto s = Make({0.92, 0.5}, normals);
  // 0.92 beats 0.9 only; 0.5 beats neither.
  CHECK(Pauc(s, 0.1) == 0.25);
  // Ties inside the cap are resolved by clip_id and do not change the value.
  const auto tied = Make({1.0}, {2.0, 2.0, 0.0, 0.0});
  CHECK(Pauc(tied, 0.5) == 0.0);
}

TEST_CASE("objective modes") {
  CHECK(CombineMetrics(0.75, 0.5, ObjectiveMode::kArithmetic) == doctest::Approx(0.625).epsilon(1e-15));
  CHECK(CombineMetrics(0.75, 0.5, ObjectiveMode::kHarmonic) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(CombineMetrics(0.75, 0.5, ObjectiveMode::kAuc) == 0.75);
  CHECK(CombineMetrics(0.75, 0.5, ObjectiveMode::kPauc) == 0.5);
  CHECK(CombineMetrics(0.0, 0.0, ObjectiveMode::kHarmonic) == 0.0);
  for (double x : {0.1, 0.5, 0.8, 1.0}) {
    for (auto mode : {ObjectiveMode::kAuc, ObjectiveMode::kPauc, ObjectiveMode::kArithmetic,
                      ObjectiveMode::kHarmonic}) {
      CHECK(CombineMetrics(x, x, mode) == doctest::Approx(x).epsilon(1e-15));
    }
  }
  for (auto mode : {ObjectiveMode::kAuc, ObjectiveMode::kPauc, ObjectiveMode::kArithmetic,
                    ObjectiveMode::kHarmonic}) {
    CHECK(ParseObjectiveMode(ToString(mode)) == mode);
  }
  CHECK_THROWS_AS(ParseObjectiveMode("geometric"), Error);
  const auto s = Make({0.9, 0.8}, {0.1, 0.85});
  CHECK(Objective(s, ObjectiveMode::kHarmonic, 0.5) == doctest::Approx(0.6).epsilon(1e-15));
  const auto report = Evaluate(s, ObjectiveMode::kArithmetic, 0.5);
  CHECK(report.auc == 0.75);
  CHECK(report.pauc == 0.5);
  CHECK(report.n_pos == 2);
  CHECK(report.n_neg == 2);
  CHECK(report.objective == doctest::Approx(0.625).epsilon(1e-15));
}

TEST_CASE("auc matches the brute-force pairwise count exactly") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = RandomSet(rng, trial % 2 == 0);
    CHECK(Auc(s) == BruteAuc(s));
    CHECK(Pauc(s, 1.0) == Auc(s));
    const std::size_t n_neg = std::count_if(s.begin(), s.end(), [](const ScoredClip& c) {
      return c.label == Condition::kNormal;
    });
    if (n_neg >= 10) {
      const double pa = Pauc(s, 0.1);
      CHECK(pa >= 0.0);
      CHECK(pa <= 1.0);
    }
  }
}

TEST_CASE("label flip and monotone transform") {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = RandomSet(rng, false);
    const double auc = Auc(s);
    auto t = s;
    for (auto& c : t) c.score = std::exp(3.0 * c.score) + 7.0;
    CHECK(Auc(t) == auc);
    const std::size_t n_neg = std::count_if(s.begin(), s.end(), [](const ScoredClip& c) {
      return c.label == Condition::kNormal;
    });
    if (n_neg >= 2) CHECK(Pauc(t, 0.5) == Pauc(s, 0.5));
    auto f = s;
    for (auto& c : f) c.label = c.label == Condition::kNormal ? Condition::kAnomaly : Condition::kNormal;
    CHECK(Auc(f) == doctest::Approx(1.0 - auc).epsilon(1e-12));
  }
}

TEST_CASE("metric errors") {
  CHECK_THROWS_AS(Auc(Make({1.0}, {})), Error);
  CHECK_THROWS_AS(Auc(Make({}, {1.0})), Error);
  CHECK_THROWS_AS(Pauc(Make({1.0}, {0.0, 0.5}), 0.4), Error);  // floor(0.8) = 0
  CHECK_THROWS_AS(Pauc(Make({1.0}, {0.0}), 0.0), Error);
  CHECK_THROWS_AS(Pauc(Make({1.0}, {0.0}), 1.5), Error);
  CHECK_THROWS_AS(Auc(Make({std::nan("")}, {0.0})), Error);
}

TEST_CASE("harmonic mean aggregate") {
  const std::vector<double> v = {0.5, 1.0};
  CHECK(HarmonicMean(v) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  const std::vector<double> z = {0.0, 0.7};
  CHECK(HarmonicMean(z) == 0.0);
}

TEST_CASE("roc points span the unit square") {
  const auto s = Make({0.9, 0.8}, {0.1, 0.85});
  const auto roc = RocPoints(s);
  REQUIRE(roc.size() == 5);
  CHECK(roc.front() == std::pair<double, double>{0.0, 0.0});
  CHECK(roc[1] == std::pair<double, double>{0.0, 0.5});
  CHECK(roc[2] == std::pair<double, double>{0.5, 0.5});
  CHECK(roc.back() == std::pair<double, double>{1.0, 1.0});
  // Trapezoid area equals the AUC.
  double area = 0;
  for (std::size_t i = 1; i < roc.size(); ++i) {
    area += (roc[i].first - roc[i - 1].first) * (roc[i].second + roc[i - 1].second) / 2;
  }
  CHECK(area == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("double formatting round-trips") {
  CHECK(FormatDouble(0.75) == "0.75");
  CHECK(FormatDouble(1.0) == "1");
  std::mt19937_64 rng(107);
  std::normal_distribution<double> g(0.0, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = g(rng);
    CHECK(std::stod(FormatDouble(v)) == v);
  }
}

TEST_CASE("scored CSV round trip") {
  const auto path = std::filesystem::temp_directory_path() / "fstwfr_scored.csv";
  const auto s = Make({0.1234567890123, 2.0}, {-3.5});
  WriteScoredCsv(path, s);
  const auto back = ReadScoredCsv(path);
  REQUIRE(back.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(back[i].clip_id == s[i].clip_id);
    CHECK(back[i].score == s[i].score);
    CHECK(back[i].label == s[i].label);
  }
}
