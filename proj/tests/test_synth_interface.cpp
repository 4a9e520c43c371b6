#include <filesystem>

#include "doctest.h"
#include "fstwfr/error.hpp"
#include "fstwfr/synth_interface.hpp"

using namespace fstwfr;
namespace fs = std::filesystem;

namespace {

fs::path FreshDir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("fstwfr_synth_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<ClipMetadata> Labels(const std::string& machine, std::vector<std::string> names) {
  std::vector<ClipMetadata> out;
  for (const auto& n : names) out.push_back(ParseLabel(n, machine));
  return out;
}

StubOptions ShortStub() {
  StubOptions o;
  o.duration_s = 0.25;
  o.seed = 4;
  return o;
}

}  // namespace

TEST_CASE("one distinct caption yields a normal and an anomaly entry") {
  const auto meta = Labels("grinder", {"section_00_source_train_normal_0000_grindstone_2_plate_2.wav",
                                       "section_00_source_train_normal_0001_grindstone_2_plate_2.wav"});
  const auto m = BuildManifest(meta, TemplateSet::Defaults(), 5);
  REQUIRE(m.entries.size() == 2);
  CHECK(m.entries[0].condition == Condition::kNormal);
  CHECK(m.entries[1].condition == Condition::kAnomaly);
  CHECK(m.entries[0].requested_count == 5);
  CHECK(m.entries[1].requested_count == 5);
  CHECK(m.entries[0].caption ==
        "This is the normal sound of a grinding machine with grindstones 2 and metal plates 2.");
  CHECK(m.entries[1].caption ==
        "This is the anomaly sound of a grinding machine with grindstones 2 and metal plates 2.");
  CHECK(m.Requested(Condition::kNormal) == 5);
  CHECK(m.Requested(Condition::kAnomaly) == 5);
}

TEST_CASE("captions are de-duplicated by exact text") {
  const auto meta = Labels("ToyCar", {"section_00_source_train_normal_0000_car_A1_spd_28V_mic_1.wav",
                                      "section_00_source_train_normal_0001_car_A1_spd_28V_mic_1.wav",
                                      "section_00_source_train_normal_0002_car_A2_spd_28V_mic_1.wav"});
  const auto m = BuildManifest(meta, TemplateSet::Defaults(), 3);
  CHECK(m.entries.size() == 4);
  CHECK(m.Requested(Condition::kNormal) == m.Requested(Condition::kAnomaly));
}

TEST_CASE("manifest preconditions") {
  const auto templates = TemplateSet::Defaults();
  const auto with_anomaly =
      Labels("ToyCar", {"section_00_source_train_normal_0000_car_A1_spd_28V_mic_1.wav",
                        "section_00_source_test_anomaly_0001_car_A1_spd_28V_mic_1.wav"});
  CHECK_THROWS_AS(BuildManifest(with_anomaly, templates, 2), Error);
  auto mixed = Labels("ToyCar", {"section_00_source_train_normal_0000_car_A1_spd_28V_mic_1.wav"});
  auto other = Labels("grinder", {"section_00_source_train_normal_0000_grindstone_1_plate_1.wav"});
  mixed.push_back(other.front());
  CHECK_THROWS_AS(BuildManifest(mixed, templates, 2), Error);
  CHECK_THROWS_AS(BuildManifest(std::vector<ClipMetadata>{}, templates, 2), Error);
  CaptionManifest dup;
  dup.entries = {{"x", "fan", Condition::kNormal, 1, "a normal"}, {"x", "fan", Condition::kAnomaly, 1, "an anomaly"}};
  CHECK_THROWS_AS(dup.Validate(), Error);
}

TEST_CASE("manifest text round trip") {
  const auto meta = Labels("ToyCar", {"section_00_source_train_normal_0000_car_A1_spd_28V_mic_1.wav",
                                      "section_00_source_train_normal_0002_car_A2_spd_28V_mic_1.wav"});
  const auto m = BuildManifest(meta, TemplateSet::Defaults(), 7);
  const auto text = SerializeManifest(m);
  CHECK(text.rfind("output_stem\tmachine_type\tcondition\trequested_count\tcaption\n", 0) == 0);
  CHECK(ParseManifest(text) == m);
  const auto path = FreshDir("manifest") / "manifest.tsv";
  WriteManifest(path, m);
  CHECK(ReadManifest(path) == m);
  CHECK_THROWS_AS(ParseManifest("output_stem\tmachine_type\tcondition\trequested_count\tcaption\nx\ty\n"), Error);
  CHECK_THROWS_AS(
      ParseManifest("output_stem\tmachine_type\tcondition\trequested_count\tcaption\nx\tfan\tweird\t1\tc\n"),
      Error);
}

TEST_CASE("stub output ingests with exactly the requested counts") {
  const auto meta = Labels("ToyCar", {"section_00_source_train_normal_0000_car_A1_spd_28V_mic_1.wav",
                                      "section_00_source_train_normal_0002_car_A2_spd_28V_mic_1.wav"});
  const auto m = BuildManifest(meta, TemplateSet::Defaults(), 3);
  const auto dir = FreshDir("complete");
  CHECK(GenerateStub(m, dir, ShortStub()) == 12);
  const auto corpus = IngestSynthetic(dir, m, IngestOptions{}, "manifest.tsv");
  CHECK(corpus.machine_type == "ToyCar");
  CHECK(corpus.manifest_ref == "manifest.tsv");
  CHECK(corpus.normals.size() == m.Requested(Condition::kNormal));
  CHECK(corpus.anomalies.size() == m.Requested(Condition::kAnomaly));
  CHECK(corpus.missing.empty());
  CHECK(corpus.warnings.empty());

  // The stub is deterministic.
  const auto dir2 = FreshDir("complete2");
  GenerateStub(m, dir2, ShortStub());
  const auto again = IngestSynthetic(dir2, m, IngestOptions{});
  for (std::size_t i = 0; i < corpus.normals.size(); ++i) {
    CHECK(again.normals[i].samples == corpus.normals[i].samples);
  }
}

TEST_CASE("missing and extra files") {
  const auto meta = Labels("grinder", {"section_00_source_train_normal_0000_grindstone_2_plate_2.wav"});
  const auto m = BuildManifest(meta, TemplateSet::Defaults(), 4);
  const auto dir = FreshDir("missing");
  GenerateStub(m, dir, ShortStub());
  const std::string victim = m.entries[1].output_stem + "_2.wav";
  fs::remove(dir / victim);
  try {
    IngestSynthetic(dir, m, IngestOptions{});
    FAIL("expected missing-file error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNotFound);
    CHECK(std::string(e.what()).find(victim) != std::string::npos);
  }
  IngestOptions lenient;
  lenient.missing_tolerance = 0.2;
  const auto partial = IngestSynthetic(dir, m, lenient);
  CHECK(partial.missing == std::vector<std::string>{victim});
  CHECK(partial.anomalies.size() == 3);

  const auto full_dir = FreshDir("extra");
  GenerateStub(m, full_dir, ShortStub());
  const auto before = IngestSynthetic(full_dir, m, IngestOptions{});
  WriteWav(full_dir / "stray.wav", std::vector<double>{0.1, 0.2, 0.3}, 16000);
  const auto after = IngestSynthetic(full_dir, m, IngestOptions{});
  CHECK(after.normals.size() == before.normals.size());
  CHECK(after.anomalies.size() == before.anomalies.size());
  REQUIRE(after.warnings.size() == 1);
  CHECK(after.warnings[0].find("stray.wav") != std::string::npos);

  CHECK_THROWS_AS(IngestSynthetic(full_dir / "nope", m, IngestOptions{}), Error);
}
