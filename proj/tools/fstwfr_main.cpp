// Command-line front end: captions | generate-stub | tune | fit | score | eval
// plus toy-dataset for offline experiments.

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fstwfr/error.hpp"
#include "fstwfr/pipeline.hpp"
#include "json.hpp"

namespace {

using fstwfr::RunConfig;

RunConfig LoadConfigOrDefault(const std::string& path) {
  return path.empty() ? RunConfig{} : fstwfr::LoadRunConfig(path);
}

// "machine=path" pairs for eval.
std::pair<std::string, std::string> SplitPair(const std::string& arg, const char* flag) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size()) {
    fstwfr::Fail(fstwfr::ErrorKind::kInvalidArgument,
                 std::string(flag) + " expects MACHINE=PATH, got \"" + arg + "\"");
  }
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

void PrintError(const std::string& kind, const std::string& message) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"First-shot anomalous sound detection with rank-pooled log-mel features and GMMs"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON run configuration (defaults when omitted)");

  std::string dataset;
  std::string machine;
  std::string out;
  std::string manifest;
  std::string synth_dir;
  std::string model_dir;
  std::string model_path;
  std::string wav_dir;
  std::optional<double> r;
  double duration = 2.0;
  double p = 0.1;
  std::string mode = "harmonic";
  std::vector<std::string> score_args;
  std::vector<std::string> label_args;
  std::string roc_dir;
  fstwfr::ToyDatasetOptions toy;

  auto* captions = app.add_subcommand("captions", "Export the caption manifest for a machine type");
  captions->add_option("--dataset", dataset, "Dataset root (<root>/<machine>/train/*.wav)")->required();
  captions->add_option("--machine", machine, "Machine type directory name")->required();
  captions->add_option("--out", out, "Manifest output path")->required();

  auto* stub = app.add_subcommand("generate-stub", "Write deterministic stand-in audio for a manifest");
  stub->add_option("--manifest", manifest, "Caption manifest")->required();
  stub->add_option("--out", out, "Output directory")->required();
  stub->add_option("--duration", duration, "Clip length in seconds")->capture_default_str();

  auto* tune = app.add_subcommand("tune", "Select the pooling exponent r on synthetic audio");
  tune->add_option("--dataset", dataset)->required();
  tune->add_option("--machine", machine)->required();
  tune->add_option("--synth-dir", synth_dir, "Directory of generated WAVs")->required();
  tune->add_option("--manifest", manifest, "Manifest the audio was generated from "
                                           "(default: <synth-dir>/manifest.tsv)");
  tune->add_option("--model-dir", model_dir, "Model directory")->required();

  auto* fit = app.add_subcommand("fit", "Fit the GMM on real normal training clips");
  fit->add_option("--dataset", dataset)->required();
  fit->add_option("--machine", machine)->required();
  fit->add_option("--model-dir", model_dir)->required();
  fit->add_option("--r", r, "Pooling exponent (default: value chosen by tune)");

  auto* score = app.add_subcommand("score", "Score every WAV in a directory");
  score->add_option("--model", model_path, "model.json written by fit")->required();
  score->add_option("--wav-dir", wav_dir)->required();
  score->add_option("--out", out, "Score CSV (clip_id,score)")->required();

  auto* eval = app.add_subcommand("eval", "AUC / pAUC report from score and label files");
  eval->add_option("--scores", score_args, "MACHINE=scores.csv (repeatable)")->required();
  eval->add_option("--labels", label_args, "MACHINE=labels.csv (repeatable)")->required();
  eval->add_option("--p", p, "pAUC false-positive-rate cap")->capture_default_str();
  eval->add_option("--mode", mode, "Objective: auc, pauc, arithmetic or harmonic")->capture_default_str();
  eval->add_option("--out", out, "Report CSV")->required();
  eval->add_option("--roc-dir", roc_dir, "Write raw ROC points per machine here");

  auto* toyds = app.add_subcommand("toy-dataset", "Generate the bundled toy dataset");
  toyds->add_option("--out", out, "Dataset root to create")->required();
  toyds->add_option("--machines", toy.machines, "Machine types")->capture_default_str();
  toyds->add_option("--n-train", toy.n_train)->capture_default_str();
  toyds->add_option("--n-test-normal", toy.n_test_normal)->capture_default_str();
  toyds->add_option("--n-test-anomaly", toy.n_test_anomaly)->capture_default_str();
  toyds->add_option("--duration", toy.duration_s)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    PrintError("usage", e.what());
    return e.get_exit_code() != 0 ? e.get_exit_code() : 2;
  }

  try {
    const RunConfig cfg = LoadConfigOrDefault(config_path);
    std::ostream* log = &std::cerr;
    if (*captions) {
      fstwfr::CmdCaptions(dataset, machine, out, cfg, log);
    } else if (*stub) {
      fstwfr::CmdGenerateStub(manifest, out, cfg, duration, log);
    } else if (*tune) {
      if (manifest.empty()) manifest = (std::filesystem::path(synth_dir) / "manifest.tsv").string();
      fstwfr::CmdTune(dataset, machine, synth_dir, manifest, model_dir, cfg, log);
    } else if (*fit) {
      fstwfr::CmdFit(dataset, machine, r, model_dir, cfg, log);
    } else if (*score) {
      std::optional<RunConfig> check;
      if (!config_path.empty()) check = cfg;
      fstwfr::CmdScore(model_path, wav_dir, out, check, log);
    } else if (*eval) {
      std::vector<fstwfr::EvalInput> inputs;
      std::map<std::string, std::string> labels;
      for (const auto& a : label_args) {
        const auto [m, path] = SplitPair(a, "--labels");
        labels[m] = path;
      }
      for (const auto& a : score_args) {
        const auto [m, path] = SplitPair(a, "--scores");
        const auto it = labels.find(m);
        if (it == labels.end()) {
          fstwfr::Fail(fstwfr::ErrorKind::kInvalidArgument, "no --labels given for machine " + m);
        }
        inputs.push_back({m, path, it->second});
      }
      std::optional<std::filesystem::path> roc;
      if (!roc_dir.empty()) roc = roc_dir;
      const auto summary =
          fstwfr::CmdEval(inputs, p, fstwfr::ParseObjectiveMode(mode), out, roc, log);
      std::cout << "aggregate AUC " << fstwfr::FormatDouble(summary.aggregate.auc) << " pAUC "
                << fstwfr::FormatDouble(summary.aggregate.pauc) << '\n';
    } else if (*toyds) {
      toy.seed = cfg.seed;
      toy.sample_rate = cfg.spectrogram.sample_rate;
      fstwfr::MakeToyDataset(out, toy);
      std::cerr << "toy dataset written to " << out << '\n';
    }
  } catch (const fstwfr::Error& e) {
    PrintError(std::string(fstwfr::ToString(e.kind())), e.what());
    return 1;
  } catch (const std::exception& e) {
    PrintError("internal", e.what());
    return 1;
  }
  return 0;
}
