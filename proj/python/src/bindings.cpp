#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <vector>

#include "fstwfr/audio_io.hpp"
#include "fstwfr/error.hpp"
#include "fstwfr/gmm.hpp"
#include "fstwfr/metadata.hpp"
#include "fstwfr/metrics.hpp"
#include "fstwfr/spectrogram.hpp"
#include "fstwfr/tuner.hpp"
#include "fstwfr/twfr.hpp"

namespace py = pybind11;
using namespace fstwfr;

namespace {

using Array2 = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Array1 = py::array_t<double, py::array::c_style | py::array::forcecast>;

Spectrogram ToSpectrogram(const Array2& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D array (mel bins x frames)");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  return {Matrix(rows, cols, std::vector<double>(a.data(), a.data() + rows * cols))};
}

py::array_t<double> ToArray(const Matrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

py::array_t<double> ToArray(const std::vector<double>& v) {
  py::array_t<double> out(v.size());
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<ScoredClip> ToScored(const std::vector<double>& scores,
                                 const std::vector<bool>& is_anomaly) {
  if (scores.size() != is_anomaly.size()) throw py::value_error("scores and labels differ in length");
  std::vector<ScoredClip> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out.push_back({std::to_string(i), scores[i],
                   is_anomaly[i] ? Condition::kAnomaly : Condition::kNormal});
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "First-shot anomalous sound detection: TWFR pooling, GMM scoring, r tuning";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<AudioClip>(m, "AudioClip")
      .def(py::init([](const Array1& samples, int sample_rate, std::string source) {
             return AudioClip{std::vector<double>(samples.data(), samples.data() + samples.size()),
                              sample_rate, std::move(source)};
           }),
           py::arg("samples"), py::arg("sample_rate"), py::arg("source_path") = "")
      .def_property_readonly("samples", [](const AudioClip& c) { return ToArray(c.samples); })
      .def_readonly("sample_rate", &AudioClip::sample_rate)
      .def_readonly("source_path", &AudioClip::source_path)
      .def("__len__", [](const AudioClip& c) { return c.samples.size(); });

  py::class_<SilenceRemovalConfig>(m, "SilenceRemovalConfig")
      .def(py::init<>())
      .def_readwrite("enabled", &SilenceRemovalConfig::enabled)
      .def_readwrite("threshold_db", &SilenceRemovalConfig::threshold_db)
      .def_readwrite("frame_len", &SilenceRemovalConfig::frame_len)
      .def_readwrite("hop_len", &SilenceRemovalConfig::hop_len)
      .def_readwrite("apply_to_real", &SilenceRemovalConfig::apply_to_real);

  py::class_<SpectrogramConfig>(m, "SpectrogramConfig")
      .def(py::init<>())
      .def_readwrite("n_fft", &SpectrogramConfig::n_fft)
      .def_readwrite("hop", &SpectrogramConfig::hop)
      .def_readwrite("n_mels", &SpectrogramConfig::n_mels)
      .def_readwrite("sample_rate", &SpectrogramConfig::sample_rate)
      .def_readwrite("fmin", &SpectrogramConfig::fmin)
      .def_readwrite("fmax", &SpectrogramConfig::fmax)
      .def_readwrite("log_floor", &SpectrogramConfig::log_floor);

  m.def("decode_wav", [](const std::filesystem::path& p) { return DecodeWav(p); }, py::arg("path"));
  m.def("write_wav",
        [](const std::filesystem::path& p, const Array1& samples, int sample_rate) {
          WriteWav(p, std::span<const double>(samples.data(), samples.size()), sample_rate);
        },
        py::arg("path"), py::arg("samples"), py::arg("sample_rate"));
  m.def("remove_silence", &RemoveSilence, py::arg("clip"), py::arg("config"));
  m.def("log_mel",
        [](const AudioClip& clip, const SpectrogramConfig& cfg) { return ToArray(LogMel(clip, cfg).values); },
        py::arg("clip"), py::arg("config"));

  m.def("ranking", [](const Array2& x) { return ToArray(Ranking(ToSpectrogram(x)).values); },
        py::arg("spectrogram"));
  m.def("weights", [](double r, std::size_t n) { return ToArray(Weights(PoolingExponent(r), n)); },
        py::arg("r"), py::arg("n_frames"));
  m.def("twfr",
        [](const Array2& x, double r) {
          return ToArray(Twfr(ToSpectrogram(x), PoolingExponent(r)).values);
        },
        py::arg("spectrogram"), py::arg("r"));

  py::class_<GmmFitConfig>(m, "GmmFitConfig")
      .def(py::init<>())
      .def_readwrite("n_components", &GmmFitConfig::n_components)
      .def_readwrite("max_iters", &GmmFitConfig::max_iters)
      .def_readwrite("tol", &GmmFitConfig::tol)
      .def_readwrite("variance_floor", &GmmFitConfig::variance_floor)
      .def_readwrite("seed", &GmmFitConfig::seed);

  py::class_<GmmModel>(m, "GmmModel")
      .def("score",
           [](const GmmModel& g, const Array1& x) {
             return g.Score(std::span<const double>(x.data(), x.size()));
           },
           py::arg("x"))
      .def("parameter_count", &GmmModel::ParameterCount)
      .def_property_readonly("weights", [](const GmmModel& g) { return ToArray(g.weights); })
      .def_property_readonly("means", [](const GmmModel& g) { return ToArray(g.means); })
      .def_property_readonly("variances", [](const GmmModel& g) { return ToArray(g.variances); })
      .def_property_readonly("feature_mean", [](const GmmModel& g) { return ToArray(g.feature_mean); })
      .def_property_readonly("feature_scale", [](const GmmModel& g) { return ToArray(g.feature_scale); })
      .def("to_json", [](const GmmModel& g) { return ToJson(g).dump(); })
      .def_static("from_json",
                  [](const std::string& s) { return GmmModelFromJson(nlohmann::json::parse(s)); });

  m.def("fit_gmm",
        [](const Array2& x, const GmmFitConfig& cfg) {
          const auto fit = FitGmm(ToSpectrogram(x).values, cfg);
          return py::make_tuple(fit.model, fit.log_likelihood);
        },
        py::arg("train"), py::arg("config") = GmmFitConfig{},
        "Fit on rows of `train`; returns (model, mean log-likelihood trace).");

  py::class_<ClipMetadata>(m, "ClipMetadata")
      .def_readwrite("machine_type", &ClipMetadata::machine_type)
      .def_readonly("section", &ClipMetadata::section)
      .def_readonly("domain_split", &ClipMetadata::domain_split)
      .def_readonly("partition", &ClipMetadata::partition)
      .def_property_readonly("condition", [](const ClipMetadata& c) { return std::string(ToString(c.condition)); })
      .def_readonly("clip_index", &ClipMetadata::clip_index)
      .def_readonly("attributes", &ClipMetadata::attributes);

  py::class_<Caption>(m, "Caption")
      .def_readonly("text", &Caption::text)
      .def_property_readonly("condition", [](const Caption& c) { return std::string(ToString(c.condition)); })
      .def_readonly("machine_type", &Caption::machine_type);

  m.def("parse_label", &ParseLabel, py::arg("filename"), py::arg("machine_type") = "");
  m.def("default_template",
        [](const std::string& machine) { return TemplateSet::Defaults().Find(machine).pattern; },
        py::arg("machine_type"));
  m.def("render_caption",
        [](const ClipMetadata& meta, const std::string& machine, const std::string& pattern) {
          const CaptionTemplate tmpl =
              pattern.empty() ? TemplateSet::Defaults().Find(machine) : CaptionTemplate{machine, pattern};
          return RenderCaption(meta, tmpl);
        },
        py::arg("meta"), py::arg("machine_type"), py::arg("pattern") = "");
  m.def("to_anomaly_caption", &ToAnomalyCaption, py::arg("caption"));

  m.def("auc", [](const std::vector<double>& s, const std::vector<bool>& a) { return Auc(ToScored(s, a)); },
        py::arg("scores"), py::arg("is_anomaly"));
  m.def("pauc",
        [](const std::vector<double>& s, const std::vector<bool>& a, double p) { return Pauc(ToScored(s, a), p); },
        py::arg("scores"), py::arg("is_anomaly"), py::arg("p") = 0.1);
  m.def("objective",
        [](const std::vector<double>& s, const std::vector<bool>& a, const std::string& mode, double p) {
          return Objective(ToScored(s, a), ParseObjectiveMode(mode), p);
        },
        py::arg("scores"), py::arg("is_anomaly"), py::arg("mode") = "harmonic", py::arg("p") = 0.1);

  py::class_<TuningConfig>(m, "TuningConfig")
      .def(py::init<>())
      .def_readwrite("r_min", &TuningConfig::r_min)
      .def_readwrite("r_max", &TuningConfig::r_max)
      .def_readwrite("r_step", &TuningConfig::r_step)
      .def_readwrite("p", &TuningConfig::p)
      .def_readwrite("gmm", &TuningConfig::gmm)
      .def_property(
          "objective", [](const TuningConfig& c) { return std::string(ToString(c.objective)); },
          [](TuningConfig& c, const std::string& s) { c.objective = ParseObjectiveMode(s); });

  py::class_<TuningResult>(m, "TuningResult")
      .def_readonly("machine_type", &TuningResult::machine_type)
      .def_readonly("r_selected", &TuningResult::r_selected)
      .def_property_readonly("trace", [](const TuningResult& r) {
        py::list out;
        for (const auto& pt : r.trace) out.append(py::make_tuple(pt.r, pt.objective, pt.auc, pt.pauc));
        return out;
      });

  m.def("tune_r",
        [](const std::vector<AudioClip>& real, const std::vector<AudioClip>& synth_normal,
           const std::vector<AudioClip>& synth_anomaly, const SpectrogramConfig& spec,
           const TuningConfig& cfg) {
          py::gil_scoped_release release;
          return TuneR(real, synth_normal, synth_anomaly, spec, cfg);
        },
        py::arg("real_normals"), py::arg("synth_normals"), py::arg("synth_anomalies"),
        py::arg("spectrogram") = SpectrogramConfig{}, py::arg("config") = TuningConfig{});

#ifdef FSTWFR_VERSION
  m.attr("__version__") = FSTWFR_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
