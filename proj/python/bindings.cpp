// SPDX-License-Identifier: Apache-2.0
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <sstream>

#include "darklight/classifier.hpp"
#include "darklight/config.hpp"
#include "darklight/error.hpp"
#include "darklight/experiment.hpp"
#include "darklight/features.hpp"
#include "darklight/geometry.hpp"
#include "darklight/indgic.hpp"
#include "darklight/media.hpp"
#include "darklight/optflow.hpp"
#include "darklight/sampler.hpp"
#include "darklight/synthetic.hpp"

namespace py = pybind11;
namespace dl = darklight;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using F64Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

dl::Frame to_frame(const U8Array& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw py::value_error("expected an HxWx3 uint8 array");
  const int h = static_cast<int>(a.shape(0));
  const int w = static_cast<int>(a.shape(1));
  std::vector<std::uint8_t> px(a.data(), a.data() + a.size());
  return dl::Frame(w, h, std::move(px));
}

U8Array from_frame(const dl::Frame& f) {
  U8Array out({f.height(), f.width(), 3});
  std::memcpy(out.mutable_data(), f.pixels().data(), f.pixels().size());
  return out;
}

dl::Clip to_clip(const U8Array& a, std::optional<std::string> label = std::nullopt) {
  if (a.ndim() != 4 || a.shape(3) != 3) throw py::value_error("expected an NxHxWx3 uint8 array");
  const auto n = static_cast<std::size_t>(a.shape(0));
  const int h = static_cast<int>(a.shape(1));
  const int w = static_cast<int>(a.shape(2));
  const std::size_t per = static_cast<std::size_t>(h) * w * 3;
  std::vector<dl::Frame> frames;
  frames.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    frames.emplace_back(w, h, std::vector<std::uint8_t>(a.data() + i * per, a.data() + (i + 1) * per));
  }
  return dl::Clip(std::move(frames), std::move(label));
}

U8Array from_clip(const dl::Clip& c) {
  U8Array out({static_cast<py::ssize_t>(c.size()), static_cast<py::ssize_t>(c.height()),
               static_cast<py::ssize_t>(c.width()), py::ssize_t{3}});
  std::uint8_t* dst = out.mutable_data();
  for (const auto& f : c.frames()) {
    std::memcpy(dst, f.pixels().data(), f.pixels().size());
    dst += f.pixels().size();
  }
  return out;
}

py::array_t<float> from_flow(const dl::FlowField& f) {
  py::array_t<float> out({f.height(), f.width(), 2});
  float* dst = out.mutable_data();
  for (const auto& v : f.vectors()) {
    *dst++ = v.u;
    *dst++ = v.v;
  }
  return out;
}

dl::FlowField to_flow(const py::array_t<float, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 3 || a.shape(2) != 2) throw py::value_error("expected an HxWx2 float32 array");
  std::vector<dl::FlowVector> v(static_cast<std::size_t>(a.shape(0) * a.shape(1)));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = {a.data()[2 * i], a.data()[2 * i + 1]};
  return dl::FlowField(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), std::move(v));
}

std::vector<dl::FeatureVector> to_features(const F64Array& x, const std::string& schema) {
  if (x.ndim() != 2) throw py::value_error("expected a 2-D feature matrix");
  const auto rows = static_cast<std::size_t>(x.shape(0));
  const auto dim = static_cast<std::size_t>(x.shape(1));
  std::vector<dl::FeatureVector> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    out[r].values.assign(x.data() + r * dim, x.data() + (r + 1) * dim);
    out[r].schema = schema;
  }
  return out;
}

py::dict plan_dict(const dl::SamplePlan& p) {
  py::dict d;
  d["seed"] = p.seed;
  d["delta"] = p.delta;
  d["stride"] = p.stride;
  d["pad_before"] = p.pad_before;
  d["pad_after"] = p.pad_after;
  d["kept_indices"] = p.kept_indices;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "darklight native core";

  py::register_exception<dl::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<dl::FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<dl::PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<dl::NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.attr("GAMMA_MIN") = dl::kGammaMin;
  m.attr("GAMMA_MAX") = dl::kGammaMax;
  m.attr("DEFAULT_TARGET_MEAN") = dl::kDefaultTargetMean;

  // Media and codecs.
  m.def("mean_luma", [](const U8Array& a) { return dl::mean_luma(to_frame(a)); });
  m.def("histogram", [](const U8Array& a) {
    const auto h = dl::histogram(to_frame(a));
    py::array_t<std::uint64_t> out({3, 256});
    for (int c = 0; c < 3; ++c) std::memcpy(out.mutable_data(c, 0), h.bins[c].data(), 256 * sizeof(std::uint64_t));
    return out;
  });
  m.def("encode_ppm", [](const U8Array& a) { return py::bytes(dl::encode_ppm(to_frame(a))); });
  m.def("decode_ppm", [](const py::bytes& b) { return from_frame(dl::decode_ppm(std::string(b))); });
  m.def("load_ppm", [](const std::filesystem::path& p) { return from_frame(dl::load_ppm(p)); });
  m.def("save_ppm", [](const U8Array& a, const std::filesystem::path& p) { dl::save_ppm(to_frame(a), p); });
  m.def(
      "encode_clip",
      [](const U8Array& a, std::optional<std::string> label) { return py::bytes(dl::encode_clip(to_clip(a, label))); },
      py::arg("frames"), py::arg("label") = py::none());
  m.def("decode_clip", [](const py::bytes& b) {
    const auto clip = dl::decode_clip(std::string(b));
    return py::make_tuple(from_clip(clip), clip.label());
  });
  m.def("load_clip", [](const std::filesystem::path& p) {
    const auto clip = dl::load_clip(p);
    return py::make_tuple(from_clip(clip), clip.label());
  });
  m.def(
      "save_clip",
      [](const U8Array& a, const std::filesystem::path& p, std::optional<std::string> label) {
        dl::save_clip(to_clip(a, label), p);
      },
      py::arg("frames"), py::arg("path"), py::arg("label") = py::none());
  m.def("encode_flow", [](const py::array_t<float, py::array::c_style | py::array::forcecast>& a) {
    return py::bytes(dl::encode_flow(to_flow(a)));
  });
  m.def("decode_flow", [](const py::bytes& b) { return from_flow(dl::decode_flow(std::string(b))); });

  // Gamma enhancement.
  m.def("apply_gamma", [](const U8Array& a, double g) { return from_frame(dl::apply_gamma(to_frame(a), dl::Gamma(g))); });
  m.def("darken", [](const U8Array& a, double g) { return from_frame(dl::darken(to_frame(a), dl::Gamma(g))); });
  m.def(
      "estimate_gamma_target",
      [](const U8Array& a, double target) {
        const auto e = dl::estimate_gamma_target(to_frame(a), target);
        return py::make_tuple(e.gamma.value(), e.degenerate);
      },
      py::arg("frame"), py::arg("target_mean") = dl::kDefaultTargetMean);
  m.def("brightness_features", [](const U8Array& a) {
    const auto f = dl::brightness_features(to_frame(a));
    return std::vector<double>(f.begin(), f.end());
  });
  m.def(
      "enhance_clip",
      [](const U8Array& a, const std::string& mode, double gamma, double target_mean, bool per_video) {
        dl::GammaEstimator est = dl::TargetEstimator{target_mean};
        if (mode == "fixed") {
          est = dl::FixedEstimator{dl::Gamma(gamma)};
        } else if (mode != "target") {
          throw py::value_error("mode must be 'target' or 'fixed'");
        }
        const auto r = dl::enhance_clip(to_clip(a), est, {per_video, 1});
        std::vector<double> gammas;
        for (auto g : r.gammas) gammas.push_back(g.value());
        return py::make_tuple(from_clip(r.clip), gammas);
      },
      py::arg("frames"), py::arg("mode") = "target", py::arg("gamma") = 1.0,
      py::arg("target_mean") = dl::kDefaultTargetMean, py::arg("per_video") = false);

  // Sampling and geometry.
  m.def(
      "delta_sample",
      [](const U8Array& a, int omega, int alpha, int beta, int sigma, std::uint64_t seed) {
        dl::Rng rng(seed);
        const auto r = dl::delta_sample(to_clip(a), {omega, alpha, beta, sigma}, rng);
        return py::make_tuple(from_clip(r.clip), plan_dict(r.plan));
      },
      py::arg("frames"), py::arg("omega") = 4, py::arg("alpha") = 0, py::arg("beta") = 0, py::arg("sigma") = 4,
      py::arg("seed") = 0);
  m.def(
      "center_crop", [](const U8Array& a, int side) { return from_frame(dl::center_crop(to_frame(a), side)); },
      py::arg("frame"), py::arg("side") = dl::kCenterCropSide);
  m.def(
      "maxcenter_crop",
      [](const U8Array& a, std::optional<int> side) { return from_frame(dl::maxcenter_crop(to_frame(a), side)); },
      py::arg("frame"), py::arg("side") = py::none());
  m.def("scale_bilinear",
        [](const U8Array& a, int h, int w) { return from_frame(dl::scale_bilinear(to_frame(a), h, w)); });

  // Optical flow.
  m.def(
      "lucas_kanade",
      [](const U8Array& a, const U8Array& b, int window) {
        return from_flow(dl::lucas_kanade(to_frame(a), to_frame(b), window));
      },
      py::arg("first"), py::arg("second"), py::arg("window") = 15);
  m.def(
      "horn_schunck",
      [](const U8Array& a, const U8Array& b, double alpha, int iters) {
        return from_flow(dl::horn_schunck(to_frame(a), to_frame(b), alpha, iters));
      },
      py::arg("first"), py::arg("second"), py::arg("alpha") = 1.0, py::arg("iterations") = 200);

  // Features and classifier.
  m.def(
      "extract_appearance", [](const U8Array& a, int grid) { return dl::extract_appearance(to_clip(a), grid).values; },
      py::arg("frames"), py::arg("grid") = 4);

  py::class_<dl::ClassifierModel>(m, "ClassifierModel")
      .def_readonly("classes", &dl::ClassifierModel::classes)
      .def_readonly("dim", &dl::ClassifierModel::dim)
      .def_readonly("class_names", &dl::ClassifierModel::class_names)
      .def_readonly("schema", &dl::ClassifierModel::schema)
      .def_property_readonly("weights",
                             [](const dl::ClassifierModel& mdl) {
                               F64Array out({mdl.classes, mdl.dim});
                               std::copy(mdl.weights.begin(), mdl.weights.end(), out.mutable_data());
                               return out;
                             })
      .def_readonly("bias", &dl::ClassifierModel::bias)
      .def(
          "predict",
          [](const dl::ClassifierModel& mdl, const std::vector<double>& x, bool softmax) {
            return dl::predict(mdl, {x, mdl.schema}, softmax);
          },
          py::arg("features"), py::arg("softmax") = false)
      .def("to_csv",
           [](const dl::ClassifierModel& mdl) {
             std::ostringstream os;
             dl::write_classifier(mdl, os);
             return os.str();
           })
      .def_static("from_csv", [](const std::string& text) {
        std::istringstream is(text);
        return dl::read_classifier(is);
      });

  m.def(
      "train_classifier",
      [](const F64Array& x, const std::vector<int>& labels, std::vector<std::string> names, const std::string& schema,
         double lr, int epochs, double l2) {
        auto r = dl::train_classifier(to_features(x, schema), labels, std::move(names), {lr, epochs, l2});
        return py::make_tuple(std::move(r.model), std::move(r.loss_trace));
      },
      py::arg("features"), py::arg("labels"), py::arg("class_names"), py::arg("schema"),
      py::arg("learning_rate") = 0.5, py::arg("epochs") = 2000, py::arg("l2") = 1e-4);
  m.def("softmax", &dl::softmax);
  m.def("topk_accuracy", &dl::topk_accuracy);

  // Config and synthetic data.
  m.def("default_config", [] { return dl::config_to_string(dl::PipelineConfig{}); });
  m.def("normalize_config", [](const std::string& text) { return dl::config_to_string(dl::parse_config(text)); });
  m.def("config_hash", [](const std::string& text) { return dl::config_hash(dl::parse_config(text)); });
  m.def(
      "gen_synthetic",
      [](const std::filesystem::path& out_dir, std::uint64_t seed, int train_per_class, int test_per_class,
         int frames) {
        dl::SyntheticSpec spec;
        spec.seed = seed;
        spec.train_clips_per_class = train_per_class;
        spec.test_clips_per_class = test_per_class;
        spec.frames = frames;
        return dl::gen_synthetic(spec, out_dir).entries.size();
      },
      py::arg("out_dir"), py::arg("seed") = 0, py::arg("train_per_class") = 100, py::arg("test_per_class") = 40,
      py::arg("frames") = 64);
}
