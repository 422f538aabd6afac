#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "avdb/bench.hpp"
#include "avdb/cnn.hpp"
#include "avdb/dataset.hpp"
#include "avdb/error.hpp"
#include "avdb/hog.hpp"
#include "avdb/image.hpp"
#include "avdb/knn.hpp"
#include "avdb/metrics.hpp"
#include "avdb/model_io.hpp"
#include "avdb/svm.hpp"

namespace py = pybind11;
using namespace avdb;

PYBIND11_MODULE(avdb, m) {
    m.doc() = "drone-vs-bird classification toolkit";

    static py::exception<Error> exc(m, "ToolkitError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(exc, e.what());
        }
    });

    // imaging
    py::class_<Image>(m, "Image")
        .def(py::init<>())
        .def_readwrite("width", &Image::width)
        .def_readwrite("height", &Image::height)
        .def_readwrite("channels", &Image::channels)
        .def_readwrite("pixels", &Image::pixels);
    py::class_<GrayTensor>(m, "GrayTensor")
        .def(py::init<>())
        .def_readwrite("width", &GrayTensor::width)
        .def_readwrite("height", &GrayTensor::height)
        .def_readwrite("values", &GrayTensor::values);
    m.def("decode_image", [](py::bytes b) {
        std::string s = b;
        return decode_image(std::vector<std::uint8_t>(s.begin(), s.end()));
    });
    m.def("encode_image", [](const Image& img) {
        auto v = encode_image(img);
        return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
    });
    m.def("to_grayscale", &to_grayscale);
    m.def("resize_bilinear", &resize_bilinear);
    m.def("normalize", &normalize);

    // hog
    py::class_<HogConfig>(m, "HogConfig")
        .def(py::init<>())
        .def_readwrite("cell_size", &HogConfig::cell_size)
        .def_readwrite("block_size", &HogConfig::block_size)
        .def_readwrite("block_stride", &HogConfig::block_stride)
        .def_readwrite("bins", &HogConfig::bins)
        .def_readwrite("clip", &HogConfig::clip);
    m.def("hog_descriptor", &hog_descriptor, py::arg("tensor"),
          py::arg("config") = HogConfig{});
    m.def("hog_dim", &hog_dim, py::arg("width"), py::arg("height"),
          py::arg("config") = HogConfig{});

    // dataset
    py::enum_<Label>(m, "Label")
        .value("Drone", Label::Drone)
        .value("Bird", Label::Bird);
    py::enum_<FeatureMode>(m, "FeatureMode")
        .value("RawPixels", FeatureMode::RawPixels)
        .value("Hog", FeatureMode::Hog);
    py::class_<LabeledSample>(m, "LabeledSample")
        .def(py::init<>())
        .def_readwrite("id", &LabeledSample::id)
        .def_readwrite("features", &LabeledSample::features)
        .def_readwrite("label", &LabeledSample::label);
    py::class_<Dataset>(m, "Dataset")
        .def(py::init<>())
        .def_readwrite("samples", &Dataset::samples)
        .def_readwrite("feature_dim", &Dataset::feature_dim)
        .def("__len__", &Dataset::size);
    py::class_<SplitSpec>(m, "SplitSpec")
        .def(py::init<>())
        .def_readwrite("train_fraction", &SplitSpec::train_fraction)
        .def_readwrite("seed", &SplitSpec::seed);
    m.def("load_directory", &load_directory, py::arg("root"), py::arg("image_size"),
          py::arg("mode"), py::arg("hog") = HogConfig{});
    m.def("split_train_test", &split_train_test);
    m.def("render_sample", &render_sample);
    m.def("generate_synthetic", &generate_synthetic, py::arg("count_per_class"),
          py::arg("size"), py::arg("seed"),
          py::arg("mode") = FeatureMode::RawPixels, py::arg("hog") = HogConfig{});
    m.def("write_synthetic", &write_synthetic);

    // classifiers
    py::class_<KnnModel>(m, "KnnModel")
        .def(py::init<>())
        .def_readwrite("k", &KnnModel::k)
        .def_readwrite("train", &KnnModel::train)
        .def_readwrite("feature_dim", &KnnModel::feature_dim);
    m.def("knn_fit", &knn_fit);
    m.def("knn_predict", &knn_predict);

    py::class_<SvmModel>(m, "SvmModel")
        .def(py::init<>())
        .def_readwrite("w", &SvmModel::w)
        .def_readwrite("b", &SvmModel::b);
    py::class_<SvmTrainConfig>(m, "SvmTrainConfig")
        .def(py::init<>())
        .def_readwrite("lambda_", &SvmTrainConfig::lambda)
        .def_readwrite("epochs", &SvmTrainConfig::epochs)
        .def_readwrite("lr0", &SvmTrainConfig::lr0)
        .def_readwrite("seed", &SvmTrainConfig::seed);
    m.def("svm_train", &svm_train, py::arg("dataset"),
          py::arg("config") = SvmTrainConfig{});
    m.def("svm_decision", &svm_decision);
    m.def("svm_predict", &svm_predict);

    py::class_<CnnTrainConfig>(m, "CnnTrainConfig")
        .def(py::init<>())
        .def_readwrite("epochs", &CnnTrainConfig::epochs)
        .def_readwrite("batch", &CnnTrainConfig::batch)
        .def_readwrite("lr", &CnnTrainConfig::lr)
        .def_readwrite("momentum", &CnnTrainConfig::momentum)
        .def_readwrite("seed", &CnnTrainConfig::seed)
        .def_readwrite("conv_channels", &CnnTrainConfig::conv_channels)
        .def_readwrite("fc_hidden", &CnnTrainConfig::fc_hidden);
    py::class_<CnnModel>(m, "CnnModel")
        .def(py::init<>())
        .def_readwrite("input_size", &CnnModel::input_size)
        .def("depth", &CnnModel::depth);
    py::class_<EpochStats>(m, "EpochStats")
        .def_readonly("mean_loss", &EpochStats::mean_loss)
        .def_readonly("accuracy", &EpochStats::accuracy);
    m.def("cnn_train", &cnn_train, py::arg("dataset"),
          py::arg("config") = CnnTrainConfig{});
    m.def("cnn_forward", [](const CnnModel& model, const GrayTensor& x) {
        return cnn_forward(model, x).first;
    });
    m.def("cnn_predict", &cnn_predict);
    m.def("make_cnn", &make_cnn);

    py::class_<GradCheckResult>(m, "GradCheckResult")
        .def_readonly("max_rel_err", &GradCheckResult::max_rel_err)
        .def_readonly("worst_param", &GradCheckResult::worst_param)
        .def_readonly("analytic", &GradCheckResult::analytic)
        .def_readonly("numeric", &GradCheckResult::numeric);
    m.def("reference_gradient_check", &reference_gradient_check);

    // metrics
    py::class_<ConfusionMatrix>(m, "ConfusionMatrix")
        .def(py::init<>())
        .def_readwrite("tp", &ConfusionMatrix::tp)
        .def_readwrite("tn", &ConfusionMatrix::tn)
        .def_readwrite("fp", &ConfusionMatrix::fp)
        .def_readwrite("fn", &ConfusionMatrix::fn)
        .def("total", &ConfusionMatrix::total);
    py::class_<MetricReport>(m, "MetricReport")
        .def_readonly("accuracy", &MetricReport::accuracy)
        .def_readonly("sensitivity", &MetricReport::sensitivity)
        .def_readonly("precision", &MetricReport::precision)
        .def_readonly("misclassified_ids", &MetricReport::misclassified_ids);
    m.def("confusion", &confusion);
    m.def("report", &report);
    m.def("misclassified_ids", &misclassified_ids);

    // persistence
    py::class_<ModelInfo>(m, "ModelInfo")
        .def(py::init<>())
        .def_readwrite("kind", &ModelInfo::kind)
        .def_readwrite("image_size", &ModelInfo::image_size)
        .def_readwrite("feature_mode", &ModelInfo::feature_mode)
        .def_readwrite("train_fraction", &ModelInfo::train_fraction)
        .def_readwrite("seed", &ModelInfo::seed)
        .def_readwrite("params", &ModelInfo::params);
    py::class_<ModelContainer>(m, "ModelContainer")
        .def(py::init<>())
        .def_readwrite("info", &ModelContainer::info)
        .def_readwrite("model", &ModelContainer::model);
    m.def("save_model", &save_model);
    m.def("load_model", &load_model);
    m.def("predict_any", &predict_any);
}
