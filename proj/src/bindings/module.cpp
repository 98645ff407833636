#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "json.hpp"

#include "turtleid/dataset.hpp"
#include "turtleid/evaluation.hpp"
#include "turtleid/hog.hpp"
#include "turtleid/image_io.hpp"
#include "turtleid/imgproc.hpp"
#include "turtleid/keypoint.hpp"
#include "turtleid/nndr.hpp"
#include "turtleid/pipeline.hpp"
#include "turtleid/report_io.hpp"

namespace py = pybind11;
using namespace turtleid;

namespace {

GrayImage gray_from_array(const py::array& arr) {
    auto a = py::array_t<double, py::array::c_style | py::array::forcecast>::ensure(arr);
    if (!a || a.ndim() != 2) throw py::value_error("expected a 2-D array");
    GrayImage img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    auto r = a.unchecked<2>();
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) img.at(x, y) = r(y, x);
    return img;
}

py::array_t<double> array_from_gray(const GrayImage& img) {
    py::array_t<double> out({img.height, img.width});
    auto w = out.mutable_unchecked<2>();
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) w(y, x) = img.at(x, y);
    return out;
}

py::array_t<std::uint8_t> array_from_rgb(const RgbImage& img) {
    py::array_t<std::uint8_t> out({img.height, img.width, 3});
    auto w = out.mutable_unchecked<3>();
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const std::uint8_t* p = img.px(x, y);
            for (int c = 0; c < 3; ++c) w(y, x, c) = p[c];
        }
    return out;
}

RgbImage rgb_from_array(const py::array& arr) {
    auto a = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>::ensure(arr);
    if (!a || a.ndim() != 3 || a.shape(2) != 3) throw py::value_error("expected an HxWx3 uint8 array");
    RgbImage img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    auto r = a.unchecked<3>();
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            std::uint8_t* p = img.px(x, y);
            for (int c = 0; c < 3; ++c) p[c] = r(y, x, c);
        }
    return img;
}

HogDescriptor descriptor_from_array(const py::array& arr, const HogParams& params) {
    auto a = py::array_t<float, py::array::c_style | py::array::forcecast>::ensure(arr);
    if (!a || a.ndim() != 1) throw py::value_error("expected a 1-D descriptor array");
    HogDescriptor d;
    d.params = params;
    d.values.assign(a.data(), a.data() + a.size());
    return d;
}

std::vector<GalleryEntry> gallery_from_list(const py::list& gallery, const HogParams& params) {
    std::vector<GalleryEntry> out;
    for (auto item : gallery) {
        auto t = item.cast<py::tuple>();
        if (t.size() != 3) throw py::value_error("gallery entries are (sample_id, class, values)");
        GalleryEntry e;
        e.sample_id = t[0].cast<std::string>();
        e.class_label = t[1].cast<std::string>();
        e.descriptor = descriptor_from_array(t[2].cast<py::array>(), params);
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Sea turtle carapace re-identification: HOG template matching under an NNDR rule";

    py::register_exception<Error>(m, "TurtleidError", PyExc_RuntimeError);

    py::class_<RoiRect>(m, "RoiRect")
        .def(py::init<>())
        .def(py::init([](int x, int y, int w, int h) { return RoiRect{x, y, w, h}; }),
             py::arg("x"), py::arg("y"), py::arg("w"), py::arg("h"))
        .def_readwrite("x", &RoiRect::x)
        .def_readwrite("y", &RoiRect::y)
        .def_readwrite("w", &RoiRect::w)
        .def_readwrite("h", &RoiRect::h)
        .def("__repr__", [](const RoiRect& r) {
            return "RoiRect(" + std::to_string(r.x) + ", " + std::to_string(r.y) + ", " +
                   std::to_string(r.w) + ", " + std::to_string(r.h) + ")";
        });

    py::class_<SampleRecord>(m, "SampleRecord")
        .def(py::init<>())
        .def(py::init([](std::string path, std::string id, double deg, RoiRect roi) {
                 return SampleRecord{std::move(path), std::move(id), deg, roi};
             }),
             py::arg("image_path"), py::arg("individual_id"), py::arg("rotation_deg"),
             py::arg("roi"))
        .def_readwrite("image_path", &SampleRecord::image_path)
        .def_readwrite("individual_id", &SampleRecord::individual_id)
        .def_readwrite("rotation_deg", &SampleRecord::rotation_deg)
        .def_readwrite("roi", &SampleRecord::roi);

    py::class_<DatasetStats>(m, "DatasetStats")
        .def_readonly("per_class", &DatasetStats::per_class)
        .def_readonly("total", &DatasetStats::total);

    py::class_<HogParams>(m, "HogParams")
        .def(py::init<>())
        .def_readwrite("window_w", &HogParams::window_w)
        .def_readwrite("window_h", &HogParams::window_h)
        .def_readwrite("cell", &HogParams::cell)
        .def_readwrite("block", &HogParams::block)
        .def_readwrite("block_stride", &HogParams::block_stride)
        .def_readwrite("bins", &HogParams::bins);

    py::class_<SampleKey>(m, "SampleKey")
        .def_readonly("sample_id", &SampleKey::sample_id)
        .def_readonly("class_label", &SampleKey::class_label);

    py::class_<NndrScore>(m, "NndrScore")
        .def_readonly("beta", &NndrScore::beta)
        .def_readonly("best", &NndrScore::best)
        .def_readonly("second", &NndrScore::second)
        .def_readonly("omega_top", &NndrScore::omega_top)
        .def_readonly("omega_2nd", &NndrScore::omega_2nd);

    py::class_<MatchDecision>(m, "MatchDecision")
        .def_property_readonly("kind",
                               [](const MatchDecision& d) { return std::string(to_string(d.kind)); })
        .def_property_readonly(
            "many_reason", [](const MatchDecision& d) { return std::string(to_string(d.reason)); })
        .def_readonly("score", &MatchDecision::score)
        .def_property_readonly("accepted_class", [](const MatchDecision& d) -> py::object {
            if (d.kind != DecisionKind::Accept) return py::none();
            return py::str(d.accepted_class());
        });

    py::class_<Keypoint>(m, "Keypoint")
        .def_readonly("x", &Keypoint::x)
        .def_readonly("y", &Keypoint::y)
        .def_readonly("response", &Keypoint::response)
        .def_readonly("orientation", &Keypoint::orientation);

    // dataset
    m.def("load_manifest", &load_manifest, py::arg("path"));
    m.def("write_manifest", &write_manifest, py::arg("records"), py::arg("path"));
    m.def("dataset_stats", &dataset_stats, py::arg("records"));
    m.def("make_sample_id", &make_sample_id, py::arg("row_index"), py::arg("record"));
    m.def("load_image", [](const std::filesystem::path& p) { return array_from_rgb(load_image(p)); },
          py::arg("path"));
    m.def("load_pgm", [](const std::filesystem::path& p) { return array_from_gray(load_pgm(p)); },
          py::arg("path"));
    m.def("save_pgm",
          [](const py::array& img, const std::filesystem::path& p) { save_pgm(gray_from_array(img), p); },
          py::arg("image"), py::arg("path"));

    // image processing
    m.def("to_grayscale",
          [](const py::array& img) { return array_from_gray(to_grayscale(rgb_from_array(img))); },
          py::arg("image"));
    m.def("rotate",
          [](const py::array& img, double deg) { return array_from_gray(rotate(gray_from_array(img), deg)); },
          py::arg("image"), py::arg("deg"));
    m.def("crop_roi",
          [](const py::array& img, const RoiRect& roi) {
              return array_from_gray(crop_roi(gray_from_array(img), roi));
          },
          py::arg("image"), py::arg("roi"));
    m.def("gaussian_smooth",
          [](const py::array& img, int size, double sigma) {
              return array_from_gray(gaussian_smooth(gray_from_array(img), gaussian_kernel(size, sigma)));
          },
          py::arg("image"), py::arg("size") = 4, py::arg("sigma") = 1.0);
    m.def("resize",
          [](const py::array& img, int w, int h) {
              return array_from_gray(resize(gray_from_array(img), w, h));
          },
          py::arg("image"), py::arg("w"), py::arg("h"));

    // descriptors
    m.def("descriptor_len", &descriptor_len, py::arg("params") = HogParams{});
    m.def("compute_hog",
          [](const py::array& img, const HogParams& params) {
              HogDescriptor d = compute_hog(gray_from_array(img), params);
              return py::array_t<float>(static_cast<py::ssize_t>(d.values.size()), d.values.data());
          },
          py::arg("image"), py::arg("params") = HogParams{});
    m.def("hog_distance",
          [](const py::array& a, const py::array& b, const HogParams& params) {
              return hog_distance(descriptor_from_array(a, params), descriptor_from_array(b, params));
          },
          py::arg("a"), py::arg("b"), py::arg("params") = HogParams{});

    // keypoint baseline
    m.def("detect_fast",
          [](const py::array& img, double threshold, int max_keypoints) {
              return detect_fast(gray_from_array(img), threshold, max_keypoints);
          },
          py::arg("image"), py::arg("threshold") = 20.0, py::arg("max_keypoints") = 500);
    m.def("keypoint_image_score",
          [](const py::array& a, const py::array& b, double acceptance, double fast_threshold,
             int max_keypoints) {
              return keypoint_image_score(gray_from_array(a), gray_from_array(b), acceptance,
                                          fast_threshold, max_keypoints);
          },
          py::arg("query"), py::arg("gallery"), py::arg("acceptance_threshold") = 0.8,
          py::arg("fast_threshold") = 20.0, py::arg("max_keypoints") = 500);

    // classification
    m.def("nndr_score",
          [](const py::array& query, const py::list& gallery, const HogParams& params) {
              return nndr_score(descriptor_from_array(query, params), gallery_from_list(gallery, params));
          },
          py::arg("query"), py::arg("gallery"), py::arg("params") = HogParams{});
    m.def("classify",
          [](const py::array& query, const py::list& gallery, double threshold,
             const HogParams& params) {
              return classify(descriptor_from_array(query, params), gallery_from_list(gallery, params),
                              threshold);
          },
          py::arg("query"), py::arg("gallery"), py::arg("threshold"),
          py::arg("params") = HogParams{});
    m.def("nndr_score_distances",
          [](const std::vector<double>& distances, const std::vector<std::pair<std::string, std::string>>& keys) {
              std::vector<SampleKey> sk;
              sk.reserve(keys.size());
              for (const auto& [id, cls] : keys) sk.push_back({id, cls});
              return nndr_score(distances, sk);
          },
          py::arg("distances"), py::arg("keys"));

    // evaluation
    m.def("random_guess_baseline", &random_guess_baseline, py::arg("n_classes"));
    m.def("average_accuracy_from_proportions",
          [](std::vector<std::string> classes, std::vector<std::vector<double>> proportions) {
              return average_accuracy(confusion_from_proportions(std::move(classes), std::move(proportions)));
          },
          py::arg("classes"), py::arg("proportions"));
    m.def("evaluate_manifest_json",
          [](const std::filesystem::path& manifest, const std::string& descriptor,
             const std::string& folds, std::uint64_t seed, double operating_threshold, int jobs) {
              PipelineConfig pc;
              pc.kind = descriptor == "keypoint" ? DescriptorKind::Keypoint : DescriptorKind::Hog;
              EvalConfig ec;
              if (folds != "loo") {
                  ec.fold_mode = FoldMode::KFold;
                  ec.k = std::stoi(folds);
              }
              ec.seed = seed;
              ec.operating_threshold = operating_threshold;
              ec.jobs = jobs;
              PreprocessedDataset ds = load_and_preprocess(manifest, pc, jobs);
              DistanceMatrix dm = build_distance_matrix(ds.rois, ds.keys, pc, jobs);
              return report_to_json(run_evaluation(dm, ec)).dump();
          },
          py::arg("manifest"), py::arg("descriptor") = "hog", py::arg("folds") = "loo",
          py::arg("seed") = 0, py::arg("operating_threshold") = 0.9, py::arg("jobs") = 1);
}
