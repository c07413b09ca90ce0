#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <vector>

#include "kernsupp/error.hpp"
#include "kernsupp/estimator.hpp"
#include "kernsupp/eval.hpp"
#include "kernsupp/filters.hpp"
#include "kernsupp/harness.hpp"
#include "kernsupp/io.hpp"
#include "kernsupp/kernels.hpp"
#include "kernsupp/oracles.hpp"
#include "kernsupp/selection.hpp"
#include "kernsupp/synth.hpp"

namespace py = pybind11;
using namespace kernsupp;

namespace {

// Accepts an (n, d) array or a single point of shape (d,).
PointMatrix as_points(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() == 1) {
    PointMatrix p(1, a.shape(0));
    for (py::ssize_t j = 0; j < a.shape(0); ++j) p(0, j) = a.at(j);
    return p;
  }
  if (a.ndim() != 2) throw UsageError("points must be a 1-D or 2-D array");
  PointMatrix p(a.shape(0), a.shape(1));
  std::copy(a.data(), a.data() + a.size(), p.data());
  return p;
}

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

}  // namespace

PYBIND11_MODULE(kernsupp, m) {
  m.doc() = "Support estimation with kernel spectral regularization";

  // Translators run newest first, so the subclasses are registered last.
  auto& error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<UsageError>(m, "UsageError", error.ptr());
  py::register_exception<DataError>(m, "DataError", error.ptr());
  py::register_exception<NumericError>(m, "NumericError", error.ptr());

  // ---- kernels
  py::class_<KernelSpec>(m, "Kernel")
      .def_static("abel", &KernelSpec::abel, py::arg("sigma"))
      .def_static("l1_exponential", &KernelSpec::l1_exponential, py::arg("sigma"))
      .def_static("gaussian", &KernelSpec::gaussian, py::arg("sigma"))
      .def_static("linear", &KernelSpec::linear)
      .def_static("parse", [](const std::string& s) { return KernelSpec::parse(s); })
      .def_static("product",
                  [](const std::vector<std::tuple<KernelSpec, std::size_t, std::size_t>>& factors) {
                    std::vector<std::pair<KernelSpec, CoordinateSlice>> f;
                    for (const auto& [k, b, e] : factors) f.push_back({k, {b, e}});
                    return product_kernel(std::move(f));
                  },
                  py::arg("factors"), "factors: list of (kernel, begin, end) coordinate slices")
      .def("normalized", [](const KernelSpec& k) { return normalize(k); })
      .def_property_readonly("sigma", &KernelSpec::sigma)
      .def_property_readonly("unit_diagonal", &KernelSpec::unit_diagonal)
      .def_property_readonly("separation", [](const KernelSpec& k) { return to_string(k.separation()); })
      .def("with_sigma", &KernelSpec::with_sigma)
      .def("__call__", [](const KernelSpec& k, const Point& x, const Point& y) { return kernel_eval(k, x, y); })
      .def("metric", [](const KernelSpec& k, const Point& x, const Point& y) { return induced_metric(k, x, y); })
      .def("gram", [](const KernelSpec& k, const Array& x) { return Matrix(gram(k, as_points(x)).matrix()); })
      .def("cross_gram",
           [](const KernelSpec& k, const Array& a, const Array& b) {
             return cross_gram(k, as_points(a), as_points(b));
           })
      .def("expression", &KernelSpec::expression)
      .def("__str__", &KernelSpec::to_string)
      .def("__repr__", [](const KernelSpec& k) { return "Kernel(" + k.expression() + ")"; })
      .def("__eq__", &KernelSpec::operator==);

  // ---- filters
  py::class_<FilterSpec>(m, "Filter")
      .def_static("tikhonov", &FilterSpec::tikhonov, py::arg("lam"))
      .def_static("spectral_cutoff", &FilterSpec::spectral_cutoff, py::arg("lam"))
      .def_static("landweber", &FilterSpec::landweber, py::arg("m"))
      .def_static("kpca", &FilterSpec::kpca, py::arg("lam"))
      .def_static("kpca_rank", &FilterSpec::kpca_rank, py::arg("rank"))
      .def_static("parse", [](const std::string& s) { return FilterSpec::parse(s); })
      .def_property_readonly("name", &FilterSpec::name)
      .def_property_readonly("lam", &FilterSpec::lambda)
      .def_property_readonly("lipschitz", [](const FilterSpec& f) { return lipschitz_constant(f); })
      .def("r", [](const FilterSpec& f, double s) { return r_value(f, s); })
      .def("g", [](const FilterSpec& f, double s) { return g_value(f, s); })
      .def("__str__", &FilterSpec::to_string)
      .def("__repr__", [](const FilterSpec& f) { return "Filter(" + f.to_string() + ")"; })
      .def("__eq__", &FilterSpec::operator==);

  // ---- estimator
  py::class_<SupportModel>(m, "SupportModel")
      .def_property_readonly("kernel", &SupportModel::kernel)
      .def_property_readonly("filter", &SupportModel::filter)
      .def_property_readonly("tau", &SupportModel::tau)
      .def_property_readonly("algorithm", [](const SupportModel& s) { return to_string(s.algorithm()); })
      .def_property_readonly("training_points", &SupportModel::training_points)
      .def_property_readonly("eigenvalues", [](const SupportModel& s) { return s.decomposition().eigenvalues; })
      .def("score", [](const SupportModel& s, const Array& x) { return score_batch(s, as_points(x)); },
           py::arg("points"), "F_n at each row of `points`")
      .def(
          "predict",
          [](const SupportModel& s, const Array& x, std::optional<double> tau) {
            const Vector v = score_batch(s, as_points(x));
            std::vector<bool> out;
            for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(is_member(v(i), tau.value_or(s.tau())));
            return out;
          },
          py::arg("points"), py::arg("tau") = py::none())
      .def("with_filter",
           [](const SupportModel& s, const FilterSpec& f, const std::string& a) {
             return s.with_filter(f, parse_algorithm(a));
           },
           py::arg("filter"), py::arg("algorithm") = "auto")
      .def("with_tau", &SupportModel::with_tau)
      .def("path",
           [](const SupportModel& s, const Array& x, const std::vector<double>& lambdas) {
             return regularization_path(s, as_points(x), lambdas);
           },
           py::arg("points"), py::arg("lambdas"), "scores (points x lambdas) from one decomposition")
      .def("save",
           [](const SupportModel& s, const std::string& path, bool binary) {
             save_model(s, path, {binary ? ModelFormat::Binary : ModelFormat::Text, true});
           },
           py::arg("path"), py::arg("binary") = false)
      .def_static("load", [](const std::string& path) { return load_model(path); });

  m.def(
      "fit",
      [](const Array& x, const KernelSpec& k, const FilterSpec& f, const std::string& algorithm, double tau) {
        return fit(as_points(x), k, f, parse_algorithm(algorithm), tau);
      },
      py::arg("points"), py::arg("kernel"), py::arg("filter"), py::arg("algorithm") = "auto", py::arg("tau") = 0.0);

  // ---- selection
  m.def("width_heuristic", [](const Array& x, std::size_t k) { return width_heuristic(as_points(x), k); },
        py::arg("points"), py::arg("k") = 10);
  m.def("lambda_curvature", &lambda_curvature, py::arg("eigenvalues"));
  m.def("rate_lambda", &rate_lambda, py::arg("n"), py::arg("s"), py::arg("b"));

  // ---- bounds
  m.def("concentration_bound", &concentration_bound, py::arg("n"), py::arg("delta"));
  m.def("effective_dimension", py::overload_cast<const Vector&, double>(&effective_dimension),
        py::arg("eigenvalues"), py::arg("lam"));
  m.def("sample_error_bound", &sample_error_bound, py::arg("n"), py::arg("lam"), py::arg("delta"),
        py::arg("effective_dim"));
  m.def("finite_sample_bound", &finite_sample_bound, py::arg("n"), py::arg("delta"), py::arg("s"), py::arg("b"),
        py::arg("c_s"), py::arg("d_b"));
  m.def("bernstein_bound", &bernstein_bound, py::arg("m"), py::arg("variance"), py::arg("n"), py::arg("delta"));
  m.def(
      "hs_distance",
      [](const Array& a, const Array& b, const KernelSpec& k) {
        return hs_distance(EmpiricalOperator(as_points(a), k), EmpiricalOperator(as_points(b), k));
      },
      py::arg("a"), py::arg("b"), py::arg("kernel"));

  // ---- evaluation
  m.def("hausdorff", [](const Array& a, const Array& b) { return hausdorff(as_points(a), as_points(b)); });
  m.def(
      "roc_auc",
      [](const std::vector<double>& pos, const std::vector<double>& neg) {
        const auto r = roc_auc(std::span<const double>(pos), std::span<const double>(neg));
        std::vector<double> fpr, tpr;
        for (const auto& p : r.points) {
          fpr.push_back(p.false_positive_rate);
          tpr.push_back(p.true_positive_rate);
        }
        return py::make_tuple(r.auc, fpr, tpr);
      },
      py::arg("positives"), py::arg("negatives"), "(auc, fpr, tpr)");
  m.def("parzen_scores",
        [](const Array& train, double h, const Array& x) { return parzen_scores(as_points(train), h, as_points(x)); },
        py::arg("train"), py::arg("h"), py::arg("points"));

  // ---- synthetic tasks
  py::class_<SyntheticTask>(m, "Task")
      .def_static("make", [](const std::string& name, double noise) { return SyntheticTask::make(name, noise); },
                  py::arg("name"), py::arg("noise") = 0.1)
      .def_static("names", &SyntheticTask::names)
      .def_property_readonly("name", &SyntheticTask::name)
      .def_property_readonly("dimension", &SyntheticTask::dimension)
      .def("sample", &SyntheticTask::sample, py::arg("n"), py::arg("seed"))
      .def("distance_to_support", [](const SyntheticTask& t, const Point& x) { return t.distance_to_support(x); })
      .def("reference_support", &SyntheticTask::reference_support, py::arg("count") = 2000)
      .def(
          "reference_grid",
          [](const SyntheticTask& t, std::size_t resolution) {
            const auto g = reference_grid(t, resolution);
            std::vector<bool> inside(g.inside.begin(), g.inside.end());
            return py::make_tuple(g.points, inside, g.step, g.cell_volume);
          },
          py::arg("resolution"), "(points, inside, step, cell_volume)");
}
