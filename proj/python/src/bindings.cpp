#include "hfd/analytic.hpp"
#include "hfd/basis.hpp"
#include "hfd/diagnostics.hpp"
#include "hfd/error.hpp"
#include "hfd/io.hpp"
#include "hfd/legendre.hpp"
#include "hfd/model.hpp"
#include "hfd/solver.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace hfd;

namespace {

Scaling parse_scaling(const std::string& s)
{
  if (s == "tanh" || s == "standardize_tanh")
    return Scaling::standardize_tanh;
  if (s == "none" || s == "identity")
    return Scaling::identity;
  throw ConfigError("scaling must be 'tanh' or 'none'");
}

std::vector<double> as_point(const Vector& x)
{
  return { x.data(), x.data() + x.size() };
}

py::dict attribution_dict(const Attribution& a)
{
  py::dict d;
  d["phi"] = a.phi;
  d["baseline"] = a.baseline;
  d["prediction"] = a.prediction;
  d["residual"] = a.residual ? py::object(py::float_(*a.residual)) : py::none();
  py::list comps;
  for (const auto& [S, v] : a.components)
    comps.append(py::make_tuple(S, v));
  d["components"] = comps;
  return d;
}

Dataset make_dataset(const DecompositionModel& m, const Matrix& X, const std::optional<Vector>& y)
{
  Dataset d;
  d.feature_names = m.feature_names;
  d.X = X;
  if (y)
    d.y = *y;
  return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Hierarchical functional ANOVA decomposition (C++ core)";

  auto base = py::register_exception<Error>(m, "HfdError", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<IndexError>(m, "IndexError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<SchemaError>(m, "SchemaError", base.ptr());

  m.def(
    "legendre_normalized", [](int degree, double x) { return legendre_normalized_all(degree, x); },
    py::arg("degree"), py::arg("x"));
  m.def("truncation_count", &truncation_count, py::arg("p"), py::arg("K"), py::arg("d"));
  m.def(
    "enumerate_truncation",
    [](int p, int K, int d) {
      std::vector<std::pair<Subset, std::vector<int>>> out;
      for (const auto& idx : enumerate_truncation(p, K, d).indices)
        out.emplace_back(idx.subset, idx.degrees);
      return out;
    },
    py::arg("p"), py::arg("K"), py::arg("d"));

  py::class_<DecompositionModel>(m, "Model")
    .def_property_readonly("p", &DecompositionModel::p)
    .def_readonly("feature_names", &DecompositionModel::feature_names)
    .def_readonly("nu_empty", &DecompositionModel::nu_empty)
    .def_readonly("K", &DecompositionModel::K)
    .def_readonly("d", &DecompositionModel::d)
    .def_property_readonly("subsets", &DecompositionModel::selected_subsets)
    .def_property_readonly("fit_seconds", [](const DecompositionModel& s) { return s.info.fit_seconds; })
    .def_property_readonly("warnings", [](const DecompositionModel& s) { return s.info.warnings; })
    .def_property_readonly("support_size",
                           [](const DecompositionModel& s) { return s.solve.selected_support.size() - 1; })
    .def("predict", py::overload_cast<const Matrix&>(&DecompositionModel::predict, py::const_), py::arg("X"))
    .def(
      "component",
      [](const DecompositionModel& s, Subset S, const Matrix& X) {
        S = S.empty() ? S : canonical_subset(S, s.p());
        Vector out(X.rows());
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
          const auto x = as_point(X.row(i).transpose());
          out(i) = s.component_eval(S, x);
        }
        return out;
      },
      py::arg("S"), py::arg("X"))
    .def(
      "component_values",
      [](const DecompositionModel& s, const Matrix& X) {
        const auto cv = s.component_values(X);
        return py::make_tuple(cv.subsets, cv.values);
      },
      py::arg("X"))
    .def(
      "shapley",
      [](const DecompositionModel& s, const Vector& x, std::optional<double> y) {
        const auto pt = as_point(x);
        return attribution_dict(s.shapley(pt, y));
      },
      py::arg("x"), py::arg("y") = py::none())
    .def(
      "variance_shares",
      [](const DecompositionModel& s, const Matrix& X) {
        py::dict out;
        for (const auto& [S, v] : s.variance_shares(X).shares)
          out[py::tuple(py::cast(S))] = v;
        return out;
      },
      py::arg("X"))
    .def(
      "metrics_json",
      [](const DecompositionModel& s, const Matrix& X, const Vector& y, double threshold) {
        return metrics_to_json(compute_metrics(s, X, y, threshold)).dump();
      },
      py::arg("X"), py::arg("y"), py::arg("share_threshold") = 0.01)
    .def("to_json", [](const DecompositionModel& s) { return model_to_json(s).dump(); })
    .def_static(
      "from_json", [](const std::string& text) { return model_from_json(json::parse(text)); },
      py::arg("text"))
    .def(
      "export_bundle_json",
      [](const DecompositionModel& s, const Matrix& X, std::optional<Vector> y, std::size_t grid_1d,
         std::size_t grid_2d, std::size_t max_rows) {
        ExportOptions opt{ grid_1d, grid_2d, max_rows };
        return export_bundle(s, make_dataset(s, X, y), opt).dump();
      },
      py::arg("X"), py::arg("y") = py::none(), py::arg("grid_1d") = 200, py::arg("grid_2d") = 50,
      py::arg("max_rows") = 20);

  m.def(
    "fit",
    [](const Matrix& X, const Vector& y, int K, int d, int d_density, double epsilon,
       const std::string& scaling, std::size_t max_lars_steps, std::vector<std::string> feature_names) {
      FitConfig cfg;
      cfg.K = K;
      cfg.d = d;
      cfg.d_density = d_density;
      cfg.epsilon = epsilon;
      cfg.scaling = parse_scaling(scaling);
      cfg.max_lars_steps = max_lars_steps;
      py::gil_scoped_release release;
      return fit(X, y, cfg, nullptr, std::move(feature_names));
    },
    py::arg("X"), py::arg("y"), py::arg("K") = 2, py::arg("d") = 10, py::arg("d_density") = 4,
    py::arg("epsilon") = 0.01, py::arg("scaling") = "tanh", py::arg("max_lars_steps") = 500,
    py::arg("feature_names") = std::vector<std::string>{});

  m.def("reconstruction_r2", py::overload_cast<const Vector&, const Vector&>(&reconstruction_r2),
        py::arg("y"), py::arg("prediction"));

  m.def(
    "lars_path",
    [](const Matrix& B, const Vector& y, bool intercept_column) {
      LarsOptions opt;
      opt.intercept_column = intercept_column;
      py::list steps;
      for (const auto& s : lars_path(B, y, opt).steps) {
        py::dict d;
        d["support"] = s.support;
        d["coefficients"] = s.coefficients;
        d["intercept"] = s.intercept;
        d["rss"] = s.rss;
        d["penalty"] = s.penalty;
        steps.append(d);
      }
      return steps;
    },
    py::arg("B"), py::arg("y"), py::arg("intercept_column") = true);
  m.def(
    "solve_reduced", [](const Matrix& B, const Vector& y) { return solve_reduced(B, y).coefficients; },
    py::arg("B"), py::arg("y"));

  m.def(
    "fgm_sample", [](std::size_t n, std::uint64_t seed, double rho) { return FgmCase(rho).sample(n, seed); },
    py::arg("n"), py::arg("seed") = 0, py::arg("rho") = 0.5);
  m.def(
    "fgm_target", [](const Matrix& X, double rho) { return FgmCase(rho).target(X); }, py::arg("X"),
    py::arg("rho") = 0.5);
  m.def(
    "fgm_component",
    [](Subset S, const Vector& x, double rho) { return FgmCase(rho).component(S, as_point(x)); },
    py::arg("S"), py::arg("x"), py::arg("rho") = 0.5);
  m.def(
    "gauss_tanh_sample",
    [](std::size_t n, std::uint64_t seed, double rho) { return GaussTanhCase(rho).sample(n, seed); },
    py::arg("n"), py::arg("seed") = 0, py::arg("rho") = 0.5);
  m.def(
    "gauss_tanh_target", [](const Matrix& X, double rho) { return GaussTanhCase(rho).target(X); },
    py::arg("X"), py::arg("rho") = 0.5);

  m.def(
    "read_csv",
    [](const std::filesystem::path& path, std::optional<std::string> target) {
      std::optional<ColumnRef> ref;
      if (target)
        ref = ColumnRef{ *target };
      const Dataset d = ingest_csv(path, ref);
      return py::make_tuple(d.feature_names, d.X, d.y);
    },
    py::arg("path"), py::arg("target") = py::none());
}
