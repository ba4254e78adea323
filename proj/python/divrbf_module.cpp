#include <memory>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "divrbf/direct.hpp"
#include "divrbf/error.hpp"
#include "divrbf/geom.hpp"
#include "divrbf/harmonics.hpp"
#include "divrbf/harness.hpp"
#include "divrbf/kernels.hpp"
#include "divrbf/rbfqr.hpp"

namespace py = pybind11;
using namespace divrbf;

namespace {

using PointArray = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

std::vector<SpherePoint> to_points(const Eigen::Ref<const PointArray>& a) {
  std::vector<SpherePoint> pts;
  pts.reserve(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) pts.emplace_back(a(i, 0), a(i, 1), a(i, 2));
  return pts;
}

PointArray from_points(const std::vector<SpherePoint>& pts) {
  PointArray a(static_cast<Eigen::Index>(pts.size()), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) a.row(static_cast<Eigen::Index>(i)) = pts[i].vec();
  return a;
}

PointArray from_vecs(const std::vector<Vec3>& vs) {
  PointArray a(static_cast<Eigen::Index>(vs.size()), 3);
  for (std::size_t i = 0; i < vs.size(); ++i) a.row(static_cast<Eigen::Index>(i)) = vs[i];
  return a;
}

KernelConfig config(const std::string& kernel, double eps) {
  return KernelConfig(parse_kernel_kind(kernel), eps);
}

TangentFieldSamples samples(const Eigen::Ref<const PointArray>& nodes,
                            const Eigen::Ref<const PointArray>& field) {
  if (nodes.rows() != field.rows())
    throw Error(ErrorCode::InvalidInput, "nodes and field must have the same number of rows");
  std::vector<Vec3> vs;
  for (Eigen::Index i = 0; i < field.rows(); ++i) vs.emplace_back(field.row(i).transpose());
  return TangentFieldSamples::from_vectors(to_points(nodes), vs);
}

template <class F>
PointArray eval_many(const F& f, const Eigen::Ref<const PointArray>& pts) {
  PointArray out(pts.rows(), 3);
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    out.row(i) = f(SpherePoint(pts(i, 0), pts(i, 1), pts(i, 2)));
  return out;
}

template <class F>
Eigen::VectorXd stream_many(const F& f, const Eigen::Ref<const PointArray>& pts) {
  Eigen::VectorXd out(pts.rows());
  for (Eigen::Index i = 0; i < pts.rows(); ++i) out(i) = f(SpherePoint(pts(i, 0), pts(i, 1), pts(i, 2)));
  return out;
}

py::object opt(const std::optional<double>& v) { return v ? py::cast(*v) : py::none(); }

}  // namespace

PYBIND11_MODULE(_divrbf, m) {
  m.doc() = "Divergence-free RBF interpolation on the sphere (direct and RBF-QR)";

  // Leaked on purpose: the translator may run during interpreter shutdown.
  static const py::handle error = py::exception<Error>(m, "DivrbfError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error(std::string(error_code_name(e.code())) + ": " + e.what());
      exc.attr("code") = std::string(error_code_name(e.code()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  // geometry
  m.def("hammersley_nodes", [](std::size_t n) { return from_points(hammersley_nodes(n)); }, py::arg("n"));
  m.def("latlon_grid", [](std::size_t nlat, std::size_t nlon) { return from_points(latlon_grid(nlat, nlon)); },
        py::arg("nlat"), py::arg("nlon"));
  m.def("tangent_frame", [](const Vec3& p) {
    const auto f = tangent_frame(SpherePoint(p));
    return py::make_tuple(f.a, f.b, f.n);
  }, py::arg("p"), "Returns (a, b, n) at p.");
  m.def("min_pairwise_distance", [](const Eigen::Ref<const PointArray>& pts) {
    return min_pairwise_distance(to_points(pts));
  });

  // harmonics
  m.def("scalar_Y", [](int mu, int nu, const Vec3& p) { return scalar_Y({mu, nu}, SpherePoint(p)); },
        py::arg("mu"), py::arg("nu"), py::arg("p"));
  m.def("vsh_vector", [](int mu, int nu, const Vec3& p) { return vsh_vector({mu, nu}, SpherePoint(p)); },
        py::arg("mu"), py::arg("nu"), py::arg("p"));

  // kernels
  m.def("phi", [](const std::string& k, double eps, double r) { return phi(config(k, eps), r); },
        py::arg("kernel"), py::arg("eps"), py::arg("r"));
  m.def("expansion_coeff", [](const std::string& k, double eps, int mu) { return expansion_coeff(config(k, eps), mu); },
        py::arg("kernel"), py::arg("eps"), py::arg("mu"));
  m.def("scaled_expansion_coeff",
        [](const std::string& k, double eps, int mu) { return scaled_expansion_coeff(config(k, eps), mu); },
        py::arg("kernel"), py::arg("eps"), py::arg("mu"));
  m.def("leading_degree", &leading_degree, py::arg("n"));

  // direct method
  m.def("kernel_block", [](const std::string& k, double eps, const Vec3& x, const Vec3& y) {
    return Eigen::Matrix2d(kernel_block(config(k, eps), SpherePoint(x), SpherePoint(y)));
  }, py::arg("kernel"), py::arg("eps"), py::arg("x"), py::arg("y"));
  m.def("assemble_system", [](const std::string& k, double eps, const Eigen::Ref<const PointArray>& nodes) {
    const auto pts = to_points(nodes);
    return assemble_system(config(k, eps), pts);
  }, py::arg("kernel"), py::arg("eps"), py::arg("nodes"));

  py::class_<DirectInterpolant>(m, "DirectInterpolant")
      .def_property_readonly("residual", &DirectInterpolant::residual)
      .def_property_readonly("rcond", &DirectInterpolant::rcond)
      .def("eval", [](const DirectInterpolant& d, const Eigen::Ref<const PointArray>& pts) {
        return eval_many([&](const SpherePoint& x) { return d.eval(x); }, pts);
      }, py::arg("points"))
      .def("stream", [](const DirectInterpolant& d, const Eigen::Ref<const PointArray>& pts) {
        return stream_many([&](const SpherePoint& x) { return d.stream(x); }, pts);
      }, py::arg("points"));
  m.def("fit_direct", [](const std::string& k, double eps, const Eigen::Ref<const PointArray>& nodes,
                         const Eigen::Ref<const PointArray>& field) {
    return fit_direct(config(k, eps), samples(nodes, field));
  }, py::arg("kernel"), py::arg("eps"), py::arg("nodes"), py::arg("field"));

  // RBF-QR
  py::class_<StableBasis, std::shared_ptr<StableBasis>>(m, "StableBasis")
      .def_property_readonly("mu0", [](const StableBasis& b) { return b.plan().mu0; })
      .def_property_readonly("mu_eps", [](const StableBasis& b) { return b.plan().mu_eps; })
      .def_property_readonly("mu_trunc", [](const StableBasis& b) { return b.plan().mu_trunc; })
      .def_property_readonly("m", &StableBasis::m)
      .def_property_readonly("size", &StableBasis::size)
      .def_property_readonly("min_column_ratio", &StableBasis::min_column_ratio)
      .def_property_readonly("trailing", &StableBasis::trailing);
  m.def("build_stable_basis", [](const std::string& k, double eps, const Eigen::Ref<const PointArray>& nodes,
                                 double tol, int mu_max) {
    TruncationOptions o;
    o.tol = tol;
    o.mu_max = mu_max;
    return std::make_shared<StableBasis>(build_stable_basis(config(k, eps), to_points(nodes), o));
  }, py::arg("kernel"), py::arg("eps"), py::arg("nodes"), py::arg("tol") = 1e-16, py::arg("mu_max") = 300);

  py::class_<QRInterpolant>(m, "QRInterpolant")
      .def_property_readonly("residual", &QRInterpolant::residual)
      .def_property_readonly("rcond", &QRInterpolant::rcond)
      .def_property_readonly("harmonic_weights", &QRInterpolant::harmonic_weights)
      .def("eval", [](const QRInterpolant& q, const Eigen::Ref<const PointArray>& pts) {
        return from_vecs(q.eval(to_points(pts)));
      }, py::arg("points"))
      .def("stream", [](const QRInterpolant& q, const Eigen::Ref<const PointArray>& pts) {
        const auto s = q.stream(to_points(pts));
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size())));
      }, py::arg("points"));
  m.def("fit_qr", [](std::shared_ptr<StableBasis> basis, const Eigen::Ref<const PointArray>& field) {
    return fit_qr(basis, samples(from_points(basis->nodes()), field));
  }, py::arg("basis"), py::arg("field"));

  // harness
  py::class_<TargetField>(m, "TargetField")
      .def_readonly("name", &TargetField::name)
      .def("field", [](const TargetField& t, const Eigen::Ref<const PointArray>& pts) {
        return eval_many(t.field, pts);
      }, py::arg("points"))
      .def("stream", [](const TargetField& t, const Eigen::Ref<const PointArray>& pts) {
        return stream_many(t.stream, pts);
      }, py::arg("points"));
  m.def("builtin_target", [](const std::string& name, bool typo) { return builtin_target(name, typo); },
        py::arg("name"), py::arg("literal_typo") = false);
  m.def("geometric_range", &geometric_range, py::arg("lo"), py::arg("hi"), py::arg("count"));

  m.def("run_sweep", [](const std::string& k, std::vector<double> eps, const Eigen::Ref<const PointArray>& nodes,
                        const TargetField& target, const Eigen::Ref<const PointArray>& eval_pts,
                        const std::string& method, double tol, int mu_max) {
    SweepOptions o;
    o.method = parse_method(method);
    o.truncation.tol = tol;
    o.truncation.mu_max = mu_max;
    const auto report = run_sweep(parse_kernel_kind(k), std::move(eps), to_points(nodes), target,
                                  to_points(eval_pts), o);
    py::list rows;
    for (const auto& r : report.rows) {
      py::dict d;
      d["epsilon"] = r.epsilon;
      d["err_field_direct"] = opt(r.err_field_direct);
      d["err_field_qr"] = opt(r.err_field_qr);
      d["err_stream_direct"] = opt(r.err_stream_direct);
      d["err_stream_qr"] = opt(r.err_stream_qr);
      d["cond_direct"] = opt(r.cond_direct);
      d["status_direct"] = r.status_direct;
      d["status_qr"] = r.status_qr;
      rows.append(d);
    }
    return rows;
  }, py::arg("kernel"), py::arg("eps"), py::arg("nodes"), py::arg("target"), py::arg("eval_points"),
     py::arg("method") = "both", py::arg("tol") = 1e-16, py::arg("mu_max") = 300);
}
