#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "heatframe/cli.hpp"
#include "heatframe/errors.hpp"
#include "heatframe/geometry.hpp"
#include "heatframe/heat.hpp"
#include "heatframe/jacobi.hpp"
#include "heatframe/nets.hpp"
#include "heatframe/operators.hpp"

namespace py = pybind11;
using namespace heatframe;

namespace {

RunConfig make_config(double gamma, double alpha, std::size_t nodes, std::size_t degree, double t,
                      double delta, std::uint64_t seed) {
  RunConfig c;
  c.gamma = gamma;
  c.alpha = alpha;
  c.nodes = nodes;
  c.degree = degree;
  c.t = t;
  c.delta = delta;
  c.seed = seed;
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ExactnessError>(m, "ExactnessError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);

  m.def("eigenvalue", [](std::size_t i, double gamma, double alpha) {
    return eigenvalue(i, {gamma, alpha});
  }, py::arg("i"), py::arg("gamma") = 0.0, py::arg("alpha") = 0.0);

  m.def("quadrature", [](double gamma, double alpha, std::size_t nodes) {
    const auto s = make_jacobi_space(gamma, alpha, nodes);
    return py::make_tuple(s.points(), s.weights());
  }, py::arg("gamma"), py::arg("alpha"), py::arg("nodes"));

  m.def("heat_kernel", [](double gamma, double alpha, std::size_t nodes, std::size_t degree, double t) {
    const auto s = make_jacobi_space(gamma, alpha, nodes);
    return heat_kernel(build_basis(s, degree), t).table;
  }, py::arg("gamma"), py::arg("alpha"), py::arg("nodes"), py::arg("degree"), py::arg("t"));

  m.def("net", [](double gamma, double alpha, std::size_t nodes, double delta) {
    const auto s = make_jacobi_space(gamma, alpha, nodes);
    const Net net = build_partition(s, build_maximal_net(s, delta));
    return py::make_tuple(net.centers, net.assignment, net.cell_masses(s));
  }, py::arg("gamma"), py::arg("alpha"), py::arg("nodes"), py::arg("delta"));

  m.def("band_energies", [](double gamma, double alpha, std::size_t nodes, std::size_t degree,
                            double delta, const Eigen::VectorXd& f) {
    const auto s = make_jacobi_space(gamma, alpha, nodes);
    const auto basis = build_basis(s, degree);
    const Net net = build_partition(s, build_maximal_net(s, delta));
    const auto dec = band_decompose(s, basis, net, f);
    return py::make_tuple(dec.block_energies, dec.reconstruction, dec.frame_ratio);
  }, py::arg("gamma"), py::arg("alpha"), py::arg("nodes"), py::arg("degree"), py::arg("delta"),
     py::arg("f"));

  m.def("verify_json", [](double gamma, double alpha, std::size_t nodes, std::size_t degree, double t,
                          double delta, std::uint64_t seed) {
    return verify_document(make_config(gamma, alpha, nodes, degree, t, delta, seed)).dump(2);
  }, py::arg("gamma") = 0.0, py::arg("alpha") = 0.0, py::arg("nodes") = 64, py::arg("degree") = 40,
     py::arg("t") = 0.5, py::arg("delta") = 0.2, py::arg("seed") = 1);
}
