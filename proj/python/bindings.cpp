#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bloc/config.hpp"
#include "bloc/krotov.hpp"
#include "bloc/models.hpp"
#include "bloc/run.hpp"
#include "bloc/units.hpp"

namespace py = pybind11;
using namespace bloc;

namespace {

TargetSet targets_from_pairs(
    const std::vector<std::pair<StateVector, StateVector>>& pairs) {
  TargetSet t;
  t.pairs = pairs;
  return t;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Band-limited Krotov optimal control for finite quantum systems";

  m.attr("hartree_cm") = units::hartree_cm;
  m.def("cm_to_hartree", &units::cm_to_hartree);
  m.def("hartree_to_cm", &units::hartree_to_cm);
  m.def("fs_to_au", &units::fs_to_au);
  m.def("au_to_fs", &units::au_to_fs);

  py::class_<TimeGrid>(m, "TimeGrid")
      .def(py::init<int, double>(), py::arg("n_steps"), py::arg("dt"))
      .def_static("from_total_time", &TimeGrid::from_total_time,
                  py::arg("total_time_au"), py::arg("n_steps"))
      .def_readonly("n_steps", &TimeGrid::n_steps)
      .def_readonly("dt", &TimeGrid::dt)
      .def_property_readonly("n_nodes", &TimeGrid::n_nodes)
      .def_property_readonly("total_time", &TimeGrid::total_time)
      .def("nyquist_cm", &TimeGrid::nyquist_cm);

  py::enum_<InteractionKind>(m, "InteractionKind")
      .value("Raman", InteractionKind::Raman)
      .value("Dipole", InteractionKind::Dipole);

  py::class_<SystemModel>(m, "SystemModel")
      .def_readonly("energies", &SystemModel::energies)
      .def_readonly("coupling_op", &SystemModel::coupling_op)
      .def_readonly("kind", &SystemModel::kind)
      .def_readonly("labels", &SystemModel::labels)
      .def_property_readonly("dimension", &SystemModel::dimension)
      .def_property_readonly("field_count", &SystemModel::field_count);

  py::class_<TwoModeParams>(m, "TwoModeParams")
      .def(py::init<>())
      .def_readwrite("nu1_cm", &TwoModeParams::nu1_cm)
      .def_readwrite("nu2_cm", &TwoModeParams::nu2_cm)
      .def_readwrite("d1_cm", &TwoModeParams::d1_cm)
      .def_readwrite("d2_cm", &TwoModeParams::d2_cm)
      .def_readwrite("d12_cm", &TwoModeParams::d12_cm)
      .def_readwrite("n_states", &TwoModeParams::n_states)
      .def_readwrite("alpha_lin1", &TwoModeParams::alpha_lin1)
      .def_readwrite("alpha_lin2", &TwoModeParams::alpha_lin2)
      .def_readwrite("alpha_static", &TwoModeParams::alpha_static)
      .def_readwrite("degeneracy_guard_cm", &TwoModeParams::degeneracy_guard_cm);

  py::class_<QubitBasisMap>(m, "QubitBasisMap")
      .def_readonly("i00", &QubitBasisMap::i00)
      .def_readonly("i01", &QubitBasisMap::i01)
      .def_readonly("i10", &QubitBasisMap::i10)
      .def_readonly("i11", &QubitBasisMap::i11)
      .def("indices", &QubitBasisMap::indices);

  py::class_<RamanSystem>(m, "RamanSystem")
      .def_readonly("model", &RamanSystem::model)
      .def_readonly("qubits", &RamanSystem::qubits);

  m.def("build_two_mode_raman_system", &build_two_mode_raman_system,
        py::arg("params") = TwoModeParams{});
  m.def("build_nlevel_dipole", &build_nlevel_dipole, py::arg("energies_cm"),
        py::arg("dipole"));
  m.def("system_to_json", &system_to_json);
  m.def("system_from_json", &system_from_json);

  py::class_<ControlField>(m, "ControlField")
      .def(py::init([](const RealVector& samples, double carrier_cm, int id) {
             return ControlField{samples, carrier_cm, id};
           }),
           py::arg("samples"), py::arg("carrier_cm") = 0.0, py::arg("id") = 1)
      .def_readwrite("samples", &ControlField::samples)
      .def_readwrite("carrier_cm", &ControlField::carrier_cm)
      .def_readwrite("id", &ControlField::id);

  m.def(
      "gate_targets",
      [](const std::string& gate, const QubitBasisMap& basis, const SystemModel& sys) {
        return gate_targets(parse_gate(gate), basis, sys).pairs;
      },
      py::arg("gate"), py::arg("basis"), py::arg("system"));
  m.def("gaussian_guess", &gaussian_guess, py::arg("carrier_cm"),
        py::arg("amplitude_au"), py::arg("center_au"), py::arg("fwhm_au"),
        py::arg("grid"), py::arg("id") = 1);

  py::class_<SpectralFilter>(m, "SpectralFilter")
      .def_static("all_pass", &SpectralFilter::all_pass)
      .def_static("all_stop", &SpectralFilter::all_stop)
      .def_readonly("mask", &SpectralFilter::mask)
      .def_readonly("complement", &SpectralFilter::complement)
      .def_readonly("windows_cm", &SpectralFilter::windows_cm)
      .def_readonly("edge_width_cm", &SpectralFilter::edge_width_cm)
      .def_readonly("is_all_pass", &SpectralFilter::is_all_pass);

  m.def("band_pass_mask", &band_pass_mask, py::arg("windows_cm"),
        py::arg("edge_width_cm"), py::arg("grid"));
  m.def("complement_mask", &complement_mask);
  m.def("bin_frequency_cm", &bin_frequency_cm);
  m.def("apply_fourier_filter",
        py::overload_cast<const RealVector&, const SpectralFilter&>(&apply_fourier_filter));
  m.def("out_of_band_fraction",
        py::overload_cast<const RealVector&, const SpectralFilter&>(&out_of_band_fraction));
  m.def(
      "power_spectrum",
      [](const ControlField& field, const TimeGrid& grid) {
        const auto pts = power_spectrum(field, grid);
        RealVector nu(pts.size()), power(pts.size());
        for (size_t i = 0; i < pts.size(); ++i) {
          nu[i] = pts[i].nu_cm;
          power[i] = pts[i].power;
        }
        return std::make_pair(nu, power);
      },
      py::arg("field"), py::arg("grid"));

  py::enum_<ShapeForm>(m, "ShapeForm")
      .value("SinSquared", ShapeForm::SinSquared)
      .value("FlatTopCosineEdges", ShapeForm::FlatTopCosineEdges);
  py::class_<ShapeFunction>(m, "ShapeFunction")
      .def_readonly("samples", &ShapeFunction::samples)
      .def_readonly("s_min", &ShapeFunction::s_min);
  m.def("shape_function", &shape_function, py::arg("grid"), py::arg("form"),
        py::arg("s_min") = 1e-3);

  py::class_<PropagatorConfig>(m, "PropagatorConfig")
      .def(py::init<>())
      .def_readwrite("cheb_tolerance", &PropagatorConfig::cheb_tolerance)
      .def_readwrite("spectral_margin", &PropagatorConfig::spectral_margin)
      .def_readwrite("max_order", &PropagatorConfig::max_order);

  m.def(
      "propagate",
      [](const SystemModel& sys, const std::vector<ControlField>& fields,
         const StateVector& psi0, const TimeGrid& grid, const PropagatorConfig& cfg,
         int stride, bool backward) {
        const Trajectory traj = propagate(sys, fields, psi0, grid, cfg, stride, backward);
        return traj.states;
      },
      py::arg("system"), py::arg("fields"), py::arg("psi0"), py::arg("grid"),
      py::arg("config") = PropagatorConfig{}, py::arg("stride") = 1,
      py::arg("backward") = false);

  m.def(
      "gate_yield",
      [](const std::vector<StateVector>& finals,
         const std::vector<std::pair<StateVector, StateVector>>& pairs) {
        const YieldReport r = gate_yield(finals, targets_from_pairs(pairs));
        return py::dict(py::arg("yield_sum_sq") = r.sum_sq,
                        py::arg("avg_fidelity") = r.avg_fidelity,
                        py::arg("phase_fidelity") = r.phase_fidelity);
      },
      py::arg("finals"), py::arg("targets"));

  py::enum_<UpdateOrder>(m, "UpdateOrder")
      .value("Eps1ThenEps2", UpdateOrder::Eps1ThenEps2)
      .value("Eps2ThenEps1", UpdateOrder::Eps2ThenEps1);

  py::class_<KrotovConfig>(m, "KrotovConfig")
      .def(py::init<>())
      .def_readwrite("alpha0", &KrotovConfig::alpha0)
      .def_readwrite("max_iters", &KrotovConfig::max_iters)
      .def_readwrite("yield_target", &KrotovConfig::yield_target)
      .def_readwrite("filters", &KrotovConfig::filters)
      .def_readwrite("shape", &KrotovConfig::shape)
      .def_readwrite("freeze_field", &KrotovConfig::freeze_field)
      .def_readwrite("update_order", &KrotovConfig::update_order)
      .def_readwrite("prop", &KrotovConfig::prop)
      .def_readwrite("monotonic_slack", &KrotovConfig::monotonic_slack)
      .def_readwrite("stagnation_tol", &KrotovConfig::stagnation_tol)
      .def_readwrite("stagnation_window", &KrotovConfig::stagnation_window)
      .def_readwrite("threads", &KrotovConfig::threads);

  py::class_<IterationRecord>(m, "IterationRecord")
      .def_readonly("iter", &IterationRecord::iter)
      .def_readonly("yield_sum_sq", &IterationRecord::yield_sum_sq)
      .def_readonly("avg_fidelity", &IterationRecord::avg_fidelity)
      .def_readonly("phase_fidelity", &IterationRecord::phase_fidelity)
      .def_readonly("out_of_band_fraction", &IterationRecord::out_of_band_fraction)
      .def_readonly("monotonicity_residual", &IterationRecord::monotonicity_residual)
      .def_readonly("field_energy", &IterationRecord::field_energy);

  py::class_<OptimizationResult>(m, "OptimizationResult")
      .def_readonly("final_fields", &OptimizationResult::final_fields)
      .def_readonly("records", &OptimizationResult::records)
      .def_readonly("converged", &OptimizationResult::converged)
      .def_property_readonly("reason", [](const OptimizationResult& r) {
        return termination_reason_name(r.reason);
      });

  m.def(
      "optimize",
      [](const SystemModel& sys,
         const std::vector<std::pair<StateVector, StateVector>>& targets,
         const TimeGrid& grid, const std::vector<ControlField>& guess,
         const KrotovConfig& cfg, const py::object& callback) {
        KrotovProblem problem{sys, targets_from_pairs(targets), grid, guess, cfg};
        IterationCallback cb;
        if (!callback.is_none())
          cb = [&callback](const IterationRecord& rec) { callback(rec); };
        return iterate(problem, cb);
      },
      py::arg("system"), py::arg("targets"), py::arg("grid"), py::arg("guess"),
      py::arg("config"), py::arg("callback") = py::none());
}
