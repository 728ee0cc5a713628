#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tunres/coupling.hpp"
#include "tunres/duffing.hpp"
#include "tunres/em_model.hpp"
#include "tunres/junction.hpp"
#include "tunres/spectro.hpp"
#include "tunres/synth.hpp"

namespace py = pybind11;
using namespace tunres;

PYBIND11_MODULE(_tunres, m) {
  m.doc() = "Tunable CPW resonator design and extraction toolkit";

  // --- em_model ---
  py::class_<em_model::CpwGeometry>(m, "CpwGeometry")
      .def(py::init<double, double, double, double>(), py::arg("center_width"),
           py::arg("gap"), py::arg("length"), py::arg("substrate_eps_r"))
      .def_readwrite("center_width", &em_model::CpwGeometry::center_width)
      .def_readwrite("gap", &em_model::CpwGeometry::gap)
      .def_readwrite("length", &em_model::CpwGeometry::length)
      .def_readwrite("substrate_eps_r",
                     &em_model::CpwGeometry::substrate_eps_r);

  py::class_<em_model::CpwElectrical>(m, "CpwElectrical")
      .def_readonly("z0", &em_model::CpwElectrical::z0)
      .def_readonly("eps_eff", &em_model::CpwElectrical::eps_eff)
      .def_readonly("c0", &em_model::CpwElectrical::c0)
      .def_readonly("l0", &em_model::CpwElectrical::l0)
      .def_readonly("f0", &em_model::CpwElectrical::f0);

  py::class_<em_model::TcFit>(m, "TcFit")
      .def_readonly("tc", &em_model::TcFit::tc)
      .def_readonly("tc_sigma", &em_model::TcFit::tc_sigma)
      .def_readonly("gap0_ev", &em_model::TcFit::gap0_ev)
      .def_readonly("gap0_sigma_ev", &em_model::TcFit::gap0_sigma_ev);

  m.def("elliptic_k", &em_model::elliptic_k, py::arg("k"));
  m.def("cpw_electricals", &em_model::cpw_electricals, py::arg("geometry"),
        py::arg("f0"));
  m.def("quarter_wave_f0", &em_model::quarter_wave_f0, py::arg("geometry"),
        py::arg("eps_eff"));
  m.def("kinetic_fraction", &em_model::kinetic_fraction, py::arg("f_meas"),
        py::arg("f_design"));
  m.def("two_fluid_shift", &em_model::two_fluid_shift, py::arg("temp_k"),
        py::arg("tc_k"), py::arg("alpha_k"));
  m.def(
      "fit_tc",
      [](const std::vector<double>& temps, const std::vector<double>& shifts,
         double alpha_k) { return em_model::fit_tc(temps, shifts, alpha_k); },
      py::arg("temps"), py::arg("shifts"), py::arg("alpha_k"));

  // --- junction ---
  py::class_<junction::TunableResonator>(m, "TunableResonator")
      .def(py::init<>())
      .def_readwrite("cpw", &junction::TunableResonator::cpw)
      .def_readwrite("lk_total", &junction::TunableResonator::lk_total)
      .def_readwrite("lj", &junction::TunableResonator::lj)
      .def_readwrite("junction_position",
                     &junction::TunableResonator::junction_position);

  m.def("lj_from_ic",
        [](double ic) { return junction::lj_from_ic(ic).lj; },
        py::arg("ic"));
  m.def("ic_from_lj",
        [](double lj) { return junction::ic_from_lj(lj).ic; },
        py::arg("lj"));
  m.def("loaded_f0", &junction::loaded_f0, py::arg("resonator"));
  m.def("tunable_frequency", &junction::tunable_frequency,
        py::arg("resonator"));
  m.def("lj_from_frequency", &junction::lj_from_frequency,
        py::arg("resonator"), py::arg("f_r"));
  m.def("participation", &junction::participation, py::arg("lj"),
        py::arg("l0"), py::arg("lk"));
  m.def("positioned_frequency", &junction::positioned_frequency,
        py::arg("resonator"));

  // --- spectro ---
  py::class_<spectro::NotchModel>(m, "NotchModel")
      .def(py::init([](double f_r, double q_l, double q_ext_mag, double phi,
                       double amp, double phase0, double delay) {
             return spectro::NotchModel{f_r, q_l, q_ext_mag, phi,
                                        amp, phase0, delay};
           }),
           py::arg("f_r"), py::arg("q_l"), py::arg("q_ext_mag"),
           py::arg("phi") = 0.0, py::arg("amp") = 1.0,
           py::arg("phase0") = 0.0, py::arg("delay") = 0.0)
      .def_readwrite("f_r", &spectro::NotchModel::f_r)
      .def_readwrite("q_l", &spectro::NotchModel::q_l)
      .def_readwrite("q_ext_mag", &spectro::NotchModel::q_ext_mag)
      .def_readwrite("phi", &spectro::NotchModel::phi)
      .def_readwrite("amp", &spectro::NotchModel::amp)
      .def_readwrite("phase0", &spectro::NotchModel::phase0)
      .def_readwrite("delay", &spectro::NotchModel::delay);

  py::class_<spectro::ResonanceFit>(m, "ResonanceFit")
      .def_readonly("model", &spectro::ResonanceFit::model)
      .def_readonly("q_int", &spectro::ResonanceFit::q_int)
      .def_readonly("f_r_sigma", &spectro::ResonanceFit::f_r_sigma)
      .def_readonly("q_l_sigma", &spectro::ResonanceFit::q_l_sigma)
      .def_readonly("q_ext_sigma", &spectro::ResonanceFit::q_ext_sigma)
      .def_readonly("q_int_sigma", &spectro::ResonanceFit::q_int_sigma)
      .def_readonly("phi_sigma", &spectro::ResonanceFit::phi_sigma)
      .def_readonly("residual_rms", &spectro::ResonanceFit::residual_rms)
      .def_readonly("delay_fixed", &spectro::ResonanceFit::delay_fixed);

  m.def("notch_s21", &spectro::notch_s21, py::arg("model"), py::arg("f"));
  m.def(
      "circle_fit",
      [](const std::vector<double>& freq,
         const std::vector<std::complex<double>>& s21) {
        spectro::ComplexTrace tr;
        tr.freq = freq;
        tr.s21 = s21;
        return spectro::circle_fit(tr);
      },
      py::arg("freq"), py::arg("s21"));
  m.def("photon_number", &spectro::photon_number, py::arg("p_in_dbm"),
        py::arg("fit"));

  // --- duffing ---
  py::enum_<duffing::Regime>(m, "Regime")
      .value("above", duffing::Regime::above)
      .value("below", duffing::Regime::below);
  py::enum_<duffing::Eq2Exponent>(m, "Eq2Exponent")
      .value("three_halves", duffing::Eq2Exponent::three_halves)
      .value("printed_two_thirds", duffing::Eq2Exponent::printed_two_thirds);

  m.def("steady_amplitudes", &duffing::steady_amplitudes, py::arg("omega"),
        py::arg("p_rel"));
  m.def("bifurcation_locus", &duffing::bifurcation_locus, py::arg("omega"));
  m.def("universal_curve", &duffing::universal_curve, py::arg("omega"),
        py::arg("regime"),
        py::arg("exponent") = duffing::Eq2Exponent::three_halves);
  m.def(
      "extract_fb",
      [](const std::vector<double>& freqs, const std::vector<double>& mag) {
        auto r = duffing::extract_fb(freqs, mag);
        return py::make_tuple(r.f_b, r.strength, r.jump);
      },
      py::arg("freqs"), py::arg("mag"));
  m.def(
      "rescale",
      [](double f_b, double p_dbm, double f_r, double q_l, double p_c_dbm) {
        auto pt = duffing::rescale(f_b, p_dbm, {f_r, q_l, p_c_dbm});
        return py::make_tuple(pt.omega, pt.p_rel);
      },
      py::arg("f_b"), py::arg("p_dbm"), py::arg("f_r"), py::arg("q_l"),
      py::arg("p_c_dbm"));

  // --- coupling ---
  py::enum_<coupling::Coefficient>(m, "Coefficient")
      .value("half", coupling::Coefficient::half)
      .value("quarter", coupling::Coefficient::quarter);

  py::class_<coupling::CrossingModel>(m, "CrossingModel")
      .def(py::init([](double f1, double slope, double v_cross, double g_2pi,
                       coupling::Coefficient coeff) {
             return coupling::CrossingModel{f1, slope, v_cross, g_2pi, coeff};
           }),
           py::arg("f1"), py::arg("slope"), py::arg("v_cross"),
           py::arg("g_2pi"),
           py::arg("coefficient") = coupling::Coefficient::half)
      .def_readwrite("f1", &coupling::CrossingModel::f1)
      .def_readwrite("slope", &coupling::CrossingModel::slope)
      .def_readwrite("v_cross", &coupling::CrossingModel::v_cross)
      .def_readwrite("g_2pi", &coupling::CrossingModel::g_2pi)
      .def_readwrite("coefficient", &coupling::CrossingModel::coefficient);

  py::class_<coupling::CrossingFit>(m, "CrossingFit")
      .def_readonly("model", &coupling::CrossingFit::model)
      .def_readonly("f1_sigma", &coupling::CrossingFit::f1_sigma)
      .def_readonly("slope_sigma", &coupling::CrossingFit::slope_sigma)
      .def_readonly("v_cross_sigma", &coupling::CrossingFit::v_cross_sigma)
      .def_readonly("g_sigma", &coupling::CrossingFit::g_sigma)
      .def_readonly("one_sided", &coupling::CrossingFit::one_sided);

  m.def("branch_frequencies", &coupling::branch_frequencies, py::arg("model"),
        py::arg("v"));
  m.def(
      "fit_crossing",
      [](const std::vector<double>& gate_v, const std::vector<double>& f_plus,
         const std::vector<double>& f_minus, coupling::Coefficient coeff) {
        coupling::CrossingData data{gate_v, f_plus, f_minus};
        return coupling::fit_crossing(data, coeff);
      },
      py::arg("gate_v"), py::arg("f_plus"), py::arg("f_minus"),
      py::arg("coefficient") = coupling::Coefficient::half);
  m.def(
      "detuning_metrics",
      [](const std::vector<double>& gate_v, const std::vector<double>& f_plus,
         const std::vector<double>& f_minus) {
        coupling::CrossingData data{gate_v, f_plus, f_minus};
        auto met = coupling::detuning_metrics(data);
        return py::make_tuple(met.min_delta, met.on_off_high_side,
                              met.on_off_low_side);
      },
      py::arg("gate_v"), py::arg("f_plus"), py::arg("f_minus"));

  // --- synth ---
  m.def("linspace", &synth::linspace, py::arg("lo"), py::arg("hi"),
        py::arg("n"));
  m.def(
      "synth_notch",
      [](const spectro::NotchModel& model, const std::vector<double>& freqs,
         std::uint64_t seed, double sigma) {
        auto tr = synth::synth_notch(model, freqs, {seed, sigma});
        return py::make_tuple(tr.freq, tr.s21);
      },
      py::arg("model"), py::arg("freqs"), py::arg("seed") = 0,
      py::arg("sigma") = 0.0);
  m.def(
      "synth_crossing",
      [](const coupling::CrossingModel& model,
         const std::vector<double>& gate_v, std::uint64_t seed,
         double sigma_hz) {
        auto data = synth::synth_crossing(model, gate_v, seed, sigma_hz);
        return py::make_tuple(data.gate_v, data.f_plus, data.f_minus);
      },
      py::arg("model"), py::arg("gate_v"), py::arg("seed") = 0,
      py::arg("sigma_hz") = 0.0);
  m.def("synth_tsweep",
        [](double tc, double alpha_k, const std::vector<double>& temps,
           std::uint64_t seed, double sigma) {
          return synth::synth_tsweep(tc, alpha_k, temps, {seed, sigma});
        },
        py::arg("tc"), py::arg("alpha_k"), py::arg("temps"),
        py::arg("seed") = 0, py::arg("sigma") = 0.0);
}
