#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tunres/constants.hpp"
#include "tunres/coupling.hpp"
#include "tunres/duffing.hpp"
#include "tunres/em_model.hpp"
#include "tunres/fitcore.hpp"
#include "tunres/junction.hpp"
#include "tunres/spectro.hpp"
#include "tunres/synth.hpp"
#include "tunres/trace_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tunres;

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

struct GlobalOpts {
  std::string config;
  std::string out_dir;
  std::uint64_t seed = 1;
  std::string eq2_exponent = "3/2";
  std::string crossing_coefficient = "half";
};

duffing::Eq2Exponent eq2_of(const GlobalOpts& g) {
  return g.eq2_exponent == "2/3" ? duffing::Eq2Exponent::printed_two_thirds
                                 : duffing::Eq2Exponent::three_halves;
}

coupling::Coefficient coeff_of(const GlobalOpts& g) {
  return g.crossing_coefficient == "quarter" ? coupling::Coefficient::quarter
                                             : coupling::Coefficient::half;
}

std::ostream& open_sink(const GlobalOpts& g, const std::string& name,
                        std::ofstream& file) {
  if (g.out_dir.empty()) return std::cout;
  fs::create_directories(g.out_dir);
  fs::path p = fs::path(g.out_dir) / name;
  file.open(p);
  if (!file) throw std::runtime_error("cannot write " + p.string());
  return file;
}

json load_config(const GlobalOpts& g) {
  if (g.config.empty()) return json::object();
  std::ifstream in(g.config);
  if (!in) throw std::invalid_argument("cannot open config " + g.config);
  json j;
  in >> j;
  return j;
}

std::string fixtures_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("TUNRES_FIXTURES")) return env;
  return "fixtures";
}

json fit_to_json(const spectro::ResonanceFit& fit) {
  return json{{"f_r_hz", fit.model.f_r},
              {"f_r_sigma_hz", fit.f_r_sigma},
              {"q_l", fit.model.q_l},
              {"q_l_sigma", fit.q_l_sigma},
              {"q_ext_mag", fit.model.q_ext_mag},
              {"q_ext_sigma", fit.q_ext_sigma},
              {"q_int", fit.q_int},
              {"q_int_sigma", fit.q_int_sigma},
              {"phi_rad", fit.model.phi},
              {"phi_sigma_rad", fit.phi_sigma},
              {"amp", fit.model.amp},
              {"phase0_rad", fit.model.phase0},
              {"delay_s", fit.model.delay},
              {"delay_fixed", fit.delay_fixed},
              {"residual_rms", fit.residual_rms}};
}

int run_cpw(const GlobalOpts& g, double w_um, double s_um, double eps_r,
            double l_mm, double f0_ghz) {
  em_model::CpwGeometry geom{w_um * 1e-6, s_um * 1e-6, l_mm * 1e-3, eps_r};
  double eps_eff = 0.5 * (eps_r + 1.0);
  double f0 = f0_ghz > 0.0 ? f0_ghz * 1e9
                           : em_model::quarter_wave_f0(geom, eps_eff);
  auto cpw = em_model::cpw_electricals(geom, f0);
  std::ofstream file;
  auto& out = open_sink(g, "cpw.csv", file);
  out << "length_mm,f0_ghz,z0_ohm,eps_eff,c0_pf,l0_nh\n";
  out.precision(10);
  out << l_mm << "," << cpw.f0 / 1e9 << "," << cpw.z0 << "," << cpw.eps_eff
      << "," << cpw.c0 * 1e12 << "," << cpw.l0 * 1e9 << "\n";
  return 0;
}

int run_kinetic(const GlobalOpts& g, double f_meas_ghz, double f_design_ghz,
                double w_um, double s_um, double eps_r, double l_mm,
                const std::string& tsweep_path) {
  em_model::CpwGeometry geom{w_um * 1e-6, s_um * 1e-6, l_mm * 1e-3, eps_r};
  double alpha = em_model::kinetic_fraction(f_meas_ghz * 1e9,
                                            f_design_ghz * 1e9);
  auto cpw = em_model::cpw_electricals(geom, f_design_ghz * 1e9);
  auto film = em_model::lk_decompose(alpha, cpw, geom);
  json j{{"alpha_k", alpha},
         {"lk_total_nh", film.lk_total * 1e9},
         {"lk_per_square_ph", film.lk_per_square * 1e12}};
  if (!tsweep_path.empty()) {
    std::vector<double> temps, shifts;
    trace_io::read_tsweep(tsweep_path, temps, shifts);
    auto fit = em_model::fit_tc(temps, shifts, alpha);
    j["tc_k"] = fit.tc;
    j["tc_sigma_k"] = fit.tc_sigma;
    j["gap_uev"] = fit.gap0_ev * 1e6;
    j["gap_sigma_uev"] = fit.gap0_sigma_ev * 1e6;
  }
  std::ofstream file;
  open_sink(g, "kinetic.json", file) << j.dump(2) << "\n";
  return 0;
}

junction::TunableResonator resonator_from_config(const json& c) {
  double f0 = c.value("f0_ghz", 7.111) * 1e9;
  double z0 = c.value("z0_ohm", 48.43);
  double w0 = 2.0 * constants::pi * f0;
  double c0 = constants::pi / (4.0 * z0 * w0);
  em_model::CpwElectrical cpw{z0, 0.5 * (c.value("eps_r", 12.4) + 1.0), c0,
                              1.0 / (w0 * w0 * c0), f0};
  if (c.contains("l0_nh")) {
    cpw.l0 = c["l0_nh"].get<double>() * 1e-9;
    cpw.c0 = 1.0 / (w0 * w0 * cpw.l0);
  }
  junction::TunableResonator res;
  res.cpw = cpw;
  res.lk_total = c.value("lk_nh", 0.0) * 1e-9;
  res.junction_position = c.value("position", 0.0);
  return res;
}

int run_tune(const GlobalOpts& g) {
  json c = load_config(g);
  auto res = resonator_from_config(c);
  double lj_max = c.value("lj_max_nh", 3.0) * 1e-9;
  int steps = c.value("steps", 61);
  std::ofstream file;
  auto& out = open_sink(g, "tune.csv", file);
  out << "lj_nh,f_r_ghz,p_j\n";
  out.precision(10);
  for (int i = 0; i < steps; ++i) {
    res.lj = lj_max * i / (steps - 1);
    double f = res.junction_position == 0.0
                   ? junction::tunable_frequency(res)
                   : junction::positioned_frequency(res);
    double pj = junction::participation(res.lj, res.cpw.l0, res.lk_total);
    out << res.lj * 1e9 << "," << f / 1e9 << "," << pj << "\n";
  }
  return 0;
}

int run_position(const GlobalOpts& g) {
  json c = load_config(g);
  auto res = resonator_from_config(c);
  double lj_max = c.value("lj_max_nh", 3.0) * 1e-9;
  std::vector<double> positions =
      c.value("positions", std::vector<double>{0.0, 0.5, 0.9});
  std::ofstream file;
  auto& out = open_sink(g, "position.csv", file);
  out << "position,f_max_ghz,f_min_ghz,range_ghz\n";
  out.precision(10);
  for (double d : positions) {
    res.junction_position = d;
    res.lj = 0.0;
    double f_hi = junction::positioned_frequency(res);
    res.lj = lj_max;
    double f_lo = junction::positioned_frequency(res);
    out << d << "," << f_hi / 1e9 << "," << f_lo / 1e9 << ","
        << (f_hi - f_lo) / 1e9 << "\n";
  }
  return 0;
}

int run_circlefit(const GlobalOpts& g, const std::string& in_path) {
  auto trace = trace_io::read_trace(in_path);
  auto fit = spectro::circle_fit(trace);
  json j = fit_to_json(fit);
  if (trace.meta.power_dbm) {
    j["power_dbm"] = *trace.meta.power_dbm;
    j["photon_number"] = spectro::photon_number(*trace.meta.power_dbm, fit);
  }
  if (trace.meta.gate_v) j["gate_v"] = *trace.meta.gate_v;
  if (trace.meta.temp_k) j["temp_k"] = *trace.meta.temp_k;
  std::ofstream file;
  open_sink(g, "circlefit.json", file) << j.dump(2) << "\n";
  return 0;
}

int run_duffing_synth(const GlobalOpts& g, double fr_ghz, double ql,
                      double pc_dbm, double qe, double pmin, double pmax,
                      double pstep, int points, double span_mhz,
                      double sigma) {
  duffing::SweepModel model{{fr_ghz * 1e9, ql, pc_dbm},
                            qe > 0.0 ? qe : 2.0 * ql, 0.0, 1.0};
  synth::FrequencyGrid grid{fr_ghz * 1e9, span_mhz * 1e6, points};
  auto stack = synth::synth_duffing_stack(model, pmin, pmax, pstep, grid,
                                          {g.seed, sigma});
  std::string path = g.out_dir.empty()
                         ? "stack.csv"
                         : (fs::path(g.out_dir) / "stack.csv").string();
  if (!g.out_dir.empty()) fs::create_directories(g.out_dir);
  trace_io::write_stack(path, stack);
  std::cout << "wrote " << path << " (" << stack.size() << " powers)\n";
  return 0;
}

int run_duffing_extract(const GlobalOpts& g, const std::string& in_path,
                        double fr_ghz, double ql) {
  auto stack = trace_io::read_stack(in_path);
  auto pc = duffing::extract_pc(stack);
  json j{{"p_c_dbm", pc.p_c_dbm},
         {"bifurcated", pc.bifurcated},
         {"edge_warning", pc.edge_warning}};
  json fb = json::array();
  for (std::size_t k = 0; k < pc.f_b.size(); ++k)
    fb.push_back({{"power_dbm", pc.powers_dbm[k]},
                  {"f_b_hz", pc.f_b[k]},
                  {"jump", static_cast<bool>(pc.jump[k])}});
  j["f_b_by_power"] = fb;
  if (fr_ghz > 0.0 && ql > 0.0 && pc.bifurcated) {
    duffing::DuffingParams params{fr_ghz * 1e9, ql, pc.p_c_dbm};
    json pts = json::array();
    for (std::size_t k = 0; k < pc.f_b.size(); ++k) {
      auto rp = duffing::rescale(pc.f_b[k], pc.powers_dbm[k], params);
      pts.push_back({{"omega", rp.omega}, {"p_rel", rp.p_rel}});
    }
    j["omega_points"] = pts;
  }
  std::ofstream file;
  open_sink(g, "duffing_extract.json", file) << j.dump(2) << "\n";
  return 0;
}

int run_duffing_curve(const GlobalOpts& g, double omega) {
  std::ofstream file;
  auto& out = open_sink(g, "curve.txt", file);
  out.precision(10);
  if (omega > kSqrt3) {
    auto [lo, hi] = duffing::universal_curve(omega, duffing::Regime::above,
                                             eq2_of(g));
    out << lo << "\n" << hi << "\n";
  } else {
    auto [lo, hi] = duffing::universal_curve(omega, duffing::Regime::below);
    (void)hi;
    out << lo << "\n";
  }
  return 0;
}

int run_crossing_synth(const GlobalOpts& g, double f1_ghz, double slope_ghz_v,
                       double v_cross, double g_mhz, double vmin, double vmax,
                       int n, double sigma_mhz) {
  coupling::CrossingModel model{f1_ghz * 1e9, slope_ghz_v * 1e9, v_cross,
                                g_mhz * 1e6, coeff_of(g)};
  auto data = synth::synth_crossing(model, synth::linspace(vmin, vmax, n),
                                    g.seed, sigma_mhz * 1e6);
  std::string path = g.out_dir.empty()
                         ? "crossing.csv"
                         : (fs::path(g.out_dir) / "crossing.csv").string();
  if (!g.out_dir.empty()) fs::create_directories(g.out_dir);
  trace_io::write_crossing(path, data);
  std::cout << "wrote " << path << "\n";
  return 0;
}

int run_crossing_fit(const GlobalOpts& g, const std::string& in_path) {
  auto data = trace_io::read_crossing(in_path);
  auto fit = coupling::fit_crossing(data, coeff_of(g));
  auto metrics = coupling::detuning_metrics(data);
  json j{{"f1_hz", fit.model.f1},
         {"f1_sigma_hz", fit.f1_sigma},
         {"slope_hz_per_v", fit.model.slope},
         {"slope_sigma_hz_per_v", fit.slope_sigma},
         {"v_cross", fit.model.v_cross},
         {"v_cross_sigma", fit.v_cross_sigma},
         {"g_2pi_hz", fit.model.g_2pi},
         {"g_sigma_hz", fit.g_sigma},
         {"one_sided", fit.one_sided},
         {"min_delta_hz", metrics.min_delta},
         {"on_off_high_side", metrics.on_off_high_side},
         {"on_off_low_side", metrics.on_off_low_side},
         {"residuals_hz", fit.residuals_hz}};
  std::ofstream file;
  open_sink(g, "crossing_fit.json", file) << j.dump(2) << "\n";
  return 0;
}

struct Check {
  std::string name;
  bool pass;
};

int run_repro(const std::string& fixtures_flag) {
  std::string dir = fixtures_dir(fixtures_flag);
  std::vector<Check> checks;
  auto add = [&](const std::string& name, bool ok) {
    checks.push_back({name, ok});
    std::cout << (ok ? "PASS" : "FAIL") << "  " << name << "\n";
  };

  // Conformal mapping against the reference impedance.
  em_model::CpwGeometry g35{35e-6, 20e-6, 4.136e-3, 12.4};
  auto cpw = em_model::cpw_electricals(g35, 7.111e9);
  add("conformal mapping Z0 within 0.5%",
      std::abs(cpw.z0 - 48.430) / 48.430 < 0.005);

  // Design-table closure from the fixtures.
  {
    std::ifstream in(fs::path(dir) / "table1.csv");
    bool ok = static_cast<bool>(in);
    std::string line;
    bool header = true;
    while (ok && std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (header) {
        header = false;
        continue;
      }
      std::stringstream ss(line);
      std::string name, tok;
      std::getline(ss, name, ',');
      double vals[4];
      for (double& v : vals) {
        std::getline(ss, tok, ',');
        v = std::stod(tok);
      }
      double l_mm = vals[0], f0_ghz = vals[1], c0_pf = vals[2],
             l0_nh = vals[3];
      auto e = em_model::cpw_electricals({35e-6, 20e-6, l_mm * 1e-3, 12.4},
                                         f0_ghz * 1e9);
      ok = ok && std::abs(e.c0 * 1e12 - c0_pf) / c0_pf < 0.01;
      ok = ok && std::abs(e.l0 * 1e9 - l0_nh) / l0_nh < 0.01;
      double fq = em_model::quarter_wave_f0({35e-6, 20e-6, l_mm * 1e-3, 12.4},
                                            e.eps_eff);
      ok = ok && std::abs(fq - f0_ghz * 1e9) / fq < 0.025;
    }
    add("design table closure (C0, L0 within 1%; f0 within 2.5%)", ok);
  }

  // Kinetic chain scalars.
  double alpha = em_model::kinetic_fraction(6.204e9, 6.491e9);
  auto cpw_r3 = em_model::cpw_electricals({35e-6, 20e-6, 4.536e-3, 12.4},
                                          6.491e9);
  auto film = em_model::lk_decompose(alpha, cpw_r3,
                                     {35e-6, 20e-6, 4.536e-3, 12.4});
  add("kinetic fraction matches 0.0867 within 0.3%",
      std::abs(alpha - 0.0867) / 0.0867 < 3e-3);
  add("per-square kinetic inductance within 10% of 1.012 pH",
      std::abs(film.lk_per_square * 1e12 - 1.012) / 1.012 < 0.10);

  // Universal curve vs the double-root locus.
  bool curve_ok = true;
  for (double om : {1.7400254037844388, 2.0, 3.0, 7.0, 20.0}) {
    auto [ll, lu] = duffing::bifurcation_locus(om);
    auto [cl, cu] =
        duffing::universal_curve(om, duffing::Regime::above);
    curve_ok = curve_ok && std::abs(cl - ll) / ll < 1e-12 &&
               std::abs(cu - lu) / lu < 1e-12;
  }
  add("universal curve matches fold locus to 1e-12", curve_ok);

  // Tuning solver scalars.
  junction::TunableResonator res{cpw, 0.131e-9, 1.222e-9, 0.0};
  double f = junction::tunable_frequency(res);
  double lj_back = junction::lj_from_frequency(res, f);
  add("inverse tuning round trip within 1e-9",
      std::abs(lj_back - res.lj) / res.lj < 1e-9);
  add("participation 44.72% +- 0.01%",
      std::abs(junction::participation(1.222e-9, 1.380e-9, 0.131e-9) -
               0.4472) < 1e-4);
  res.lj = 1.3e-9;
  add("tuning range >= 2 GHz up to 1.3 nH",
      junction::loaded_f0(res) - junction::tunable_frequency(res) >= 2e9);

  // Detuning fixture ratios.
  {
    bool ok = true;
    try {
      auto data =
          trace_io::read_crossing((fs::path(dir) / "detuning.csv").string());
      auto m = coupling::detuning_metrics(data);
      ok = std::abs(std::round(m.on_off_high_side * 100.0) / 100.0 - 8.47) <
               1e-9 &&
           std::abs(std::round(m.on_off_low_side * 100.0) / 100.0 - 16.27) <
               1e-9;
    } catch (const std::exception&) {
      ok = false;
    }
    add("on/off coupling ratios 8.47 and 16.27", ok);
  }

  bool all = true;
  for (const auto& c : checks) all = all && c.pass;
  std::cout << (all ? "repro: all checks passed" : "repro: FAILURES") << "\n";
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tunable superconducting resonator toolkit"};
  app.require_subcommand(1);
  GlobalOpts g;
  app.add_option("--config", g.config, "JSON config path");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--seed", g.seed, "RNG seed");
  app.add_option("--eq2-exponent", g.eq2_exponent,
                 "universal-curve exponent: 3/2 or 2/3")
      ->check(CLI::IsMember({"3/2", "2/3"}));
  app.add_option("--crossing-coefficient", g.crossing_coefficient,
                 "detuning coefficient: half or quarter")
      ->check(CLI::IsMember({"half", "quarter"}));

  // cpw
  auto* cpw = app.add_subcommand("cpw", "design electricals from geometry");
  double w_um = 35.0, s_um = 20.0, eps_r = 12.4, l_mm = 4.136, f0_ghz = 0.0;
  cpw->add_option("--w-um", w_um, "center width [um]");
  cpw->add_option("--s-um", s_um, "gap [um]");
  cpw->add_option("--eps-r", eps_r, "substrate permittivity");
  cpw->add_option("--l-mm", l_mm, "length [mm]");
  cpw->add_option("--f0-ghz", f0_ghz, "override f0 (default: quarter-wave)");

  // kinetic
  auto* kin = app.add_subcommand("kinetic", "kinetic-inductance chain");
  double f_meas = 6.204, f_design = 6.491, kl_mm = 4.536;
  std::string tsweep_path;
  kin->add_option("--f-meas-ghz", f_meas, "measured base frequency");
  kin->add_option("--f-design-ghz", f_design, "design frequency");
  kin->add_option("--l-mm", kl_mm, "length [mm]");
  kin->add_option("--w-um", w_um, "center width [um]");
  kin->add_option("--s-um", s_um, "gap [um]");
  kin->add_option("--eps-r", eps_r, "substrate permittivity");
  kin->add_option("--tsweep", tsweep_path, "temperature sweep CSV to fit");

  auto* tune = app.add_subcommand("tune", "LJ -> f_r sweep table");
  auto* position = app.add_subcommand("position", "junction position study");

  auto* cfit = app.add_subcommand("circlefit", "fit a trace CSV");
  std::string in_path;
  cfit->add_option("--in", in_path, "trace CSV")->required();

  auto* duf = app.add_subcommand("duffing", "Duffing tools");
  duf->require_subcommand(1);
  auto* dsynth = duf->add_subcommand("synth", "synthesize a power stack");
  double dfr = 6.113, dql = 536.0, dpc = -65.6, dqe = 0.0;
  double pmin = -76.0, pmax = -56.0, pstep = 0.1, span_mhz = 100.0,
         sigma = 0.01;
  int points = 1201;
  dsynth->add_option("--fr-ghz", dfr);
  dsynth->add_option("--ql", dql);
  dsynth->add_option("--pc-dbm", dpc);
  dsynth->add_option("--qe", dqe, "default 2*QL");
  dsynth->add_option("--pmin", pmin);
  dsynth->add_option("--pmax", pmax);
  dsynth->add_option("--pstep", pstep);
  dsynth->add_option("--points", points);
  dsynth->add_option("--span-mhz", span_mhz);
  dsynth->add_option("--sigma", sigma, "per-quadrature noise");
  auto* dextract = duf->add_subcommand("extract", "extract P_C from a stack");
  std::string stack_path;
  double efr = 0.0, eql = 0.0;
  dextract->add_option("--in", stack_path, "stack CSV")->required();
  dextract->add_option("--fr-ghz", efr, "linear f_r for rescaling");
  dextract->add_option("--ql", eql, "loaded Q for rescaling");
  auto* dcurve = duf->add_subcommand("curve", "universal curve values");
  double omega = 2.0;
  dcurve->add_option("--omega", omega)->required();

  auto* cross = app.add_subcommand("crossing", "avoided-crossing tools");
  cross->require_subcommand(1);
  auto* csynth = cross->add_subcommand("synth", "synthesize branch data");
  double f1 = 5.427, slope = 0.628, v_cross = 1.0, g_mhz = 51.203;
  double vmin = 0.0, vmax = 2.0, sigma_mhz = 1.0;
  int nv = 41;
  csynth->add_option("--f1-ghz", f1);
  csynth->add_option("--slope-ghz-v", slope);
  csynth->add_option("--v-cross", v_cross);
  csynth->add_option("--g-mhz", g_mhz);
  csynth->add_option("--vmin", vmin);
  csynth->add_option("--vmax", vmax);
  csynth->add_option("--n", nv);
  csynth->add_option("--sigma-mhz", sigma_mhz);
  auto* cfit2 = cross->add_subcommand("fit", "fit branch data");
  std::string cross_path;
  cfit2->add_option("--in", cross_path, "crossing CSV")->required();

  auto* repro = app.add_subcommand("repro", "fixture regression checks");
  std::string fixtures_flag;
  repro->add_option("--fixtures", fixtures_flag, "fixtures directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (cpw->parsed()) return run_cpw(g, w_um, s_um, eps_r, l_mm, f0_ghz);
    if (kin->parsed())
      return run_kinetic(g, f_meas, f_design, w_um, s_um, eps_r, kl_mm,
                         tsweep_path);
    if (tune->parsed()) return run_tune(g);
    if (position->parsed()) return run_position(g);
    if (cfit->parsed()) return run_circlefit(g, in_path);
    if (duf->parsed()) {
      if (dsynth->parsed())
        return run_duffing_synth(g, dfr, dql, dpc, dqe, pmin, pmax, pstep,
                                 points, span_mhz, sigma);
      if (dextract->parsed())
        return run_duffing_extract(g, stack_path, efr, eql);
      if (dcurve->parsed()) return run_duffing_curve(g, omega);
    }
    if (cross->parsed()) {
      if (csynth->parsed())
        return run_crossing_synth(g, f1, slope, v_cross, g_mhz, vmin, vmax,
                                  nv, sigma_mhz);
      if (cfit2->parsed()) return run_crossing_fit(g, cross_path);
    }
    if (repro->parsed()) return run_repro(fixtures_flag);
  } catch (const fitcore::FitError& e) {
    std::cerr << "fit error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
