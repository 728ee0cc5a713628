#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "tunres/synth.hpp"
#include "tunres/trace_io.hpp"

using namespace tunres;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("tunres_io_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace

TEST_CASE("trace round trip with metadata") {
  TempDir tmp;
  spectro::NotchModel m{6e9, 500.0, 1200.0, 0.1, 1.0, 0.2, 5e-9};
  auto tr = synth::synth_notch(m, synth::linspace(5.99e9, 6.01e9, 64),
                               {9, 0.01});
  tr.meta.power_dbm = -72.5;
  tr.meta.gate_v = 0.31;

  std::string path = tmp.file("trace.csv");
  trace_io::write_trace(path, tr);
  auto back = trace_io::read_trace(path);

  REQUIRE(back.freq.size() == tr.freq.size());
  for (std::size_t i = 0; i < tr.freq.size(); ++i) {
    CHECK(back.freq[i] == doctest::Approx(tr.freq[i]).epsilon(1e-15));
    CHECK(back.s21[i].real() ==
          doctest::Approx(tr.s21[i].real()).epsilon(1e-14));
    CHECK(back.s21[i].imag() ==
          doctest::Approx(tr.s21[i].imag()).epsilon(1e-14));
  }
  REQUIRE(back.meta.power_dbm.has_value());
  CHECK(*back.meta.power_dbm == doctest::Approx(-72.5).epsilon(1e-12));
  REQUIRE(back.meta.gate_v.has_value());
  CHECK(*back.meta.gate_v == doctest::Approx(0.31).epsilon(1e-12));
  CHECK_FALSE(back.meta.temp_k.has_value());
}

TEST_CASE("stack round trip") {
  TempDir tmp;
  duffing::SweepModel m;
  m.params = {6e9, 400.0, -60.0};
  m.q_ext_mag = 900.0;
  synth::FrequencyGrid grid{6e9, 5e7, 33};
  auto stack =
      synth::synth_duffing_stack(m, -75.0, -69.0, 3.0, grid, {2, 0.005});

  std::string path = tmp.file("stack.csv");
  trace_io::write_stack(path, stack);
  auto back = trace_io::read_stack(path);

  REQUIRE(back.size() == stack.size());
  for (std::size_t k = 0; k < stack.size(); ++k) {
    REQUIRE(back[k].meta.power_dbm.has_value());
    CHECK(*back[k].meta.power_dbm ==
          doctest::Approx(*stack[k].meta.power_dbm).epsilon(1e-12));
    REQUIRE(back[k].freq.size() == stack[k].freq.size());
    for (std::size_t i = 0; i < stack[k].freq.size(); ++i)
      CHECK(std::abs(back[k].s21[i] - stack[k].s21[i]) < 1e-12);
  }
}

TEST_CASE("temperature sweep round trip") {
  TempDir tmp;
  auto temps = synth::linspace(0.05, 1.1, 12);
  auto shifts = synth::synth_tsweep(1.244, 0.0867, temps, {0, 0.0});

  std::string path = tmp.file("tsweep.csv");
  trace_io::write_tsweep(path, temps, shifts);
  std::vector<double> t2, s2;
  trace_io::read_tsweep(path, t2, s2);

  REQUIRE(t2.size() == temps.size());
  for (std::size_t i = 0; i < temps.size(); ++i) {
    CHECK(t2[i] == doctest::Approx(temps[i]).epsilon(1e-14));
    CHECK(s2[i] == doctest::Approx(shifts[i]).epsilon(1e-12));
  }
}

TEST_CASE("crossing table round trip") {
  TempDir tmp;
  coupling::CrossingModel m{5.4e9, -0.8e9, 0.3, 50e6,
                            coupling::Coefficient::half};
  auto data =
      synth::synth_crossing(m, synth::linspace(0.0, 0.6, 15), 6, 0.3e6);

  std::string path = tmp.file("crossing.csv");
  trace_io::write_crossing(path, data);
  auto back = trace_io::read_crossing(path);

  REQUIRE(back.gate_v.size() == data.gate_v.size());
  for (std::size_t i = 0; i < data.gate_v.size(); ++i) {
    CHECK(back.gate_v[i] == doctest::Approx(data.gate_v[i]).epsilon(1e-14));
    CHECK(back.f_plus[i] == doctest::Approx(data.f_plus[i]).epsilon(1e-12));
    CHECK(back.f_minus[i] ==
          doctest::Approx(data.f_minus[i]).epsilon(1e-12));
  }
}

TEST_CASE("parse errors carry the path and line number") {
  TempDir tmp;
  std::string path = tmp.file("broken.csv");
  {
    std::ofstream out(path);
    out << "freq_hz,s21_re,s21_im\n";
    out << "6.0e9,0.5,0.1\n";
    out << "6.1e9,not_a_number,0.2\n";
  }
  try {
    trace_io::read_trace(path);
    FAIL("expected ParseError");
  } catch (const trace_io::ParseError& e) {
    std::string msg = e.what();
    CHECK(msg.find("broken.csv") != std::string::npos);
    CHECK(msg.find("3") != std::string::npos);
  }

  CHECK_THROWS_AS(trace_io::read_trace(tmp.file("missing.csv")),
                  trace_io::ParseError);
}
