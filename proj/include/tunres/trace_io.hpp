#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "tunres/coupling.hpp"
#include "tunres/spectro.hpp"

// CSV readers and writers for traces, power stacks, temperature sweeps,
// and crossing tables. Trace files carry "# key=value" header lines for
// power_dbm / gate_v / temp_k. Parse errors report the line number.

namespace tunres::trace_io {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, int line, const std::string& what);
};

// freq_hz,s21_re,s21_im
spectro::ComplexTrace read_trace(const std::string& path);
void write_trace(const std::string& path, const spectro::ComplexTrace& trace);

// Single CSV with an extra power_dbm column, one block per power.
std::vector<spectro::ComplexTrace> read_stack(const std::string& path);
void write_stack(const std::string& path,
                 const std::vector<spectro::ComplexTrace>& stack);

// temperature_k,delta_f_over_f
void read_tsweep(const std::string& path, std::vector<double>& temps,
                 std::vector<double>& shifts);
void write_tsweep(const std::string& path, const std::vector<double>& temps,
                  const std::vector<double>& shifts);

// gate_v,f_plus_hz,f_minus_hz
coupling::CrossingData read_crossing(const std::string& path);
void write_crossing(const std::string& path,
                    const coupling::CrossingData& data);

}  // namespace tunres::trace_io
