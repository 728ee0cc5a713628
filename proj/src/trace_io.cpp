#include "tunres/trace_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace tunres::trace_io {

namespace {

std::string err_text(const std::string& path, int line,
                     const std::string& what) {
  std::ostringstream os;
  os << path << ":" << line << ": " << what;
  return os.str();
}

struct CsvReader {
  std::ifstream in;
  std::string path;
  int line_no = 0;

  explicit CsvReader(const std::string& p) : in(p), path(p) {
    if (!in) throw ParseError(p, 0, "cannot open file");
  }

  bool next(std::string& line) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return true;
    }
    return false;
  }
};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

double parse_double(const CsvReader& r, const std::string& s) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError(r.path, r.line_no, "bad numeric field '" + s + "'");
  }
}

// "# key=value" header line; returns false for non-header lines.
bool parse_header(const std::string& line, std::string& key, double& value) {
  if (line.empty() || line[0] != '#') return false;
  std::size_t eq = line.find('=');
  if (eq == std::string::npos) return false;
  key = line.substr(1, eq - 1);
  while (!key.empty() && key.front() == ' ') key.erase(key.begin());
  while (!key.empty() && key.back() == ' ') key.pop_back();
  try {
    value = std::stod(line.substr(eq + 1));
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

void apply_meta(spectro::TraceMeta& meta, const std::string& key,
                double value) {
  if (key == "power_dbm") meta.power_dbm = value;
  else if (key == "gate_v") meta.gate_v = value;
  else if (key == "temp_k") meta.temp_k = value;
}

void write_meta(std::ofstream& out, const spectro::TraceMeta& meta) {
  out << std::setprecision(17);
  if (meta.power_dbm) out << "# power_dbm=" << *meta.power_dbm << "\n";
  if (meta.gate_v) out << "# gate_v=" << *meta.gate_v << "\n";
  if (meta.temp_k) out << "# temp_k=" << *meta.temp_k << "\n";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << std::setprecision(17);
  return out;
}

}  // namespace

ParseError::ParseError(const std::string& path, int line,
                       const std::string& what)
    : std::runtime_error(err_text(path, line, what)) {}

spectro::ComplexTrace read_trace(const std::string& path) {
  CsvReader r(path);
  spectro::ComplexTrace tr;
  std::string line;
  bool saw_header_row = false;
  while (r.next(line)) {
    if (line.empty()) continue;
    std::string key;
    double value;
    if (parse_header(line, key, value)) {
      apply_meta(tr.meta, key, value);
      continue;
    }
    if (line[0] == '#') continue;
    if (!saw_header_row) {
      if (line.rfind("freq_hz", 0) != 0)
        throw ParseError(path, r.line_no,
                         "expected header 'freq_hz,s21_re,s21_im'");
      saw_header_row = true;
      continue;
    }
    auto fields = split_csv(line);
    if (fields.size() != 3)
      throw ParseError(path, r.line_no, "expected 3 fields");
    tr.freq.push_back(parse_double(r, fields[0]));
    tr.s21.emplace_back(parse_double(r, fields[1]), parse_double(r, fields[2]));
  }
  tr.validate();
  return tr;
}

void write_trace(const std::string& path, const spectro::ComplexTrace& trace) {
  std::ofstream out = open_out(path);
  write_meta(out, trace.meta);
  out << "freq_hz,s21_re,s21_im\n";
  for (std::size_t i = 0; i < trace.freq.size(); ++i)
    out << trace.freq[i] << "," << trace.s21[i].real() << ","
        << trace.s21[i].imag() << "\n";
}

std::vector<spectro::ComplexTrace> read_stack(const std::string& path) {
  CsvReader r(path);
  std::vector<spectro::ComplexTrace> stack;
  std::string line;
  bool saw_header_row = false;
  spectro::TraceMeta shared;
  while (r.next(line)) {
    if (line.empty()) continue;
    std::string key;
    double value;
    if (parse_header(line, key, value)) {
      apply_meta(shared, key, value);
      continue;
    }
    if (line[0] == '#') continue;
    if (!saw_header_row) {
      if (line.rfind("power_dbm", 0) != 0)
        throw ParseError(path, r.line_no,
                         "expected header 'power_dbm,freq_hz,s21_re,s21_im'");
      saw_header_row = true;
      continue;
    }
    auto fields = split_csv(line);
    if (fields.size() != 4)
      throw ParseError(path, r.line_no, "expected 4 fields");
    double p = parse_double(r, fields[0]);
    if (stack.empty() || !stack.back().meta.power_dbm ||
        *stack.back().meta.power_dbm != p) {
      stack.emplace_back();
      stack.back().meta = shared;
      stack.back().meta.power_dbm = p;
    }
    stack.back().freq.push_back(parse_double(r, fields[1]));
    stack.back().s21.emplace_back(parse_double(r, fields[2]),
                                  parse_double(r, fields[3]));
  }
  for (auto& tr : stack) tr.validate();
  if (stack.empty()) throw ParseError(path, r.line_no, "empty stack");
  return stack;
}

void write_stack(const std::string& path,
                 const std::vector<spectro::ComplexTrace>& stack) {
  std::ofstream out = open_out(path);
  out << "power_dbm,freq_hz,s21_re,s21_im\n";
  for (const auto& tr : stack) {
    if (!tr.meta.power_dbm)
      throw std::invalid_argument("write_stack: trace missing power_dbm");
    for (std::size_t i = 0; i < tr.freq.size(); ++i)
      out << *tr.meta.power_dbm << "," << tr.freq[i] << ","
          << tr.s21[i].real() << "," << tr.s21[i].imag() << "\n";
  }
}

void read_tsweep(const std::string& path, std::vector<double>& temps,
                 std::vector<double>& shifts) {
  CsvReader r(path);
  temps.clear();
  shifts.clear();
  std::string line;
  bool saw_header_row = false;
  while (r.next(line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header_row) {
      if (line.rfind("temperature_k", 0) != 0)
        throw ParseError(path, r.line_no,
                         "expected header 'temperature_k,delta_f_over_f'");
      saw_header_row = true;
      continue;
    }
    auto fields = split_csv(line);
    if (fields.size() != 2)
      throw ParseError(path, r.line_no, "expected 2 fields");
    temps.push_back(parse_double(r, fields[0]));
    shifts.push_back(parse_double(r, fields[1]));
  }
  if (temps.empty()) throw ParseError(path, r.line_no, "no data rows");
}

void write_tsweep(const std::string& path, const std::vector<double>& temps,
                  const std::vector<double>& shifts) {
  if (temps.size() != shifts.size())
    throw std::invalid_argument("write_tsweep: size mismatch");
  std::ofstream out = open_out(path);
  out << "temperature_k,delta_f_over_f\n";
  for (std::size_t i = 0; i < temps.size(); ++i)
    out << temps[i] << "," << shifts[i] << "\n";
}

coupling::CrossingData read_crossing(const std::string& path) {
  CsvReader r(path);
  coupling::CrossingData data;
  std::string line;
  bool saw_header_row = false;
  while (r.next(line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header_row) {
      if (line.rfind("gate_v", 0) != 0)
        throw ParseError(path, r.line_no,
                         "expected header 'gate_v,f_plus_hz,f_minus_hz'");
      saw_header_row = true;
      continue;
    }
    auto fields = split_csv(line);
    if (fields.size() != 3)
      throw ParseError(path, r.line_no, "expected 3 fields");
    data.gate_v.push_back(parse_double(r, fields[0]));
    data.f_plus.push_back(parse_double(r, fields[1]));
    data.f_minus.push_back(parse_double(r, fields[2]));
  }
  data.validate();
  if (data.gate_v.empty()) throw ParseError(path, r.line_no, "no data rows");
  return data;
}

void write_crossing(const std::string& path,
                    const coupling::CrossingData& data) {
  data.validate();
  std::ofstream out = open_out(path);
  out << "gate_v,f_plus_hz,f_minus_hz\n";
  for (std::size_t i = 0; i < data.gate_v.size(); ++i)
    out << data.gate_v[i] << "," << data.f_plus[i] << "," << data.f_minus[i]
        << "\n";
}

}  // namespace tunres::trace_io
