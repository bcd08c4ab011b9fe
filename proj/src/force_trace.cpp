#include "reflex/force_trace.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace reflex {

void validate(const ForceTrace& trace) {
  if (trace.t.size() != trace.f.size()) {
    throw DomainError("trace time and force columns differ in length");
  }
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    if (!std::isfinite(trace.t[i]) || !std::isfinite(trace.f[i])) {
      throw DomainError("trace contains non-finite values");
    }
    if (i > 0 && !(trace.t[i] > trace.t[i - 1])) {
      throw DomainError("trace time must be strictly increasing");
    }
  }
}

namespace {

double parse_cell(const std::string& cell, long line) {
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0' || errno == ERANGE ||
      !std::isfinite(value)) {
    throw ParseError("non-numeric cell '" + cell + "'", line);
  }
  return value;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') {
    s.pop_back();
  }
  return s;
}

}  // namespace

ForceTrace read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open trace file: " + path);
  }

  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) {
    throw ParseError("empty trace file", 1);
  }
  ++line_no;
  if (strip_cr(line) != "t_s,force_n") {
    throw ParseError("missing trace header 't_s,force_n'", line_no);
  }

  ForceTrace trace;
  trace.source = path;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = strip_cr(line);
    if (row.empty()) {
      continue;
    }
    const std::size_t comma = row.find(',');
    if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos) {
      throw ParseError("expected exactly two comma-separated cells", line_no);
    }
    const double t = parse_cell(row.substr(0, comma), line_no);
    const double f = parse_cell(row.substr(comma + 1), line_no);
    if (!trace.t.empty() && !(t > trace.t.back())) {
      throw ParseError("time is not strictly increasing", line_no);
    }
    trace.t.push_back(t);
    trace.f.push_back(f);
  }
  if (trace.t.size() >= 2) {
    trace.nominal_rate_hz =
        (trace.t.size() - 1) / (trace.t.back() - trace.t.front());
  }
  return trace;
}

void write_trace(const ForceTrace& trace, const std::string& path) {
  validate(trace);
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open trace file for writing: " + path);
  }
  out << "t_s,force_n\n";
  char buffer[64];
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::snprintf(buffer, sizeof(buffer), "%.12g,%.12g\n", trace.t[i],
                  trace.f[i]);
    out << buffer;
  }
  if (!out) {
    throw IoError("failed writing trace file: " + path);
  }
}

}  // namespace reflex
