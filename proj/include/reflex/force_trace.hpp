#pragma once

#include <string>
#include <vector>

#include "reflex/errors.hpp"

namespace reflex {

// Sampled force-time signal. Times are strictly increasing and need not be
// uniform; values are SI (seconds, newtons).
struct ForceTrace {
  std::vector<double> t;
  std::vector<double> f;
  std::string source;
  double nominal_rate_hz = 0.0;

  std::size_t size() const { return t.size(); }
  double duration() const { return t.empty() ? 0.0 : t.back() - t.front(); }
};

// Throws DomainError on mismatched columns, non-finite values, or
// non-monotonic time.
void validate(const ForceTrace& trace);

// CSV with header `t_s,force_n`, one sample per line, 12 significant digits
// (round trips well inside 1e-9). Accepts LF or CRLF. Parse failures carry
// the 1-based line number.
ForceTrace read_trace(const std::string& path);
void write_trace(const ForceTrace& trace, const std::string& path);

}  // namespace reflex
