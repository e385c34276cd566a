#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "col/geometry.hpp"
#include "col/oracles.hpp"

namespace col {

struct TraceRow {
  long n = 0;
  Vector x;              // x_n, also the round's query
  Vector best_response;  // x_n^*
  Vector tilt;           // drift term of l_n; empty for plain COL
  double loss = 0.0;     // l_n(x_n)
  double gap = 0.0;      // l_n(x_n) - l_n(x_n^*)
  std::optional<double> delta;  // |x_n - x_star|
  double xi_norm = 0.0;
  double drift = 0.0;    // a_n
  double static_regret_cum = 0.0;
  double dynamic_regret_cum = 0.0;
};

struct RunTrace {
  std::string problem_id;
  std::string algorithm_id;
  std::uint64_t seed = 0;
  Index dim = 0;
  std::optional<EquilibriumCertificate> equilibrium;
  std::vector<TraceRow> rows;

  long size() const { return static_cast<long>(rows.size()); }
  void write_csv(std::ostream& os) const;
  void write_csv(const std::string& path) const;
};

/// Shortest decimal string that parses back to the same double; "nan"/"inf"/"-inf" otherwise.
std::string format_double(double v);

/// n,x_0..x_{d-1},loss,gap,delta,xi_norm,static_regret_cum,dynamic_regret_cum
std::vector<std::string> trace_csv_columns(Index dim);
std::string trace_csv_header(Index dim);

/// Numeric columns of a trace CSV, validated against the schema.
struct TraceTable {
  Index dim = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(const std::string& name) const;
};

TraceTable read_trace_csv(const std::string& path);

}  // namespace col
