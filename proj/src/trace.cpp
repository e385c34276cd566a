#include "col/trace.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace col {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> trace_csv_columns(Index dim) {
  std::vector<std::string> cols{"n"};
  for (Index i = 0; i < dim; ++i) cols.push_back("x_" + std::to_string(i));
  for (const char* c : {"loss", "gap", "delta", "xi_norm", "static_regret_cum", "dynamic_regret_cum"}) {
    cols.emplace_back(c);
  }
  return cols;
}

std::string trace_csv_header(Index dim) {
  std::string out;
  const auto cols = trace_csv_columns(dim);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ',';
    out += cols[i];
  }
  return out;
}

void RunTrace::write_csv(std::ostream& os) const {
  std::string line;
  os << trace_csv_header(dim) << '\n';
  for (const auto& r : rows) {
    line.clear();
    line += std::to_string(r.n);
    for (Index i = 0; i < r.x.size(); ++i) {
      line += ',';
      line += format_double(r.x[i]);
    }
    for (double v : {r.loss, r.gap, r.delta.value_or(std::nan("")), r.xi_norm, r.static_regret_cum,
                     r.dynamic_regret_cum}) {
      line += ',';
      line += format_double(v);
    }
    line += '\n';
    os << line;
  }
}

void RunTrace::write_csv(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  write_csv(os);
  if (!os) throw Error("failed writing '" + path + "'");
}

std::vector<double> TraceTable::column(const std::string& name) const {
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] == name) {
      std::vector<double> out;
      out.reserve(rows.size());
      for (const auto& r : rows) out.push_back(r[j]);
      return out;
    }
  }
  throw InvalidArgument("trace has no column '" + name + "'");
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& s, const std::string& path) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidArgument("'" + path + "': unparsable cell '" + s + "'");
  }
  return v;
}

}  // namespace

TraceTable read_trace_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("cannot open trace '" + path + "'");
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("'" + path + "': empty trace file");
  TraceTable t;
  t.columns = split_commas(line);
  const long dim = static_cast<long>(t.columns.size()) - 7;
  if (dim < 1 || t.columns != trace_csv_columns(dim)) {
    throw InvalidArgument("'" + path + "': header does not match the trace schema");
  }
  t.dim = dim;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != t.columns.size()) {
      throw InvalidArgument("'" + path + "': row with " + std::to_string(cells.size()) + " cells");
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_cell(c, path));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace col
