#include "preqmc/direction_numbers.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace preqmc {

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw std::runtime_error("direction numbers: line " + std::to_string(line) +
                           ": " + what);
}

}  // namespace

DirectionTable load_direction_numbers(std::istream& in) {
  DirectionTable table;
  std::string line;
  std::size_t line_no = 0;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (!header_skipped) {  // "d s a m_i" banner
      header_skipped = true;
      if (line.find_first_not_of("0123456789 \t\r") != std::string::npos)
        continue;
    }
    std::istringstream row(line);
    DirectionRow r;
    if (!(row >> r.dimension >> r.degree >> r.poly))
      parse_fail(line_no, "expected 'd s a m_1 ... m_s'");
    if (r.dimension != table.rows.size() + 2)
      parse_fail(line_no, "dimensions must be contiguous from 2, got " +
                              std::to_string(r.dimension));
    if (r.degree == 0 || r.degree > 31)
      parse_fail(line_no, "polynomial degree out of range");
    if (r.degree == 1 && r.poly != 0)
      parse_fail(line_no, "degree-1 polynomial has no middle coefficients");
    if (r.degree >= 2 && r.poly >= (1u << (r.degree - 1)))
      parse_fail(line_no, "coefficient bits exceed polynomial degree");
    r.m.resize(r.degree);
    for (std::uint32_t i = 0; i < r.degree; ++i) {
      if (!(row >> r.m[i])) parse_fail(line_no, "missing direction number");
      if (r.m[i] % 2 == 0) parse_fail(line_no, "direction numbers must be odd");
      if (r.m[i] >= (1u << (i + 1)))
        parse_fail(line_no, "direction number m_" + std::to_string(i + 1) +
                                " out of range");
    }
    std::uint32_t extra;
    if (row >> extra) parse_fail(line_no, "trailing tokens");
    table.rows.push_back(std::move(r));
  }
  if (table.rows.empty()) parse_fail(line_no, "no rows");
  return table;
}

DirectionTable load_direction_numbers(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("direction numbers: cannot open " + path);
  return load_direction_numbers(in);
}

const DirectionTable& default_direction_table() {
  static const DirectionTable table = [] {
    std::istringstream in(embedded_direction_table());
    return load_direction_numbers(in);
  }();
  return table;
}

}  // namespace preqmc
