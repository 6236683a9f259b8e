#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace preqmc {

// One row of a Joe-Kuo style direction-number table: primitive polynomial
// degree s, middle coefficient bits a, and initial direction numbers m_i.
struct DirectionRow {
  std::uint32_t dimension = 0;  // >= 2; dimension 1 is the built-in van der Corput stream
  std::uint32_t degree = 0;     // s
  std::uint32_t poly = 0;       // a
  std::vector<std::uint32_t> m; // s entries, m_i odd and < 2^i
};

struct DirectionTable {
  std::vector<DirectionRow> rows;  // rows[k] covers dimension k+2
  // Highest sampler dimension this table supports (dimension 1 is implicit).
  std::size_t max_dimension() const { return rows.size() + 1; }
};

// Parse the "d s a m_1 ... m_s" text layout (one header line, then one row
// per dimension starting at d=2). Throws std::runtime_error with the line
// number on malformed input.
DirectionTable load_direction_numbers(std::istream& in);
DirectionTable load_direction_numbers(const std::string& path);

// Joe-Kuo D(6) table bundled with the library (dimensions 2..1024).
const char* embedded_direction_table();
const DirectionTable& default_direction_table();

}  // namespace preqmc
