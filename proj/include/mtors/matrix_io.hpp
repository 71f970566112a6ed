#pragma once

#include "mtors/core.hpp"

#include <iosfwd>
#include <string>

namespace mtors {

// Text format: a header line "rows cols denom", then the entries row by row,
// whitespace separated.
struct MatrixText {
  IntMatrix matrix;
  Integer denom = 1;
};

void write_matrix(std::ostream& out, const IntMatrix& m, const Integer& denom = 1);
MatrixText read_matrix(std::istream& in);

std::string matrix_to_string(const IntMatrix& m, const Integer& denom = 1);
MatrixText matrix_from_string(const std::string& s);

}  // namespace mtors
