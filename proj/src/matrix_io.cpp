#include "mtors/matrix_io.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace mtors {

void write_matrix(std::ostream& out, const IntMatrix& m, const Integer& denom) {
  out << m.rows() << ' ' << m.cols() << ' ' << denom.get_str() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << m(i, j).get_str();
    }
    out << '\n';
  }
}

MatrixText read_matrix(std::istream& in) {
  long long rows = -1, cols = -1;
  std::string den;
  if (!(in >> rows >> cols >> den) || rows < 0 || cols < 0) throw Error(ErrorKind::Parse, "bad matrix header");
  MatrixText out;
  if (out.denom.set_str(den, 10) != 0 || out.denom <= 0) throw Error(ErrorKind::Parse, "bad denominator '" + den + "'");
  out.matrix = IntMatrix(rows, cols);
  std::string tok;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      if (!(in >> tok)) throw Error(ErrorKind::Parse, "matrix truncated");
      if (out.matrix(i, j).set_str(tok, 10) != 0) throw Error(ErrorKind::Parse, "bad entry '" + tok + "'");
    }
  return out;
}

std::string matrix_to_string(const IntMatrix& m, const Integer& denom) {
  std::ostringstream s;
  write_matrix(s, m, denom);
  return s.str();
}

MatrixText matrix_from_string(const std::string& s) {
  std::istringstream in(s);
  return read_matrix(in);
}

}  // namespace mtors
