#include <istream>
#include <ostream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "isoflow/errors.hpp"
#include "isoflow/matrix.hpp"

namespace isoflow {

Matrix read_matrix(std::istream& in) {
  long long n = 0;
  if (!(in >> n) || n <= 0) {
    throw FormatError("matrix file: first token must be a positive dimension N");
  }
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      std::string token;
      if (!(in >> token)) {
        throw FormatError(fmt::format("matrix file: expected {} entries, ran out at ({}, {})",
                                      n * n, i, j));
      }
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size()) {
        throw FormatError(fmt::format("matrix file: bad scalar '{}' at ({}, {})", token, i, j));
      }
      m(i, j) = value;
    }
  }
  std::string extra;
  if (in >> extra) {
    throw FormatError(fmt::format("matrix file: trailing token '{}'", extra));
  }
  return m;
}

void write_matrix(std::ostream& out, const Matrix& m) {
  require_square(m, "write_matrix");
  fmt::print(out, "{}\n", m.rows());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      fmt::print(out, j == 0 ? "{:.17g}" : " {:.17g}", m(i, j));
    }
    out << '\n';
  }
}

}  // namespace isoflow
