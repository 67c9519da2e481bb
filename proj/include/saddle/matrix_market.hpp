#pragma once

// Matrix Market ingestion (real coordinate/array, general/symmetric/
// skew-symmetric) into dense storage, plus plain one-value-per-line vectors.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "saddle/saddle_problem.hpp"

namespace saddle::mm {

enum class Format { Coordinate, Array };
enum class Symmetry { General, Symmetric, SkewSymmetric };

struct Header {
  Format format = Format::Coordinate;
  Symmetry symmetry = Symmetry::General;
};

namespace detail {

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

inline bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char ch) { return std::isspace(ch); });
}

/// Next line that is neither a '%' comment nor blank.
inline bool next_data_line(std::istream& in, std::string& line, long& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    const auto first = line.find_first_not_of(" \t");
    if (line[first] == '%') continue;
    return true;
  }
  return false;
}

[[noreturn]] inline void fail(long lineno, const std::string& msg) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": " + msg);
}

template <class... Ts>
void read_fields(const std::string& line, long lineno, Ts&... out) {
  std::istringstream ss(line);
  ((ss >> out), ...);
  if (ss.fail()) fail(lineno, "malformed entry '" + line + "'");
  std::string extra;
  if (ss >> extra) fail(lineno, "trailing token '" + extra + "'");
}

}  // namespace detail

inline Header parse_header(const std::string& banner) {
  std::istringstream ss(banner);
  std::string tag, object, format, field, symmetry, extra;
  ss >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket") {
    throw Error(ErrorCode::ParseError, "missing %%MatrixMarket banner");
  }
  if (ss.fail()) throw Error(ErrorCode::ParseError, "incomplete banner '" + banner + "'");
  if (ss >> extra) throw Error(ErrorCode::ParseError, "trailing token in banner '" + extra + "'");
  if (detail::lower(object) != "matrix") {
    throw Error(ErrorCode::ParseError, "object must be 'matrix', got '" + object + "'");
  }
  Header h;
  format = detail::lower(format);
  if (format == "coordinate") {
    h.format = Format::Coordinate;
  } else if (format == "array") {
    h.format = Format::Array;
  } else {
    throw Error(ErrorCode::ParseError, "unknown format '" + format + "'");
  }
  if (detail::lower(field) != "real") {
    throw Error(ErrorCode::ParseError, "field must be 'real', got '" + field + "'");
  }
  symmetry = detail::lower(symmetry);
  if (symmetry == "general") {
    h.symmetry = Symmetry::General;
  } else if (symmetry == "symmetric") {
    h.symmetry = Symmetry::Symmetric;
  } else if (symmetry == "skew-symmetric") {
    h.symmetry = Symmetry::SkewSymmetric;
  } else {
    throw Error(ErrorCode::ParseError, "unsupported symmetry '" + symmetry + "'");
  }
  return h;
}

/// Reads one matrix; symmetric and skew-symmetric storage is expanded and
/// duplicate coordinate entries are summed.
inline Matrix read_matrix(std::istream& in) {
  std::string line;
  long lineno = 0;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "empty input");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const Header h = parse_header(line);

  if (!detail::next_data_line(in, line, lineno)) detail::fail(lineno, "missing size line");
  long rows = 0, cols = 0, nnz = 0;
  if (h.format == Format::Coordinate) {
    detail::read_fields(line, lineno, rows, cols, nnz);
  } else {
    detail::read_fields(line, lineno, rows, cols);
  }
  if (rows < 0 || cols < 0 || nnz < 0) detail::fail(lineno, "negative size");
  if (h.symmetry != Symmetry::General && rows != cols) {
    detail::fail(lineno, "symmetric storage requires a square matrix");
  }

  Matrix m = Matrix::Zero(rows, cols);
  const double mirror = h.symmetry == Symmetry::SkewSymmetric ? -1.0 : 1.0;

  if (h.format == Format::Coordinate) {
    for (long k = 0; k < nnz; ++k) {
      if (!detail::next_data_line(in, line, lineno)) {
        detail::fail(lineno, "expected " + std::to_string(nnz) + " entries, got " +
                                 std::to_string(k));
      }
      long i = 0, j = 0;
      double v = 0;
      detail::read_fields(line, lineno, i, j, v);
      if (i < 1 || i > rows || j < 1 || j > cols) {
        detail::fail(lineno, "index (" + std::to_string(i) + "," + std::to_string(j) +
                                 ") out of range");
      }
      --i;
      --j;
      if (h.symmetry == Symmetry::SkewSymmetric && i == j) {
        detail::fail(lineno, "skew-symmetric matrix with diagonal entry");
      }
      m(i, j) += v;
      if (h.symmetry != Symmetry::General && i != j) m(j, i) += mirror * v;
    }
  } else {
    // Column-major; symmetric variants store the lower triangle only.
    for (long j = 0; j < cols; ++j) {
      long first = 0;
      if (h.symmetry == Symmetry::Symmetric) first = j;
      if (h.symmetry == Symmetry::SkewSymmetric) first = j + 1;
      for (long i = first; i < rows; ++i) {
        if (!detail::next_data_line(in, line, lineno)) {
          detail::fail(lineno, "array data ended early");
        }
        double v = 0;
        detail::read_fields(line, lineno, v);
        m(i, j) = v;
        if (h.symmetry != Symmetry::General && i != j) m(j, i) = mirror * v;
      }
    }
  }
  if (detail::next_data_line(in, line, lineno)) detail::fail(lineno, "unexpected trailing data");
  return m;
}

inline Matrix read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  try {
    return read_matrix(in);
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

/// Array-format writer, 17 significant digits. Symmetric matrices are written
/// with symmetric storage.
inline void write_matrix(std::ostream& out, const Matrix& m, bool symmetric = false) {
  out << "%%MatrixMarket matrix array real " << (symmetric ? "symmetric" : "general") << '\n';
  out << m.rows() << ' ' << m.cols() << '\n';
  out << std::setprecision(17);
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = symmetric ? j : 0; i < m.rows(); ++i) out << m(i, j) << '\n';
  }
}

/// Whitespace-separated values, one per line; '%' and '#' lines are comments.
inline Vector read_vector(std::istream& in) {
  std::vector<double> values;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::is_blank(line)) continue;
    const auto first = line.find_first_not_of(" \t");
    if (line[first] == '%' || line[first] == '#') continue;
    double v = 0;
    detail::read_fields(line, lineno, v);
    values.push_back(v);
  }
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

inline Vector read_vector_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  try {
    return read_vector(in);
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

inline void write_vector(std::ostream& out, const Vector& v) {
  out << std::setprecision(17);
  for (Index i = 0; i < v.size(); ++i) out << v(i) << '\n';
}

struct LoadedProblem {
  SaddleProblem problem;
  std::optional<DataPair> data;
};

/// Loads A.mtx, B.mtx, C.mtx and, when present, f.txt / g.txt from `dir`. A
/// missing one of the two vectors defaults to zero.
inline LoadedProblem load_problem(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  for (const char* name : {"A.mtx", "B.mtx", "C.mtx"}) {
    if (!fs::exists(dir / name)) {
      throw Error(ErrorCode::ParseError, "missing " + (dir / name).string());
    }
  }
  LoadedProblem out{SaddleProblem(read_matrix_file(dir / "A.mtx"), read_matrix_file(dir / "B.mtx"),
                                  read_matrix_file(dir / "C.mtx"), "matrices:" + dir.string()),
                    std::nullopt};
  const bool has_f = fs::exists(dir / "f.txt");
  const bool has_g = fs::exists(dir / "g.txt");
  if (has_f || has_g) {
    DataPair d;
    d.f = has_f ? read_vector_file(dir / "f.txt") : Vector::Zero(out.problem.nv());
    d.g = has_g ? read_vector_file(dir / "g.txt") : Vector::Zero(out.problem.nq());
    if (d.f.size() != out.problem.nv() || d.g.size() != out.problem.nq()) {
      throw Error(ErrorCode::ParseError, "data vector length does not match matrices");
    }
    out.data = std::move(d);
  }
  return out;
}

}  // namespace saddle::mm
