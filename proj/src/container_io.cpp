#include "dualsvd/container_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace dualsvd {

namespace fs = std::filesystem;

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void entry_error(std::string_view token, int line, int column,
                              const char* why) {
  throw IoError("malformed CSV entry \"" + std::string(token) + "\" at line " +
                std::to_string(line) + ", column " + std::to_string(column) + ": " + why);
}

double parse_double(std::string_view token, std::string_view full, int line, int column) {
  std::string buf(token);
  char* end = nullptr;
  double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || buf.empty()) {
    entry_error(full, line, column, "not a decimal literal");
  }
  return v;
}

}  // namespace

std::string format_entry(std::complex<double> value) {
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
    throw std::invalid_argument("refusing to serialize a non-finite matrix entry");
  }
  if (value.imag() == 0.0) return format_double(value.real());
  std::string out = format_double(value.real());
  out += std::signbit(value.imag()) ? '-' : '+';
  out += format_double(std::abs(value.imag()));
  out += 'i';
  return out;
}

std::complex<double> parse_entry(std::string_view token, int line, int column) {
  if (token.empty()) entry_error(token, line, column, "empty entry");
  for (char c : token) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      entry_error(token, line, column, "internal whitespace");
    }
  }
  // find a '+'/'-' splitting two literals (signs after e/E belong to exponents)
  std::size_t split = std::string_view::npos;
  for (std::size_t i = 1; i < token.size(); ++i) {
    char c = token[i];
    if ((c == '+' || c == '-') && token[i - 1] != 'e' && token[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (token.back() == 'i') {
    if (split == std::string_view::npos) {
      entry_error(token, line, column, "imaginary entry needs the form a+bi or a-bi");
    }
    double re = parse_double(token.substr(0, split), token, line, column);
    double im = parse_double(token.substr(split + 1, token.size() - split - 2), token,
                             line, column);
    if (token[split] == '-') im = -im;
    return {re, im};
  }
  if (split != std::string_view::npos) {
    entry_error(token, line, column, "two literals but no trailing i");
  }
  return {parse_double(token, token, line, column), 0.0};
}

ComplexMatrix read_matrix_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::vector<std::complex<double>>> rows;
  std::string text;
  int line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) continue;
    std::vector<std::complex<double>> row;
    std::size_t start = 0;
    int column = 1;
    for (;;) {
      std::size_t comma = text.find(',', start);
      std::string_view token(text.data() + start,
                             (comma == std::string::npos ? text.size() : comma) - start);
      row.push_back(parse_entry(token, line_no, column));
      if (comma == std::string::npos) break;
      start = comma + 1;
      ++column;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw IoError("ragged CSV: line " + std::to_string(line_no) + " of " + path.string() +
                    " has " + std::to_string(row.size()) + " entries, expected " +
                    std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("empty matrix file " + path.string());
  ComplexMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

void write_matrix_csv(const ComplexMatrix& matrix, const fs::path& path) {
  if (!matrix.allFinite()) {
    throw std::invalid_argument("refusing to serialize non-finite entries to " + path.string());
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (Index i = 0; i < matrix.rows(); ++i) {
    for (Index j = 0; j < matrix.cols(); ++j) {
      if (j) out << ',';
      out << format_entry(matrix(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failure on " + path.string());
}

MatrixContainer resolve_container(const fs::path& base) {
  fs::path prefix = base;
  if (fs::is_directory(base)) {
    fs::path found;
    for (const auto& entry : fs::directory_iterator(base)) {
      std::string name = entry.path().filename().string();
      constexpr std::string_view suffix = ".standard.csv";
      if (name.size() > suffix.size() &&
          name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
        if (!found.empty()) {
          throw IoError("directory " + base.string() + " holds more than one container");
        }
        found = base / name.substr(0, name.size() - suffix.size());
      }
    }
    if (found.empty()) throw IoError("no *.standard.csv in directory " + base.string());
    prefix = found;
  }
  MatrixContainer c;
  c.name = prefix.filename().string();
  c.standard_path = prefix;
  c.standard_path += ".standard.csv";
  c.infinitesimal_path = prefix;
  c.infinitesimal_path += ".infinitesimal.csv";
  return c;
}

DualMatrix read_container(const fs::path& base) {
  MatrixContainer c = resolve_container(base);
  if (!fs::exists(c.standard_path)) throw IoError("missing file " + c.standard_path.string());
  if (!fs::exists(c.infinitesimal_path)) {
    throw IoError("missing file " + c.infinitesimal_path.string());
  }
  ComplexMatrix standard = read_matrix_csv(c.standard_path);
  ComplexMatrix infinitesimal = read_matrix_csv(c.infinitesimal_path);
  if (standard.rows() != infinitesimal.rows() || standard.cols() != infinitesimal.cols()) {
    throw IoError("container parts disagree on shape: " + c.standard_path.string() + " is " +
                  std::to_string(standard.rows()) + "x" + std::to_string(standard.cols()) +
                  ", " + c.infinitesimal_path.string() + " is " +
                  std::to_string(infinitesimal.rows()) + "x" +
                  std::to_string(infinitesimal.cols()));
  }
  return DualMatrix(std::move(standard), std::move(infinitesimal));
}

MatrixContainer write_container(const DualMatrix& a, const fs::path& base) {
  MatrixContainer c;
  c.name = base.filename().string();
  c.standard_path = base;
  c.standard_path += ".standard.csv";
  c.infinitesimal_path = base;
  c.infinitesimal_path += ".infinitesimal.csv";
  c.rows = a.rows();
  c.cols = a.cols();
  c.is_complex = !a.is_real();
  write_matrix_csv(a.standard(), c.standard_path);
  write_matrix_csv(a.infinitesimal(), c.infinitesimal_path);
  return c;
}

}  // namespace dualsvd
