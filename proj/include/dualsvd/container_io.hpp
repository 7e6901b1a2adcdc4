#pragma once

#include <complex>
#include <filesystem>
#include <string>

#include "dualsvd/dual_matrix.hpp"
#include "dualsvd/errors.hpp"

namespace dualsvd {

/// Locations and shape of a serialized dual matrix: the two-file pair
/// <name>.standard.csv / <name>.infinitesimal.csv.
struct MatrixContainer {
  std::string name;
  std::filesystem::path standard_path;
  std::filesystem::path infinitesimal_path;
  Index rows = 0;
  Index cols = 0;
  bool is_complex = false;
};

/// Formats one CSV entry with 17 significant digits: "a" for real values,
/// "a+bi" / "a-bi" otherwise, no internal spaces. Round-trips bit-exactly.
std::string format_entry(std::complex<double> value);

/// Parses one CSV entry; line/column are 1-based and reported on error.
std::complex<double> parse_entry(std::string_view token, int line, int column);

ComplexMatrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const ComplexMatrix& matrix, const std::filesystem::path& path);

/// Resolves a container from `base`: either the prefix of the two-file pair
/// or a directory holding exactly one pair.
MatrixContainer resolve_container(const std::filesystem::path& base);

DualMatrix read_container(const std::filesystem::path& base);
MatrixContainer write_container(const DualMatrix& a, const std::filesystem::path& base);

}  // namespace dualsvd
