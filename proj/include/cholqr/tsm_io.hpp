#pragma once

// TSM1 matrix files: "TSM1", u64 rows, u64 cols, then rows·cols doubles in
// row-major order. Everything little-endian, no padding.

#include <filesystem>
#include <iosfwd>

#include "cholqr/matrix.hpp"

namespace cholqr {

void write_tsm(std::ostream& out, ConstMatrixView a);
/// Throws FormatError on a bad magic, truncated payload or trailing bytes.
Matrix read_tsm(std::istream& in);

/// Throw IoError when the file cannot be opened or written.
void save_tsm(const std::filesystem::path& path, ConstMatrixView a);
Matrix load_tsm(const std::filesystem::path& path);

}  // namespace cholqr
