#include "cholqr/tsm_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <vector>

#include "cholqr/errors.hpp"

namespace cholqr {
namespace {

constexpr std::array<char, 4> magic{'T', 'S', 'M', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes;
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) throw FormatError("TSM1: truncated header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void write_tsm(std::ostream& out, ConstMatrixView a) {
  out.write(magic.data(), magic.size());
  put_u64(out, a.rows());
  put_u64(out, a.cols());
  std::vector<char> row(a.cols() * 8);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto src = a.row(i);
    for (std::size_t j = 0; j < src.size(); ++j) {
      const auto bits = std::bit_cast<std::uint64_t>(src[j]);
      for (int b = 0; b < 8; ++b) row[j * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

Matrix read_tsm(std::istream& in) {
  std::array<char, 4> head{};
  if (!in.read(head.data(), head.size()) || head != magic) throw FormatError("TSM1: bad magic");
  const std::uint64_t m = get_u64(in);
  const std::uint64_t n = get_u64(in);
  if (n != 0 && m > std::numeric_limits<std::uint64_t>::max() / 8 / n) throw FormatError("TSM1: size overflow");
  Matrix a(m, n);
  std::vector<unsigned char> row(n * 8);
  for (std::size_t i = 0; i < m; ++i) {
    if (!in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()))) {
      throw FormatError("TSM1: truncated payload");
    }
    for (std::size_t j = 0; j < n; ++j) {
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(row[j * 8 + b]) << (8 * b);
      a(i, j) = std::bit_cast<double>(bits);
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("TSM1: trailing bytes");
  return a;
}

void save_tsm(const std::filesystem::path& path, ConstMatrixView a) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_tsm(out, a);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

Matrix load_tsm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_tsm(in);
}

}  // namespace cholqr
