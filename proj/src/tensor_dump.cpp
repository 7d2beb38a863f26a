// SPDX-License-Identifier: Apache-2.0
#include "uniform/tensor_dump.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>

namespace uniform {
namespace {

constexpr char kMagic[4] = {'U', 'N', 'F', 'T'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(std::string_view bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + i])) << (8 * i);
  return v;
}

}  // namespace

std::size_t dump_size_bytes(std::size_t rows, std::size_t cols) noexcept { return kDumpHeaderBytes + 4 * rows * cols; }

std::string encode_dump(const DenseMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) {
    throw DumpError(DumpErrorKind::empty, "tensor dump: refusing to write a 0-sized matrix");
  }
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (m.rows() > kMax || m.cols() > kMax) throw DumpError(DumpErrorKind::io, "tensor dump: shape exceeds u32");
  std::string out;
  out.reserve(dump_size_bytes(m.rows(), m.cols()));
  out.append(kMagic, 4);
  put_u32(out, kDumpVersion);
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.cols()));
  for (double v : m.flat()) {
    const auto f = static_cast<float>(v);
    if (!std::isfinite(f)) {
      throw DumpError(DumpErrorKind::non_finite, "tensor dump: value " + std::to_string(v) + " is not finite in float32");
    }
    put_u32(out, std::bit_cast<std::uint32_t>(f));
  }
  return out;
}

DenseMatrix decode_dump(std::string_view bytes, const std::string& context, std::size_t* consumed) {
  if (bytes.size() < kDumpHeaderBytes) {
    throw DumpError(DumpErrorKind::truncated, context + ": truncated header (" + std::to_string(bytes.size()) + " bytes)");
  }
  if (bytes.substr(0, 4) != std::string_view(kMagic, 4)) throw DumpError(DumpErrorKind::bad_magic, context + ": bad magic");
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kDumpVersion) {
    throw DumpError(DumpErrorKind::unsupported_version, context + ": unsupported version " + std::to_string(version));
  }
  const std::size_t rows = get_u32(bytes, 8);
  const std::size_t cols = get_u32(bytes, 12);
  const std::size_t need = dump_size_bytes(rows, cols);
  if (bytes.size() < need) {
    throw DumpError(DumpErrorKind::truncated, context + ": truncated payload (expected " + std::to_string(need) +
                                                  " bytes, have " + std::to_string(bytes.size()) + ")");
  }
  if (consumed == nullptr && bytes.size() != need) {
    throw DumpError(DumpErrorKind::trailing_bytes, context + ": " + std::to_string(bytes.size() - need) + " trailing bytes");
  }
  if (rows == 0 || cols == 0) throw DumpError(DumpErrorKind::empty, context + ": empty tensor");
  std::vector<double> data(rows * cols);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = static_cast<double>(std::bit_cast<float>(get_u32(bytes, kDumpHeaderBytes + 4 * i)));
  }
  if (consumed != nullptr) *consumed = need;
  DenseMatrix m(rows, cols, std::move(data));
  if (!m.all_finite()) throw DumpError(DumpErrorKind::non_finite, context + ": non-finite payload");
  return m;
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DumpError(DumpErrorKind::io, "cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DumpError(DumpErrorKind::io, "cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DumpError(DumpErrorKind::io, "write failed for '" + path.string() + "'");
}

void write_dump(const std::filesystem::path& path, const DenseMatrix& m) {
  write_file_bytes(path, encode_dump(m));
}

DenseMatrix read_dump(const std::filesystem::path& path) { return decode_dump(read_file_bytes(path), path.string()); }

DenseMatrix round_to_f32(const DenseMatrix& m) {
  DenseMatrix out = m;
  for (double& v : out.flat()) v = static_cast<double>(static_cast<float>(v));
  return out;
}

}  // namespace uniform
