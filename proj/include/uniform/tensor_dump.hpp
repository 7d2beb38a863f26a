// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "uniform/matrix.hpp"

namespace uniform {

// Layout: "UNFT" | u32 version (1) | u32 n_samples | u32 dim | n_samples*dim
// little-endian float32, row-major. Header is 16 bytes.
inline constexpr std::uint32_t kDumpVersion = 1;
inline constexpr std::size_t kDumpHeaderBytes = 16;

enum class DumpErrorKind { io, bad_magic, unsupported_version, truncated, trailing_bytes, empty, non_finite };

class DumpError : public Error {
 public:
  DumpError(DumpErrorKind kind, const std::string& message) : Error(message), kind_(kind) {}
  DumpErrorKind kind() const noexcept { return kind_; }

 private:
  DumpErrorKind kind_;
};

std::size_t dump_size_bytes(std::size_t rows, std::size_t cols) noexcept;

/// Serializes to the dump layout. Narrowing to float32 rounds to nearest even.
std::string encode_dump(const DenseMatrix& m);

/// Parses one dump from the front of `bytes`. `context` names the source in
/// error messages. When `consumed` is null, trailing bytes are an error.
DenseMatrix decode_dump(std::string_view bytes, const std::string& context, std::size_t* consumed = nullptr);

void write_dump(const std::filesystem::path& path, const DenseMatrix& m);
DenseMatrix read_dump(const std::filesystem::path& path);

/// Rounds every entry through float32, i.e. what a write/read cycle yields.
DenseMatrix round_to_f32(const DenseMatrix& m);

std::string read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::string_view bytes);

}  // namespace uniform
