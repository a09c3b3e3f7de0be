#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subgcn/gcn.hpp"

namespace subgcn {

/// Little-endian binary container writer. Buffers in memory; save() writes
/// the whole file at once.
class BinaryWriter {
 public:
  void magic(std::string_view tag, std::uint32_t version);
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void str(std::string_view s);
  void u32s(std::span<const std::uint32_t> v);
  void u64s(std::span<const std::uint64_t> v);
  void f64s(std::span<const double> v);
  void bytes(std::span<const std::uint8_t> v);
  void matrix(const Matrix& m);

  const std::vector<std::uint8_t>& data() const { return bytes_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::uint8_t> bytes_;
};

/// Counterpart of BinaryWriter. Truncated input and bad headers raise
/// DataError naming the file.
class BinaryReader {
 public:
  BinaryReader(std::vector<std::uint8_t> bytes, std::string name);
  static BinaryReader open(const std::filesystem::path& path);

  /// Checks the tag and returns the stored version (must be <= max_version).
  std::uint32_t magic(std::string_view tag, std::uint32_t max_version);
  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::string str();
  std::vector<std::uint32_t> u32s();
  std::vector<std::uint64_t> u64s();
  std::vector<double> f64s();
  std::vector<std::uint8_t> bytes();
  Matrix matrix();

  bool at_end() const { return pos_ == bytes_.size(); }
  /// Throws unless every byte was consumed.
  void expect_end() const;
  [[noreturn]] void fail(const std::string& what) const;

 private:
  const std::uint8_t* take(std::size_t n);
  std::size_t count(std::size_t element_size);

  std::vector<std::uint8_t> bytes_;
  std::string name_;
  std::size_t pos_ = 0;
};

}  // namespace subgcn
