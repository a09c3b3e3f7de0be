#include "subgcn/binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "subgcn/errors.hpp"

namespace subgcn {

namespace {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

template <typename T>
T get_le(const std::uint8_t* p) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(p[i]) << (8 * i);
  return value;
}

}  // namespace

void BinaryWriter::magic(std::string_view tag, std::uint32_t version) {
  bytes_.insert(bytes_.end(), tag.begin(), tag.end());
  u32(version);
}

void BinaryWriter::u32(std::uint32_t v) { put_le(bytes_, v); }
void BinaryWriter::u64(std::uint64_t v) { put_le(bytes_, v); }
void BinaryWriter::f64(double v) { put_le(bytes_, std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::str(std::string_view s) {
  u64(s.size());
  bytes_.insert(bytes_.end(), s.begin(), s.end());
}

void BinaryWriter::u32s(std::span<const std::uint32_t> v) {
  u64(v.size());
  for (auto x : v) u32(x);
}

void BinaryWriter::u64s(std::span<const std::uint64_t> v) {
  u64(v.size());
  for (auto x : v) u64(x);
}

void BinaryWriter::f64s(std::span<const double> v) {
  u64(v.size());
  for (double x : v) f64(x);
}

void BinaryWriter::bytes(std::span<const std::uint8_t> v) {
  u64(v.size());
  bytes_.insert(bytes_.end(), v.begin(), v.end());
}

void BinaryWriter::matrix(const Matrix& m) {
  u64(static_cast<std::uint64_t>(m.rows()));
  u64(static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.size(); ++i) f64(m.data()[i]);
}

void BinaryWriter::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes_.data()), static_cast<std::streamsize>(bytes_.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

BinaryReader::BinaryReader(std::vector<std::uint8_t> bytes, std::string name)
    : bytes_(std::move(bytes)), name_(std::move(name)) {}

BinaryReader BinaryReader::open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return BinaryReader(std::move(bytes), path.string());
}

void BinaryReader::fail(const std::string& what) const {
  throw DataError(name_ + ": " + what + " (offset " + std::to_string(pos_) + ")");
}

const std::uint8_t* BinaryReader::take(std::size_t n) {
  if (bytes_.size() - pos_ < n) fail("unexpected end of file");
  const std::uint8_t* p = bytes_.data() + pos_;
  pos_ += n;
  return p;
}

std::size_t BinaryReader::count(std::size_t element_size) {
  const std::uint64_t n = u64();
  if (n > (bytes_.size() - pos_) / element_size) fail("length field exceeds file size");
  return static_cast<std::size_t>(n);
}

std::uint32_t BinaryReader::magic(std::string_view tag, std::uint32_t max_version) {
  const std::uint8_t* p = take(tag.size());
  if (std::memcmp(p, tag.data(), tag.size()) != 0) fail("bad magic, expected " + std::string(tag));
  const std::uint32_t version = u32();
  if (version == 0 || version > max_version) fail("unsupported version " + std::to_string(version));
  return version;
}

std::uint8_t BinaryReader::u8() { return *take(1); }
std::uint32_t BinaryReader::u32() { return get_le<std::uint32_t>(take(4)); }
std::uint64_t BinaryReader::u64() { return get_le<std::uint64_t>(take(8)); }
double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

std::string BinaryReader::str() {
  const std::size_t n = count(1);
  const std::uint8_t* p = take(n);
  return std::string(reinterpret_cast<const char*>(p), n);
}

std::vector<std::uint32_t> BinaryReader::u32s() {
  std::vector<std::uint32_t> out(count(4));
  for (auto& x : out) x = u32();
  return out;
}

std::vector<std::uint64_t> BinaryReader::u64s() {
  std::vector<std::uint64_t> out(count(8));
  for (auto& x : out) x = u64();
  return out;
}

std::vector<double> BinaryReader::f64s() {
  std::vector<double> out(count(8));
  for (auto& x : out) x = f64();
  return out;
}

std::vector<std::uint8_t> BinaryReader::bytes() {
  const std::size_t n = count(1);
  const std::uint8_t* p = take(n);
  return std::vector<std::uint8_t>(p, p + n);
}

Matrix BinaryReader::matrix() {
  const std::uint64_t rows = u64();
  const std::uint64_t cols = u64();
  if (cols != 0 && rows > (bytes_.size() - pos_) / 8 / cols) fail("matrix size exceeds file size");
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = f64();
  return m;
}

void BinaryReader::expect_end() const {
  if (!at_end()) throw DataError(name_ + ": " + std::to_string(bytes_.size() - pos_) + " trailing bytes");
}

}  // namespace subgcn
