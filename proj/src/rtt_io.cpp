#include "rtcur/rtt_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "rtcur/error.hpp"

namespace rtcur {

namespace {

constexpr std::array<char, 4> kMagic{'R', 'T', 'T', '1'};
constexpr std::size_t kMaxOrder = 255;

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (std::size_t i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(bytes.data(), bytes.size());
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

[[noreturn]] void fail(const std::string& name, std::uint64_t offset, const std::string& what) {
  throw IoError(name + ": " + what + " at offset " + std::to_string(offset));
}

}  // namespace

void write_rtt(std::ostream& out, const DenseTensor& t) {
  if (t.order() > kMaxOrder) throw DimensionError("too many modes for the rtt format");
  out.write(kMagic.data(), kMagic.size());
  out.put(static_cast<char>(t.order()));
  for (std::size_t d : t.dims()) put_u64(out, d);
  for (double v : t.data()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  if (!out) throw IoError("failed writing rtt stream");
}

void write_rtt(const std::filesystem::path& path, const DenseTensor& t) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  write_rtt(out, t);
  out.close();
  if (!out) throw IoError(path.string() + ": write failed");
}

DenseTensor read_rtt(std::istream& in, const std::string& name) {
  std::uint64_t offset = 0;
  auto read_exact = [&](void* dst, std::size_t n, const char* what) {
    in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
      fail(name, offset + static_cast<std::uint64_t>(in.gcount()),
           std::string("truncated ") + what);
    }
    offset += n;
  };

  std::array<char, 4> magic{};
  read_exact(magic.data(), magic.size(), "magic");
  if (magic != kMagic) fail(name, 0, "bad magic bytes");

  unsigned char order = 0;
  read_exact(&order, 1, "mode count");
  if (order == 0) fail(name, 4, "mode count must be at least 1");

  Dims dims(order);
  std::uint64_t count = 1;
  for (std::size_t m = 0; m < order; ++m) {
    const std::uint64_t at = offset;
    std::array<unsigned char, 8> b{};
    read_exact(b.data(), b.size(), "dimension");
    const std::uint64_t d = get_u64(b.data());
    if (d == 0) fail(name, at, "zero dimension");
    if (count > std::numeric_limits<std::uint64_t>::max() / 8 / d) {
      fail(name, at, "dimension product overflows");
    }
    count *= d;
    dims[m] = static_cast<std::size_t>(d);
  }

  // Seekable streams: reject a short payload before allocating for it.
  const auto here = in.tellg();
  if (here != std::streampos(-1)) {
    in.seekg(0, std::ios::end);
    const auto end = in.tellg();
    in.seekg(here);
    const auto available = static_cast<std::uint64_t>(end - here);
    if (available < count * 8) fail(name, offset + available, "truncated payload");
  }

  std::vector<double> data(static_cast<std::size_t>(count));
  std::vector<unsigned char> raw(static_cast<std::size_t>(count) * 8);
  read_exact(raw.data(), raw.size(), "payload");
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = std::bit_cast<double>(get_u64(raw.data() + 8 * i));
  }
  return DenseTensor(std::move(dims), std::move(data));
}

DenseTensor read_rtt(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  return read_rtt(in, path.string());
}

}  // namespace rtcur
