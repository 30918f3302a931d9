#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "rtcur/tensor.hpp"

namespace rtcur {

// .rtt binary tensor files: magic "RTT1", u8 mode count, that many
// little-endian u64 dims, then the float64 values in column-major order,
// also little-endian.

void write_rtt(std::ostream& out, const DenseTensor& t);
void write_rtt(const std::filesystem::path& path, const DenseTensor& t);

/// `name` only decorates error messages. Throws IoError naming the byte
/// offset where decoding failed.
DenseTensor read_rtt(std::istream& in, const std::string& name = "<stream>");
DenseTensor read_rtt(const std::filesystem::path& path);

}  // namespace rtcur
