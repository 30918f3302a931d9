#pragma once

#include <filesystem>

#include "rtcur/cur.hpp"

namespace rtcur {

// A model directory holds manifest.txt, core.rtt, c<i>.rtt (fibers as 2-mode
// tensors) and svd<i>_left.rtt / svd<i>_sigma.rtt / svd<i>_right.rtt for the
// truncated SVD of each U_i, with i counted from 1. Indices in the manifest
// are zero-based.

void save_model(const CurModel& model, const std::filesystem::path& dir);

/// Throws IoError on unreadable files and DimensionError when the manifest
/// and the stored blocks disagree.
CurModel load_model(const std::filesystem::path& dir);

}  // namespace rtcur
