#pragma once

#include <array>
#include <filesystem>
#include <vector>

namespace turtleid {

// One BRIEF comparison: the bit is 1 iff intensity at (x2, y2) is
// strictly greater than at (x1, y1).
struct BriefPair {
    int x1, y1, x2, y2;
};

inline constexpr int kBriefBits = 256;

// The fixed sampling pattern: offsets drawn once from an isotropic
// Gaussian (sigma = patch/5) truncated to a disc of radius 14.5 so every
// discretized rotation stays inside the 31x31 patch. The same table is
// committed as data/brief_pattern.txt (256 rows of "x1 y1 x2 y2").
const std::array<BriefPair, kBriefBits>& brief_pattern();

std::vector<BriefPair> load_brief_pattern(const std::filesystem::path& path);

}  // namespace turtleid
