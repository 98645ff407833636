#include "turtleid/brief_pattern.hpp"

#include <fstream>
#include <sstream>

#include "turtleid/error.hpp"

namespace turtleid {

namespace {

// Canonical copy of data/brief_pattern.txt. Offsets were drawn once from
// an isotropic Gaussian (sigma = 31/5) truncated to a disc of radius
// 14.5, degenerate pairs redrawn.
constexpr std::array<BriefPair, kBriefBits> kPattern = {{
    {-1, -1, -1, 4},
    {-1, -9, 2, -2},
    {-1, 1, 1, 7},
    {4, 1, -5, -6},
    {2, 8, 0, -1},
    {3, -9, -2, 3},
    {5, -1, 2, 2},
    {5, -7, 4, -9},
    {-6, 5, 4, -8},
    {5, -6, -1, -2},
    {1, 5, 4, 2},
    {4, 3, -4, -4},
    {-3, 3, -2, 14},
    {-5, -7, 5, 9},
    {3, 5, 9, -1},
    {-9, -3, 6, -9},
    {0, 2, -2, 4},
    {4, -4, -3, -5},
    {6, -4, 0, 5},
    {-4, -2, -11, -7},
    {-4, 3, 7, 0},
    {2, 1, 7, 6},
    {2, -6, 6, 2},
    {8, 0, 12, -2},
    {10, 1, -3, -7},
    {-1, 9, 5, 4},
    {3, -3, -4, 0},
    {11, -7, -3, 8},
    {-3, -2, 1, -8},
    {1, -7, 5, 0},
    {14, 2, 8, -8},
    {-1, 2, 6, 4},
    {10, 4, 0, -3},
    {-8, 1, -1, 13},
    {-4, 2, -10, -2},
    {2, 5, 9, 0},
    {-7, 3, 3, 3},
    {-4, 7, 1, 4},
    {8, 4, 2, 13},
    {2, -2, 1, 9},
    {1, 3, 7, -3},
    {-11, 2, 1, -4},
    {5, 4, -6, 3},
    {-1, -9, 3, 0},
    {-5, 3, 3, -4},
    {2, 6, -4, 2},
    {0, 14, -12, 4},
    {-2, -1, 12, 0},
    {14, -3, 2, -3},
    {-4, 0, -2, 1},
    {-1, 11, -6, 2},
    {-9, -3, 3, 4},
    {8, -2, -10, -3},
    {8, 3, -12, 0},
    {3, 2, -8, -5},
    {0, 3, 4, -3},
    {-7, -5, -7, 4},
    {-14, -2, 3, 9},
    {0, 6, -2, -5},
    {-4, 9, 6, 3},
    {4, 2, -1, 14},
    {9, -9, -2, 3},
    {5, -8, 0, -1},
    {2, -5, 2, 2},
    {6, 5, -1, 8},
    {-1, -4, -3, -4},
    {-13, 1, 2, -2},
    {-4, 2, 11, 0},
    {-3, -4, 0, -8},
    {-1, 0, 11, 6},
    {6, -4, 4, -7},
    {2, 3, -5, 12},
    {4, -12, 3, -3},
    {0, 3, 2, -13},
    {-7, 5, 8, 12},
    {5, -12, 10, 2},
    {-7, 12, 4, -12},
    {2, -5, 1, -3},
    {9, -9, 2, 11},
    {-5, 1, 1, -4},
    {4, 1, -6, 11},
    {5, -1, -4, -5},
    {8, -1, 3, -1},
    {4, -1, 5, -1},
    {5, 4, -1, -5},
    {-6, -5, -6, 5},
    {0, 10, 14, 0},
    {-10, -2, 0, -9},
    {-2, 2, -3, -5},
    {-5, 11, -1, -5},
    {-2, 6, -4, 3},
    {5, 5, 9, -3},
    {7, -5, -2, 7},
    {5, 0, -7, 3},
    {-4, -6, -4, 2},
    {-13, 2, 1, -4},
    {6, 4, -4, -4},
    {4, -9, -2, -4},
    {0, 1, 0, 7},
    {1, -2, -8, 4},
    {3, 9, -5, 0},
    {0, -1, 0, -11},
    {5, 4, -2, 0},
    {0, 12, -11, 3},
    {7, -5, -1, -7},
    {4, -7, 8, -6},
    {-5, 1, 0, 9},
    {1, -7, -3, -4},
    {4, 2, -1, 5},
    {-3, -1, 1, 9},
    {-1, -2, -6, 4},
    {-4, 2, -12, 6},
    {-8, -5, 7, -8},
    {0, 0, -6, 8},
    {-9, 5, -8, -2},
    {1, 4, -1, 1},
    {-5, 8, -3, 2},
    {-3, 1, -1, -1},
    {-6, 5, 9, 2},
    {5, 5, 6, 2},
    {1, 5, 0, -6},
    {0, -12, 0, 3},
    {8, 1, 6, 0},
    {-6, -9, -6, -8},
    {4, -1, 4, 0},
    {6, 7, -4, -2},
    {-3, -10, 4, 7},
    {0, -3, 1, 1},
    {-4, 9, 6, -2},
    {-1, -2, -3, -8},
    {9, 6, 5, -7},
    {1, -6, -5, 3},
    {-6, 0, 7, -9},
    {-8, -9, -2, -6},
    {-1, 11, -7, -2},
    {-9, 4, -1, 12},
    {1, -2, 3, -3},
    {-8, 2, -1, 1},
    {2, -3, 3, 11},
    {-7, 11, -2, -5},
    {8, 5, -10, 1},
    {-3, -8, -11, 1},
    {4, 2, -2, -5},
    {-6, -3, -6, -1},
    {0, -6, -1, -5},
    {0, 3, 1, 3},
    {-10, -2, 2, 4},
    {-10, 1, 7, -1},
    {-1, 3, 2, 4},
    {0, 1, -5, -1},
    {8, -1, -1, -3},
    {5, -5, 6, -6},
    {-7, 1, 1, 2},
    {7, -3, 3, -6},
    {8, 4, 3, 1},
    {-5, -2, 3, 0},
    {1, -8, 1, -4},
    {-7, -1, -12, 4},
    {5, 0, -6, -6},
    {1, 4, -2, -3},
    {1, 2, 7, 0},
    {-4, -3, 1, 10},
    {-2, -7, -5, -13},
    {2, -8, -8, -12},
    {-7, 4, -8, -11},
    {1, -2, 3, 5},
    {0, -8, -1, 3},
    {-4, -9, 7, -3},
    {-3, 0, 6, 2},
    {-2, 4, 4, -7},
    {-2, -4, 10, 3},
    {-9, 2, 3, -2},
    {-8, -4, -3, 0},
    {-3, 5, -6, -11},
    {-5, 8, 3, -7},
    {-5, 2, -6, 4},
    {9, -1, -6, -2},
    {2, 5, 0, -9},
    {0, -4, -9, 4},
    {-4, -3, 4, 7},
    {-3, -1, 14, -1},
    {-3, 1, 4, -6},
    {-2, -7, -2, 12},
    {5, -1, -6, -2},
    {7, -3, 9, -9},
    {-2, 11, -12, 7},
    {-11, -1, -1, 5},
    {-4, 0, -6, -1},
    {-7, -2, -5, 2},
    {4, 9, -4, -2},
    {0, -2, 0, -10},
    {2, -6, -6, -10},
    {7, -1, 7, 2},
    {-11, -7, 5, -5},
    {-7, -1, -1, -6},
    {-2, -3, -5, 8},
    {-7, -10, 7, -10},
    {-4, 4, -2, -10},
    {1, -1, 8, 4},
    {0, -7, 7, 5},
    {5, -5, -5, -13},
    {11, 3, -2, 6},
    {5, 6, -10, -4},
    {1, 2, 6, -6},
    {1, 14, 4, 5},
    {0, 5, 11, 1},
    {8, -5, 4, 6},
    {-5, 7, -4, -5},
    {0, 12, 2, 6},
    {-5, 0, -7, -4},
    {5, 0, 9, -1},
    {-1, 8, -4, -9},
    {8, 3, -13, 0},
    {-3, 11, -5, -4},
    {-6, -7, -4, -9},
    {-6, -10, -9, -10},
    {-3, -4, -8, 3},
    {0, -3, -3, 10},
    {1, 3, -13, -3},
    {2, -4, 3, -6},
    {4, -10, -2, 3},
    {3, -1, 12, -3},
    {11, -2, -7, 8},
    {8, 1, -9, 3},
    {-4, -7, 6, -13},
    {4, 3, 13, 2},
    {-13, -5, 0, 2},
    {6, -12, -2, 6},
    {-2, 7, 11, 7},
    {4, 5, -5, -9},
    {6, -2, 0, -4},
    {-2, 1, -6, 0},
    {2, 0, -5, 5},
    {12, -4, 8, 6},
    {-4, 5, 1, 3},
    {4, -6, -5, -8},
    {-1, -1, 1, -5},
    {6, 6, 10, 4},
    {1, 4, 4, -4},
    {8, 11, 12, 0},
    {2, 3, 0, 4},
    {-1, -1, 11, 1},
    {0, 5, 1, 2},
    {0, -8, 0, -7},
    {1, -7, 6, 5},
    {2, -1, 3, -12},
    {-7, -1, 2, 0},
    {-6, 1, -3, -7},
    {2, -1, 7, 4},
    {5, 2, -5, -6},
    {-7, -1, -2, -2},
    {-4, -12, -6, -9},
    {-1, -4, -4, 1},
    {-4, 6, -2, 1},
    {-8, 4, -3, 3},
    {2, -1, 1, -2}
}};

}  // namespace

const std::array<BriefPair, kBriefBits>& brief_pattern() { return kPattern; }

std::vector<BriefPair> load_brief_pattern(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile(path.string());
    std::vector<BriefPair> pairs;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        BriefPair p{};
        if (!(ss >> p.x1 >> p.y1 >> p.x2 >> p.y2))
            throw ParseError(line_no, "expected 4 integers");
        pairs.push_back(p);
    }
    return pairs;
}

}  // namespace turtleid
