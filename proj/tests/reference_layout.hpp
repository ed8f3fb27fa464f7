#pragma once

// Independent fragment layout used as a test oracle. Works on glyph strings:
// '.' blank, '$' fragment end, '&' copy separator.

#include <cmath>
#include <string>
#include <vector>

namespace mulimit::testing {

// Cut into floor(sqrt n) slices, pick the word by how many times the slice
// number halves, then tile.
inline std::string reference_layout(std::size_t n, const std::vector<std::string>& w) {
    if (w.empty()) {
        return std::string();
    }
    std::size_t f = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    while (f * f > n) {
        --f;
    }
    while ((f + 1) * (f + 1) <= n) {
        ++f;
    }
    std::string out;
    for (std::size_t j = 1; j <= f; ++j) {
        std::size_t level = 1;
        for (std::size_t x = j; x % 2 == 0 && level < w.size(); x /= 2) {
            ++level;
        }
        const std::string& word = w[level - 1];
        std::string body;
        if (!word.empty()) {
            std::string tiled = word;
            while (tiled.size() + 1 + word.size() <= f - 1) {
                tiled += "&" + word;
            }
            if (tiled.size() <= f - 1) {
                body = tiled;
            }
        }
        body.resize(f - 1, '.');
        out += body + "$";
    }
    out.resize(n, '.');
    return out;
}

} // namespace mulimit::testing
