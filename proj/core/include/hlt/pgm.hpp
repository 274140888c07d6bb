#pragma once

#include <cmath>
#include <fstream>

#include "hlt/likelihood.hpp"

namespace hlt {

// 8-bit binary PGM, value = round(255 * confidence).
inline void write_pgm(const LikelihoodMap& map, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("io-error: cannot write " + path);
    f << "P5\n" << map.width << " " << map.height << "\n255\n";
    for (double v : map.grid) {
        unsigned char c = static_cast<unsigned char>(
            std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
        f.put(static_cast<char>(c));
    }
}

}  // namespace hlt
