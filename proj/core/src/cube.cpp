#include "hlt/cube.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace hlt {

static_assert(std::endian::native == std::endian::little,
              "BSQ I/O assumes a little-endian host");

Rect Rect::clamped(int host_w, int host_h) const {
    int nx0 = std::max(x, 0);
    int ny0 = std::max(y, 0);
    int nx1 = std::min(x + w, host_w);
    int ny1 = std::min(y + h, host_h);
    return Rect{nx0, ny0, nx1 - nx0, ny1 - ny0};
}

double rect_iou(const Rect& a, const Rect& b) {
    int ix0 = std::max(a.x, b.x);
    int iy0 = std::max(a.y, b.y);
    int ix1 = std::min(a.x2(), b.x2());
    int iy1 = std::min(a.y2(), b.y2());
    if (ix1 <= ix0 || iy1 <= iy0) return 0.0;
    double inter = double(ix1 - ix0) * (iy1 - iy0);
    double uni = double(a.area()) + double(b.area()) - inter;
    return inter / uni;
}

void HyperCube::validate() const {
    if (width < 1 || height < 1 || bands < 1)
        throw Error("invalid-cube: non-positive dimensions");
    if (static_cast<int>(wavelengths_nm.size()) != bands)
        throw Error("invalid-cube: wavelength count does not match bands");
    for (int b = 1; b < bands; ++b)
        if (!(wavelengths_nm[b] > wavelengths_nm[b - 1]))
            throw Error("invalid-cube: wavelengths not strictly increasing");
    if (data.size() != static_cast<size_t>(width) * height * bands)
        throw Error("size-mismatch: data length != width*height*bands");
    for (float v : data)
        if (!std::isfinite(v) || v < 0.0f || v > 1.0f)
            throw Error("range-error: reflectance outside [0,1] or non-finite");
}

BandGrouping make_grouping(int bands, int n_groups) {
    if (n_groups < 1 || bands < 1 || bands % n_groups != 0)
        throw Error("invalid-grouping: " + std::to_string(n_groups) +
                    " groups do not evenly divide " + std::to_string(bands) +
                    " bands");
    BandGrouping g;
    g.bands_per_group = bands / n_groups;
    g.groups.reserve(n_groups);
    for (int i = 0; i < n_groups; ++i)
        g.groups.push_back({i * g.bands_per_group, (i + 1) * g.bands_per_group});
    return g;
}

HyperCube crop_roi(const HyperCube& cube, const Rect& roi) {
    Rect r = roi.clamped(cube.width, cube.height);
    if (r.w <= 0 || r.h <= 0) throw Error("empty-roi: zero area after clamping");
    HyperCube out;
    out.width = r.w;
    out.height = r.h;
    out.bands = cube.bands;
    out.wavelengths_nm = cube.wavelengths_nm;
    out.data.resize(static_cast<size_t>(r.w) * r.h * cube.bands);
    for (int b = 0; b < cube.bands; ++b) {
        const float* src = cube.band_plane(b);
        float* dst = out.data.data() + static_cast<size_t>(b) * r.w * r.h;
        for (int y = 0; y < r.h; ++y)
            std::memcpy(dst + static_cast<size_t>(y) * r.w,
                        src + static_cast<size_t>(r.y + y) * cube.width + r.x,
                        sizeof(float) * r.w);
    }
    return out;
}

static std::string stem_of(const std::string& path) {
    if (path.ends_with(".bsq") || path.ends_with(".json"))
        return path.substr(0, path.rfind('.'));
    return path;
}

void save_cube(const HyperCube& cube, const std::string& path) {
    cube.validate();
    const std::string stem = stem_of(path);
    nlohmann::json hdr = {{"width", cube.width},
                          {"height", cube.height},
                          {"bands", cube.bands},
                          {"wavelengths_nm", cube.wavelengths_nm}};
    std::ofstream jf(stem + ".json");
    if (!jf) throw Error("io-error: cannot write " + stem + ".json");
    jf << hdr.dump(2) << "\n";
    std::ofstream bf(stem + ".bsq", std::ios::binary);
    if (!bf) throw Error("io-error: cannot write " + stem + ".bsq");
    bf.write(reinterpret_cast<const char*>(cube.data.data()),
             static_cast<std::streamsize>(cube.data.size() * sizeof(float)));
}

HyperCube load_cube(const std::string& path) {
    const std::string stem = stem_of(path);
    std::ifstream jf(stem + ".json");
    if (!jf) throw Error("io-error: missing header " + stem + ".json");
    nlohmann::json hdr;
    try {
        jf >> hdr;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("parse-error: malformed header: ") + e.what());
    }
    HyperCube cube;
    try {
        cube.width = hdr.at("width").get<int>();
        cube.height = hdr.at("height").get<int>();
        cube.bands = hdr.at("bands").get<int>();
        cube.wavelengths_nm = hdr.at("wavelengths_nm").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("parse-error: header fields: ") + e.what());
    }
    std::ifstream bf(stem + ".bsq", std::ios::binary);
    if (!bf) throw Error("io-error: missing payload " + stem + ".bsq");
    bf.seekg(0, std::ios::end);
    const auto nbytes = static_cast<size_t>(bf.tellg());
    bf.seekg(0);
    if (cube.width < 1 || cube.height < 1 || cube.bands < 1)
        throw Error("parse-error: non-positive dimensions in header");
    const size_t expected =
        static_cast<size_t>(cube.width) * cube.height * cube.bands;
    if (nbytes != expected * sizeof(float))
        throw Error("size-mismatch: payload holds " +
                    std::to_string(nbytes / sizeof(float)) +
                    " floats, header declares " + std::to_string(expected));
    cube.data.resize(expected);
    bf.read(reinterpret_cast<char*>(cube.data.data()),
            static_cast<std::streamsize>(nbytes));
    cube.validate();
    return cube;
}

}  // namespace hlt
