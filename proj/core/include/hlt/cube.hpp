#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hlt {

// Errors carry a short machine-parseable category prefix in what().
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    int x2() const { return x + w; }
    int y2() const { return y + h; }
    int area() const { return w * h; }
    bool contains(double px, double py) const {
        return px >= x && px < x2() && py >= y && py < y2();
    }
    bool operator==(const Rect&) const = default;

    // Intersection with [0,w)x[0,h) of a host image. May be empty (w or h <= 0).
    Rect clamped(int host_w, int host_h) const;
};

double rect_iou(const Rect& a, const Rect& b);

// Hyperspectral reflectance cube, band-major (BSQ) storage:
// data[b * height * width + y * width + x]. Immutable after construction
// by convention; all processing treats it as read-only.
struct HyperCube {
    int width = 0;
    int height = 0;
    int bands = 0;
    std::vector<double> wavelengths_nm;
    std::vector<float> data;

    float at(int x, int y, int b) const {
        return data[(static_cast<size_t>(b) * height + y) * width + x];
    }
    float& at(int x, int y, int b) {
        return data[(static_cast<size_t>(b) * height + y) * width + x];
    }
    const float* band_plane(int b) const {
        return data.data() + static_cast<size_t>(b) * height * width;
    }

    // Throws Error if any invariant is violated (dims, wavelength order,
    // value range, finiteness).
    void validate() const;
};

struct BandRange {
    int begin = 0;  // inclusive
    int end = 0;    // exclusive
    int size() const { return end - begin; }
    bool operator==(const BandRange&) const = default;
};

struct BandGrouping {
    std::vector<BandRange> groups;
    int bands_per_group = 0;
    int n_groups() const { return static_cast<int>(groups.size()); }
};

// Splits [0, bands) into n_groups contiguous equal ranges in spectral order.
// Throws Error("invalid-grouping: ...") if n_groups does not divide bands.
BandGrouping make_grouping(int bands, int n_groups);

// Crops a sub-cube. roi is clamped to cube bounds first; a zero-area result
// is an error. Band metadata is preserved.
HyperCube crop_roi(const HyperCube& cube, const Rect& roi);

// File I/O: <stem>.bsq holds raw little-endian float32 in band-major order,
// <stem>.json holds {"width","height","bands","wavelengths_nm"}. `path` may
// be the stem or either filename.
void save_cube(const HyperCube& cube, const std::string& path);
HyperCube load_cube(const std::string& path);

}  // namespace hlt
