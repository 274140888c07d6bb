#pragma once

#include <vector>

#include "hlt/cube.hpp"

namespace hlt {

// Per-band L1-normalized histogram concatenation for one band group
// (e.g. 5 bands x 10 bins = 50-D). Normalization is over the whole
// concatenated vector so relative band energy is preserved.
struct GroupHistogram {
    std::vector<double> values;
    int dim() const { return static_cast<int>(values.size()); }
};

// Per-(band,bin) summed-area tables of bin-membership counts. Tables are
// (H+1)x(W+1) int32 so any window histogram is four lookups per (band,bin).
// Immutable after build.
class IntegralHistStack {
public:
    IntegralHistStack() = default;

    int width() const { return width_; }
    int height() const { return height_; }
    int bands() const { return bands_; }
    int bins() const { return bins_; }

    // Raw count of pixels of `band` falling in `bin` inside rect
    // [x0,x1) x [y0,y1). Coordinates must already be clamped.
    int32_t window_count(int band, int bin, int x0, int y0, int x1, int y1) const {
        const int32_t* t = table(band, bin);
        const int s = width_ + 1;
        return t[y1 * s + x1] - t[y1 * s + x0] - t[y0 * s + x1] + t[y0 * s + x0];
    }

    const int32_t* table(int band, int bin) const {
        return tables_.data() +
               (static_cast<size_t>(band) * bins_ + bin) * (width_ + 1) * (height_ + 1);
    }

    friend IntegralHistStack build_integral_histograms(const HyperCube&, int);

private:
    int width_ = 0, height_ = 0, bands_ = 0, bins_ = 0;
    std::vector<int32_t> tables_;
};

// Bin index for a reflectance value with `bins` uniform bins over [0,1];
// the last bin is closed above so 1.0 lands in bin bins-1.
inline int bin_index(float v, int bins) {
    int b = static_cast<int>(v * bins);
    return b >= bins ? bins - 1 : b;
}

IntegralHistStack build_integral_histograms(const HyperCube& cube, int bins = 10);

// Concatenated per-band histogram of `rect` over the bands of `group`,
// L1-normalized. rect is clamped to the image; zero area is an error.
GroupHistogram window_histogram(const IntegralHistStack& stack, const Rect& rect,
                                const BandRange& group);

// Chi-square distance sum_i (p_i-q_i)^2/(p_i+q_i), 0/0 terms contribute 0.
// In [0,2] for L1-normalized inputs.
double chi2_distance(const GroupHistogram& p, const GroupHistogram& q);

}  // namespace hlt
