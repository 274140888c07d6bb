#include "hlt/features.hpp"

#include <cstring>
#include <numeric>

namespace hlt {

IntegralHistStack build_integral_histograms(const HyperCube& cube, int bins) {
    if (bins < 2) throw Error("invalid-bins: need at least 2 bins");
    IntegralHistStack s;
    s.width_ = cube.width;
    s.height_ = cube.height;
    s.bands_ = cube.bands;
    s.bins_ = bins;
    const int W = cube.width, H = cube.height;
    const size_t plane = static_cast<size_t>(W + 1) * (H + 1);
    s.tables_.assign(plane * bins * cube.bands, 0);

    for (int b = 0; b < cube.bands; ++b) {
        const float* src = cube.band_plane(b);
        int32_t* base = s.tables_.data() + static_cast<size_t>(b) * bins * plane;
        // scatter memberships, then integrate each (band,bin) plane
        for (int y = 0; y < H; ++y) {
            const float* row = src + static_cast<size_t>(y) * W;
            for (int x = 0; x < W; ++x) {
                int bi = bin_index(row[x], bins);
                base[bi * plane + static_cast<size_t>(y + 1) * (W + 1) + (x + 1)] = 1;
            }
        }
        for (int bi = 0; bi < bins; ++bi) {
            int32_t* t = base + bi * plane;
            for (int y = 1; y <= H; ++y) {
                int32_t* row = t + static_cast<size_t>(y) * (W + 1);
                const int32_t* up = row - (W + 1);
                int32_t run = 0;
                for (int x = 1; x <= W; ++x) {
                    run += row[x];
                    row[x] = run + up[x];
                }
            }
        }
    }
    return s;
}

GroupHistogram window_histogram(const IntegralHistStack& stack, const Rect& rect,
                                const BandRange& group) {
    if (group.begin < 0 || group.end > stack.bands() || group.size() < 1)
        throw Error("invalid-group: band range outside stack");
    Rect r = rect.clamped(stack.width(), stack.height());
    if (r.w <= 0 || r.h <= 0)
        throw Error("empty-histogram: zero-area window");
    const int bins = stack.bins();
    GroupHistogram h;
    h.values.resize(static_cast<size_t>(group.size()) * bins);
    int64_t total = 0;
    size_t k = 0;
    for (int b = group.begin; b < group.end; ++b)
        for (int bi = 0; bi < bins; ++bi) {
            int32_t c = stack.window_count(b, bi, r.x, r.y, r.x2(), r.y2());
            total += c;
            h.values[k++] = static_cast<double>(c);
        }
    // total == bands * area > 0 by construction
    const double inv = 1.0 / static_cast<double>(total);
    for (double& v : h.values) v *= inv;
    return h;
}

double chi2_distance(const GroupHistogram& p, const GroupHistogram& q) {
    if (p.dim() != q.dim())
        throw Error("dimension-mismatch: histogram sizes differ");
    double d = 0.0;
    for (size_t i = 0; i < p.values.size(); ++i) {
        double a = p.values[i], b = q.values[i];
        double s = a + b;
        if (s > 0.0) {
            double diff = a - b;
            d += diff * diff / s;
        }
    }
    return d;
}

}  // namespace hlt
