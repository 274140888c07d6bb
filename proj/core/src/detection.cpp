#include "hlt/detection.hpp"

#include <algorithm>
#include <queue>

namespace hlt {

BinaryMap morphological_close(const BinaryMap& bin) {
    const int W = bin.width, H = bin.height;
    BinaryMap dil = bin;
    auto idx = [W](int x, int y) { return static_cast<size_t>(y) * W + x; };
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            uint8_t v = 0;
            for (int dy = -1; dy <= 1 && !v; ++dy)
                for (int dx = -1; dx <= 1 && !v; ++dx) {
                    int nx = x + dx, ny = y + dy;
                    if (nx >= 0 && nx < W && ny >= 0 && ny < H && bin.grid[idx(nx, ny)])
                        v = 1;
                }
            dil.grid[idx(x, y)] = v;
        }
    BinaryMap out = dil;
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            uint8_t v = 1;
            for (int dy = -1; dy <= 1 && v; ++dy)
                for (int dx = -1; dx <= 1 && v; ++dx) {
                    int nx = x + dx, ny = y + dy;
                    // pixels outside the image count as foreground for erosion
                    // so closing stays anti-extensive at borders
                    if (nx >= 0 && nx < W && ny >= 0 && ny < H && !dil.grid[idx(nx, ny)])
                        v = 0;
                }
            out.grid[idx(x, y)] = v;
        }
    return out;
}

std::vector<Blob> connected_components(const BinaryMap& bin) {
    const int W = bin.width, H = bin.height;
    std::vector<int32_t> label(bin.grid.size(), -1);
    std::vector<Blob> blobs;
    std::vector<std::pair<int, int>> stack;
    for (int y0 = 0; y0 < H; ++y0)
        for (int x0 = 0; x0 < W; ++x0) {
            size_t i0 = static_cast<size_t>(y0) * W + x0;
            if (!bin.grid[i0] || label[i0] >= 0) continue;
            int id = static_cast<int>(blobs.size());
            Blob b;
            b.id = id;
            int minx = x0, maxx = x0, miny = y0, maxy = y0;
            double sx = 0.0, sy = 0.0;
            stack.clear();
            stack.emplace_back(x0, y0);
            label[i0] = id;
            while (!stack.empty()) {
                auto [x, y] = stack.back();
                stack.pop_back();
                ++b.area;
                sx += x;
                sy += y;
                minx = std::min(minx, x);
                maxx = std::max(maxx, x);
                miny = std::min(miny, y);
                maxy = std::max(maxy, y);
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        int nx = x + dx, ny = y + dy;
                        if (nx < 0 || nx >= W || ny < 0 || ny >= H) continue;
                        size_t ni = static_cast<size_t>(ny) * W + nx;
                        if (bin.grid[ni] && label[ni] < 0) {
                            label[ni] = id;
                            stack.emplace_back(nx, ny);
                        }
                    }
            }
            b.cx = sx / b.area;
            b.cy = sy / b.area;
            b.bbox = {minx, miny, maxx - minx + 1, maxy - miny + 1};
            blobs.push_back(std::move(b));
        }
    return blobs;
}

std::vector<Blob> extract_candidates(const LikelihoodMap& fused,
                                     const IntegralHistStack& stack,
                                     const BandGrouping& grouping,
                                     const DetectionParams& params) {
    if (params.min_area < 1 || params.max_area < params.min_area)
        throw Error("invalid-area-filter");
    auto thresholds = otsu_multilevel(fused, params.otsu_levels);
    BinaryMap bin = binarize(fused, thresholds.back());
    bin = morphological_close(bin);
    auto blobs = connected_components(bin);

    std::vector<Blob> out;
    for (auto& b : blobs) {
        if (b.area < params.min_area || b.area > params.max_area) continue;
        // mean confidence over the bbox of the fused map
        double sum = 0.0;
        for (int y = b.bbox.y; y < b.bbox.y2(); ++y)
            for (int x = b.bbox.x; x < b.bbox.x2(); ++x) sum += fused.at(x, y);
        b.mean_confidence = sum / b.bbox.area();
        b.group_hists.reserve(grouping.n_groups());
        for (const auto& g : grouping.groups)
            b.group_hists.push_back(window_histogram(stack, b.bbox, g));
        out.push_back(std::move(b));
    }
    std::stable_sort(out.begin(), out.end(), [](const Blob& a, const Blob& b) {
        return a.mean_confidence > b.mean_confidence;
    });
    for (size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
    return out;
}

}  // namespace hlt
