#include "hlt/likelihood.hpp"

#include <algorithm>
#include <cmath>

#include "hlt/parallel.hpp"

namespace hlt {

TargetModel init_target_model(const HyperCube& cube, const Rect& bbox,
                              const BandGrouping& grouping, int bins) {
    Rect r = bbox.clamped(cube.width, cube.height);
    if (r.w < 2 || r.h < 2) throw Error("degenerate-bbox: need at least 2x2");
    TargetModel model;
    model.group_hists.reserve(grouping.n_groups());
    for (const auto& g : grouping.groups) {
        GroupHistogram h;
        h.values.assign(static_cast<size_t>(g.size()) * bins, 0.0);
        for (int b = g.begin; b < g.end; ++b) {
            const float* plane = cube.band_plane(b);
            double* dst = h.values.data() + static_cast<size_t>(b - g.begin) * bins;
            for (int y = r.y; y < r.y2(); ++y)
                for (int x = r.x; x < r.x2(); ++x)
                    dst[bin_index(plane[static_cast<size_t>(y) * cube.width + x], bins)] += 1.0;
        }
        double total = static_cast<double>(r.area()) * g.size();
        for (double& v : h.values) v /= total;
        model.group_hists.push_back(std::move(h));
    }
    return model;
}

LikelihoodMap compute_likelihood_map(const IntegralHistStack& stack,
                                     const BandRange& group, int group_id,
                                     const TargetModel& model,
                                     ConfidenceMapping mapping, double exp_sigma) {
    const int W = stack.width(), H = stack.height();
    // smallest window must fit entirely
    int need = 0;
    for (const auto& s : model.shapes) need = need == 0 ? std::max(s.w, s.h) : std::min(need, std::max(s.w, s.h));
    if (W < need || H < need)
        throw Error("roi-too-small: ROI smaller than smallest window");
    if (group_id >= model.n_groups())
        throw Error("invalid-group: no model histogram for group");
    const GroupHistogram& q = model.group_hists[group_id];
    const int bins = stack.bins();
    if (q.dim() != group.size() * bins)
        throw Error("dimension-mismatch: model histogram vs grouping");

    LikelihoodMap map;
    map.width = W;
    map.height = H;
    map.group_id = group_id;
    map.grid.assign(static_cast<size_t>(W) * H, 0.0);
    const size_t npx = map.grid.size();

    std::vector<double> chi2(npx);
    std::vector<double> inv_tot(npx);
    std::vector<int> x0(W), x1(W), y0(H), y1(H);
    const int stride = W + 1;
    bool first_shape = true;

    for (const auto& shape : model.shapes) {
        // centered, clamped (shrunk) window extents per row/column
        for (int x = 0; x < W; ++x) {
            x0[x] = std::max(0, x - shape.w / 2);
            x1[x] = std::min(W, x - shape.w / 2 + shape.w);
        }
        for (int y = 0; y < H; ++y) {
            y0[y] = std::max(0, y - shape.h / 2);
            y1[y] = std::min(H, y - shape.h / 2 + shape.h);
        }
        for (int y = 0; y < H; ++y) {
            const double hy = y1[y] - y0[y];
            double* row = inv_tot.data() + static_cast<size_t>(y) * W;
            for (int x = 0; x < W; ++x)
                row[x] = 1.0 / (hy * (x1[x] - x0[x]) * group.size());
        }
        std::fill(chi2.begin(), chi2.end(), 0.0);

        size_t d = 0;
        for (int b = group.begin; b < group.end; ++b) {
            for (int bi = 0; bi < bins; ++bi, ++d) {
                const double qv = q.values[d];
                const int32_t* tab = stack.table(b, bi);
                for (int y = 0; y < H; ++y) {
                    const int32_t* top = tab + static_cast<size_t>(y0[y]) * stride;
                    const int32_t* bot = tab + static_cast<size_t>(y1[y]) * stride;
                    double* acc = chi2.data() + static_cast<size_t>(y) * W;
                    const double* inv = inv_tot.data() + static_cast<size_t>(y) * W;
                    if (qv == 0.0) {
                        // (p-0)^2/(p+0) = p
                        for (int x = 0; x < W; ++x) {
                            int32_t c = bot[x1[x]] - bot[x0[x]] - top[x1[x]] + top[x0[x]];
                            acc[x] += c * inv[x];
                        }
                    } else {
                        for (int x = 0; x < W; ++x) {
                            int32_t c = bot[x1[x]] - bot[x0[x]] - top[x1[x]] + top[x0[x]];
                            double p = c * inv[x];
                            double diff = p - qv;
                            acc[x] += diff * diff / (p + qv);
                        }
                    }
                }
            }
        }

        for (size_t i = 0; i < npx; ++i) {
            double conf = mapping == ConfidenceMapping::Affine
                              ? 1.0 - chi2[i] * 0.5
                              : std::exp(-chi2[i] / exp_sigma);
            conf = std::clamp(conf, 0.0, 1.0);
            // first listed shape wins ties
            if (first_shape || conf > map.grid[i]) map.grid[i] = conf;
        }
        first_shape = false;
    }
    return map;
}

std::vector<LikelihoodMap> compute_all_likelihood_maps(
    const IntegralHistStack& stack, const BandGrouping& grouping,
    const TargetModel& model, int threads, ConfidenceMapping mapping,
    double exp_sigma) {
    std::vector<LikelihoodMap> maps(grouping.n_groups());
    parallel_for(grouping.n_groups(), threads, [&](int g) {
        maps[g] = compute_likelihood_map(stack, grouping.groups[g], g, model,
                                         mapping, exp_sigma);
    });
    return maps;
}

TargetModel update_target_model(const TargetModel& model,
                                const std::vector<GroupHistogram>& observed,
                                double lambda) {
    if (lambda < 0.0 || lambda > 1.0) throw Error("invalid-lambda: outside [0,1]");
    if (static_cast<int>(observed.size()) != model.n_groups())
        throw Error("dimension-mismatch: observed group count");
    TargetModel out = model;
    for (int g = 0; g < model.n_groups(); ++g) {
        if (observed[g].dim() != model.group_hists[g].dim())
            throw Error("dimension-mismatch: observed histogram size");
        auto& h = out.group_hists[g].values;
        double sum = 0.0;
        for (size_t i = 0; i < h.size(); ++i) {
            h[i] = (1.0 - lambda) * h[i] + lambda * observed[g].values[i];
            sum += h[i];
        }
        if (sum > 0.0)
            for (double& v : h) v /= sum;
    }
    return out;
}

}  // namespace hlt
