#pragma once

#include <vector>

#include "hlt/cube.hpp"
#include "hlt/features.hpp"

namespace hlt {

struct WindowShape {
    int w = 0;
    int h = 0;
};

// Online generative appearance model: one reference histogram per band group.
struct TargetModel {
    std::vector<GroupHistogram> group_hists;
    std::vector<WindowShape> shapes = {{20, 10}, {10, 20}, {14, 14}};
    double lambda = 0.1;

    int n_groups() const { return static_cast<int>(group_hists.size()); }
};

struct LikelihoodMap {
    int width = 0;
    int height = 0;
    int group_id = 0;
    std::vector<double> grid;  // row-major, values in [0,1]

    double at(int x, int y) const { return grid[static_cast<size_t>(y) * width + x]; }
};

// chi2 -> confidence mapping. Affine: 1 - chi2/2. Exponential: exp(-chi2/sigma).
enum class ConfidenceMapping { Affine, Exponential };

// Histograms the bbox pixels per group of `grouping`. bbox must be at least
// 2x2 and inside the cube.
TargetModel init_target_model(const HyperCube& cube, const Rect& bbox,
                              const BandGrouping& grouping, int bins = 10);

// Per-pixel max over the three window shapes of the mapped chi2 between the
// window histogram (centered, border-clamped) and the model's group
// histogram. stack must be built over the ROI being scored.
LikelihoodMap compute_likelihood_map(const IntegralHistStack& stack,
                                     const BandRange& group, int group_id,
                                     const TargetModel& model,
                                     ConfidenceMapping mapping = ConfidenceMapping::Affine,
                                     double exp_sigma = 0.5);

// All group maps; groups are independent and computed across `threads`.
std::vector<LikelihoodMap> compute_all_likelihood_maps(
    const IntegralHistStack& stack, const BandGrouping& grouping,
    const TargetModel& model, int threads = 1,
    ConfidenceMapping mapping = ConfidenceMapping::Affine, double exp_sigma = 0.5);

// Exponential blend (1-lambda)*old + lambda*observed per group, renormalized.
TargetModel update_target_model(const TargetModel& model,
                                const std::vector<GroupHistogram>& observed,
                                double lambda);

}  // namespace hlt
