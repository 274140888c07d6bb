#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hlt/likelihood.hpp"

namespace hlt {

struct BinaryMap {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> grid;  // {0,1}
    double threshold = 0.0;

    int64_t count_positive() const;
};

struct FusionWeights {
    std::vector<double> w;  // simplex: w_i >= 0, sum 1
    double k = 0.0;
    double x0 = 0.0;
};

struct FusionParams {
    double k = -40.0;          // negative: many positives -> small weight
    double x0 = -1.0;          // < 0 means "use 1/N"
    int otsu_levels = 2;       // upper threshold binarizes
};

// Thresholds maximizing between-class variance of the map's 256-bin value
// histogram, exhaustively searched; ties resolve to the smallest tuple.
// A constant map returns `levels` copies of the constant value.
std::vector<double> otsu_multilevel(const LikelihoodMap& map, int levels);

// Foreground candidate where L(x,y) > T (similarity polarity; strict).
BinaryMap binarize(const LikelihoodMap& map, double threshold);

// c_i = positives_i / total positives; uniform 1/N when all maps are empty.
std::vector<double> fusion_coefficients(const std::vector<BinaryMap>& binaries);

std::vector<double> logistic_weights(const std::vector<double>& c, double k, double x0);

FusionWeights normalize_weights(const std::vector<double>& raw, double k = 0.0,
                                double x0 = 0.0);

LikelihoodMap fuse(const std::vector<LikelihoodMap>& maps, const FusionWeights& weights);

// otsu -> binarize -> coefficients -> logistic -> normalize -> fuse.
std::pair<LikelihoodMap, FusionWeights> adaptive_fuse(
    const std::vector<LikelihoodMap>& maps, const FusionParams& params = {});

// Equal-weight pixelwise mean.
LikelihoodMap sum_rule_fuse(const std::vector<LikelihoodMap>& maps);

// Weighting by foreground/background separability of each map's values:
// score_i = Var(fg+bg) / (Var(fg) + Var(bg) + 1e-6), weights normalized.
FusionWeights variance_ratio_weights(const std::vector<LikelihoodMap>& maps,
                                     const BinaryMap& fg_mask,
                                     const BinaryMap& bg_mask);

// mean over fg minus mean over bg.
double fg_bg_margin(const LikelihoodMap& map, const BinaryMap& fg_mask,
                    const BinaryMap& bg_mask);

}  // namespace hlt
