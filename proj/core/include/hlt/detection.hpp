#pragma once

#include <vector>

#include "hlt/fusion.hpp"

namespace hlt {

struct Blob {
    int id = 0;
    double cx = 0.0, cy = 0.0;  // pixel centroid of member pixels
    Rect bbox;
    int area = 0;
    double mean_confidence = 0.0;
    std::vector<GroupHistogram> group_hists;  // over bbox pixels
};

struct DetectionParams {
    int min_area = 20;
    int max_area = 100;
    int otsu_levels = 2;
};

// Dilation then erosion with a 3x3 square structuring element.
BinaryMap morphological_close(const BinaryMap& bin);

// Maximal 8-connected foreground regions, labeled in raster order of their
// first pixel; only geometric fields are filled.
std::vector<Blob> connected_components(const BinaryMap& bin);

// Full blob pipeline on a fused map: otsu -> binarize -> close -> label ->
// area filter -> attach mean confidence and per-group bbox histograms.
// Result is sorted by mean confidence descending (id ascending on ties).
std::vector<Blob> extract_candidates(const LikelihoodMap& fused,
                                     const IntegralHistStack& stack,
                                     const BandGrouping& grouping,
                                     const DetectionParams& params = {});

}  // namespace hlt
