#pragma once

#include <array>
#include <string>
#include <vector>

#include "hlt/detection.hpp"
#include "hlt/tracking.hpp"

namespace hlt {

enum class FusionStrategy { Adaptive, SumRule, VarianceRatio };

FusionStrategy fusion_strategy_from_name(const std::string& name);
std::string fusion_strategy_name(FusionStrategy s);

struct PipelineParams {
    int n_groups = 12;
    int bins = 10;
    FusionStrategy strategy = FusionStrategy::Adaptive;
    FusionParams fusion;
    DetectionParams detection;
    TrackerParams tracker;
    ConfidenceMapping mapping = ConfidenceMapping::Affine;
    double exp_sigma = 0.5;
    int threads = 1;

    PipelineParams() {
        // a fused-map component spans the sliding-window support around a
        // target, not the vehicle footprint; the pipeline gates components
        // in map units and refines them back to target size afterwards
        detection.max_area = 2500;
    }
};

// Per-frame detection + association around one track: crop the predicted
// ROI, build integral histograms, score all group maps, fuse, extract blobs
// and feed them to the N-scan tracker.
class TrackingPipeline {
public:
    TrackingPipeline(const HyperCube& first_frame, const Rect& init_bbox,
                     double gsd, const PipelineParams& params);

    void step(const HyperCube& frame, const std::array<double, 9>& homography,
              double dt);

    bool alive() const { return tracker_.alive(); }
    const Tracker& tracker() const { return tracker_; }
    const PipelineParams& params() const { return params_; }

    struct StepInfo {
        int frame = 0;
        Rect roi;
        std::vector<double> weights;
        int n_blobs = 0;
        bool associated = false;
    };
    const std::vector<StepInfo>& steps() const { return steps_; }

private:
    PipelineParams params_;
    BandGrouping grouping_;
    Tracker tracker_;
    Rect init_bbox_;
    int frame_index_ = 1;
    std::vector<StepInfo> steps_;
};

struct TrackRunResult {
    std::vector<HistoryEntry> history;
    double trp = 0.0;
    double tgp = 0.0;
    int frames_tracked = 0;
};

// Tracks truth vehicle `vehicle_id` through a rendered scene, streaming
// frames, and scores purity against the scene's ground truth.
TrackRunResult track_vehicle(const SceneRenderer& scene, int vehicle_id,
                             const PipelineParams& params);

}  // namespace hlt
