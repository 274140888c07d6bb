#include "hlt/pipeline.hpp"

#include <algorithm>

namespace hlt {

namespace {

// Constant altitude means constant scale: every candidate the tracker sees
// is a target-sized box. A component of the fused top class covers the
// sliding-window support, not the vehicle footprint, so localize within it
// by template matching at target scale: the box position whose per-group
// histograms best match the model (mean chi^2 over groups).
std::vector<Blob> refine_candidates(std::vector<Blob> blobs,
                                    const LikelihoodMap& fused,
                                    const IntegralHistStack& stack,
                                    const BandGrouping& grouping,
                                    const TargetModel& model, int tw, int th) {
    tw = std::min(tw, fused.width);
    th = std::min(th, fused.height);
    const int n_groups = static_cast<int>(grouping.groups.size());
    // heading changes swap the footprint; try both orientations
    const std::array<std::pair<int, int>, 2> dims = {
        std::pair{tw, th}, std::pair{std::min(th, fused.width),
                                     std::min(tw, fused.height)}};
    for (auto& b : blobs) {
        Rect best_box{0, 0, 0, 0};
        double best_d = std::numeric_limits<double>::infinity();
        for (const auto& [w, h] : dims) {
            int last_x = -1, last_y = -1;
            for (int cy = b.bbox.y; cy < b.bbox.y2(); ++cy)
                for (int cx = b.bbox.x; cx < b.bbox.x2(); ++cx) {
                    int bx = std::clamp(cx - w / 2, 0, fused.width - w);
                    int by = std::clamp(cy - h / 2, 0, fused.height - h);
                    if (bx == last_x && by == last_y) continue;
                    last_x = bx;
                    last_y = by;
                    Rect box{bx, by, w, h};
                    double d = 0.0;
                    for (int g = 0; g < n_groups; ++g)
                        d += chi2_distance(
                            window_histogram(stack, box, grouping.groups[g]),
                            model.group_hists[g]);
                    if (d < best_d) {
                        best_d = d;
                        best_box = box;
                    }
                }
            if (w == h) break;
        }
        b.bbox = best_box;
        b.area = best_box.area();
        double sum = 0.0;
        for (int y = best_box.y; y < best_box.y2(); ++y)
            for (int x = best_box.x; x < best_box.x2(); ++x)
                sum += fused.at(x, y);
        b.mean_confidence = sum / best_box.area();
        b.cx = best_box.x + (best_box.w - 1) / 2.0;
        b.cy = best_box.y + (best_box.h - 1) / 2.0;
        b.group_hists.clear();
        for (const auto& g : grouping.groups)
            b.group_hists.push_back(window_histogram(stack, best_box, g));
    }
    // components can refine to the same spot; keep the best-scoring copy
    std::stable_sort(blobs.begin(), blobs.end(),
                     [](const Blob& a, const Blob& b) {
                         return a.mean_confidence > b.mean_confidence;
                     });
    std::vector<Blob> out;
    for (auto& b : blobs) {
        bool dup = false;
        for (const auto& o : out)
            if (std::abs(o.bbox.x - b.bbox.x) <= 1 &&
                std::abs(o.bbox.y - b.bbox.y) <= 1)
                dup = true;
        if (!dup) out.push_back(std::move(b));
    }
    for (size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
    return out;
}

}  // namespace

FusionStrategy fusion_strategy_from_name(const std::string& name) {
    if (name == "adaptive") return FusionStrategy::Adaptive;
    if (name == "sum-rule") return FusionStrategy::SumRule;
    if (name == "variance-ratio") return FusionStrategy::VarianceRatio;
    throw Error("config-error: unknown fusion strategy '" + name + "'");
}

std::string fusion_strategy_name(FusionStrategy s) {
    switch (s) {
        case FusionStrategy::Adaptive: return "adaptive";
        case FusionStrategy::SumRule: return "sum-rule";
        case FusionStrategy::VarianceRatio: return "variance-ratio";
    }
    return "?";
}

TrackingPipeline::TrackingPipeline(const HyperCube& first_frame,
                                   const Rect& init_bbox, double gsd,
                                   const PipelineParams& params)
    : params_(params),
      grouping_(make_grouping(first_frame.bands, params.n_groups)),
      tracker_(init_target_model(first_frame, init_bbox, grouping_, params.bins),
               init_bbox, gsd, params.tracker),
      init_bbox_(init_bbox) {}

void TrackingPipeline::step(const HyperCube& frame,
                            const std::array<double, 9>& homography, double dt) {
    if (!tracker_.alive()) return;
    Rect roi = tracker_.begin_frame(homography, dt, frame.width, frame.height);
    StepInfo info;
    info.frame = frame_index_;
    info.roi = roi;

    // a clamped ROI too small for the sliding windows is a forced miss
    if (roi.w < 20 || roi.h < 20) {
        tracker_.finish_frame({});
        steps_.push_back(std::move(info));
        ++frame_index_;
        return;
    }

    HyperCube roi_cube = crop_roi(frame, roi);
    IntegralHistStack stack = build_integral_histograms(roi_cube, params_.bins);
    auto maps = compute_all_likelihood_maps(stack, grouping_, tracker_.model(),
                                            params_.threads, params_.mapping,
                                            params_.exp_sigma);

    LikelihoodMap fused;
    if (params_.strategy == FusionStrategy::Adaptive) {
        auto [f, w] = adaptive_fuse(maps, params_.fusion);
        fused = std::move(f);
        info.weights = w.w;
    } else if (params_.strategy == FusionStrategy::SumRule) {
        fused = sum_rule_fuse(maps);
    } else {
        // variance ratio: foreground = predicted target box, background =
        // a 3x surrounding ring, both in ROI coordinates
        Eigen::Vector2d pp =
            tracker_.to_frame_px(tracker_.best_bank().mixture_mean().head<2>());
        int px = (int)std::lround(pp.x()) - roi.x;
        int py = (int)std::lround(pp.y()) - roi.y;
        Rect fg = Rect{px - init_bbox_.w / 2, py - init_bbox_.h / 2, init_bbox_.w,
                       init_bbox_.h}
                      .clamped(roi.w, roi.h);
        Rect ring = Rect{px - init_bbox_.w * 3 / 2, py - init_bbox_.h * 3 / 2,
                         init_bbox_.w * 3, init_bbox_.h * 3}
                        .clamped(roi.w, roi.h);
        bool ok = fg.w > 0 && fg.h > 0 && ring.area() > fg.area();
        if (ok) {
            BinaryMap fgm, bgm;
            fgm.width = bgm.width = roi.w;
            fgm.height = bgm.height = roi.h;
            fgm.grid.assign((size_t)roi.w * roi.h, 0);
            bgm.grid.assign((size_t)roi.w * roi.h, 0);
            for (int y = ring.y; y < ring.y2(); ++y)
                for (int x = ring.x; x < ring.x2(); ++x) {
                    size_t i = (size_t)y * roi.w + x;
                    if (fg.contains(x, y)) fgm.grid[i] = 1;
                    else bgm.grid[i] = 1;
                }
            FusionWeights w = variance_ratio_weights(maps, fgm, bgm);
            fused = fuse(maps, w);
            info.weights = w.w;
        } else {
            fused = sum_rule_fuse(maps);
        }
    }

    auto blobs =
        refine_candidates(extract_candidates(fused, stack, grouping_, params_.detection),
                          fused, stack, grouping_, tracker_.model(),
                          init_bbox_.w, init_bbox_.h);
    for (auto& b : blobs) {
        b.cx += roi.x;
        b.cy += roi.y;
        b.bbox.x += roi.x;
        b.bbox.y += roi.y;
    }
    info.n_blobs = static_cast<int>(blobs.size());
    tracker_.finish_frame(blobs);
    info.associated = tracker_.history().back().associated;
    steps_.push_back(std::move(info));
    ++frame_index_;
}

TrackRunResult track_vehicle(const SceneRenderer& scene, int vehicle_id,
                             const PipelineParams& params) {
    const GroundTruth& truth = scene.truth();
    const TruthVehicle* init = nullptr;
    for (const auto& tv : truth.frames.at(0).vehicles)
        if (tv.id == vehicle_id) init = &tv;
    if (!init) throw Error("config-error: vehicle not visible in frame 0");

    HyperCube frame0 = scene.render_frame(0);
    TrackingPipeline pipe(frame0, init->bbox, truth.gsd, params);
    for (int t = 1; t < scene.n_frames() && pipe.alive(); ++t) {
        HyperCube frame = scene.render_frame(t);
        pipe.step(frame, truth.frames[t].homography, truth.interval_s);
    }
    TrackRunResult r;
    r.history = pipe.tracker().history();
    r.frames_tracked = static_cast<int>(r.history.size());
    auto [trp, tgp] = compute_purity(r.history, truth);
    r.trp = trp;
    r.tgp = tgp;
    return r;
}

}  // namespace hlt
