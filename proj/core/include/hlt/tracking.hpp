#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hlt/detection.hpp"
#include "hlt/likelihood.hpp"
#include "hlt/scene.hpp"

namespace hlt {

enum class MotionKind { ConstantVelocity, TurnLeft, TurnRight };

struct MotionModel {
    MotionKind kind = MotionKind::ConstantVelocity;
    double omega = 0.0;  // rad/s, 0 for CV; turn models have opposite signs
    double q = 16.0;     // white-acceleration process noise, (m/s^2)^2
};

// CV plus left/right coordinated turns at |omega|.
std::vector<MotionModel> default_motion_models(double omega = 0.2, double q = 16.0);

struct ModelState {
    Eigen::Vector4d x;  // [x, y, vx, vy], meters / m/s on the canonical plane
    Eigen::Matrix4d P;
};

// Bank of per-motion-model Kalman filters with mixture weights. Models never
// exchange state, only reweight by innovation likelihood.
struct FilterBank {
    std::vector<MotionModel> models;
    std::vector<ModelState> states;
    std::vector<double> weights;

    Eigen::Vector4d mixture_mean() const;
    Eigen::Matrix4d mixture_cov() const;  // moment-matched about the mean
};

FilterBank make_filter_bank(const std::vector<MotionModel>& models,
                            const Eigen::Vector4d& x0, const Eigen::Matrix4d& P0);

// State transition for one model over dt. Exact for CV and for a coordinated
// turn with known rate (the map is linear in the state).
Eigen::Matrix4d transition_matrix(const MotionModel& model, double dt);
Eigen::Matrix4d process_noise(const MotionModel& model, double dt);

// Propagates every model; re-symmetrizes covariances and fails if one is
// not positive definite afterwards.
void predict_bank(FilterBank& bank, double dt);

// Position-only measurement update; weights reweighted by innovation
// likelihood and renormalized with a small floor.
void update_bank(FilterBank& bank, const Eigen::Vector2d& z,
                 const Eigen::Matrix2d& R);

// min over models of the innovation Mahalanobis distance squared
double gate_distance2(const FilterBank& predicted, const Eigen::Vector2d& z,
                      const Eigen::Matrix2d& R);

// log of the weighted Gaussian-mixture density of z under the predicted bank
double motion_log_likelihood(const FilterBank& predicted, const Eigen::Vector2d& z,
                             const Eigen::Matrix2d& R);

// -mean over groups of chi2(blob hist, model hist) / sigma_s
double spectral_log_likelihood(const Blob& blob, const TargetModel& model,
                               double sigma_s);

struct TrackerParams {
    double alpha = 0.5;             // spectral vs motion blend
    double sigma_s = 0.5;
    double miss_log_penalty = -4.0;
    double gate_d2 = 13.8;          // chi-square(2) at 0.999
    int n_scan = 3;
    int max_hypotheses = 10;
    int max_misses = 5;
    double lambda = 0.1;            // target model update rate
    double model_update_floor = -2.0;
    int roi_size_px = 200;
    double omega = 0.2;
    double q = 16.0;
    double init_speed_sigma = 12.0;  // m/s prior at initialization
};

struct HistoryEntry {
    int frame = 0;
    bool associated = false;
    Rect blob_bbox;       // frame px, valid when associated
    double canon_x_m = 0.0, canon_y_m = 0.0;
};

// Single-target tracker on the canonical plane. Per frame:
//   begin_frame(H, dt) -> ROI to sample; detect blobs there;
//   finish_frame(blobs in frame px, dt).
// Association defers decisions through an N-scan hypothesis tree; the public
// state follows the current best hypothesis immediately.
class Tracker {
public:
    Tracker(const TargetModel& model, const Rect& init_bbox_frame_px, double gsd,
            const TrackerParams& params = {});

    bool alive() const { return alive_; }
    const TargetModel& model() const { return model_; }
    const std::vector<HistoryEntry>& history() const { return history_; }
    const FilterBank& best_bank() const;

    // Composes the new frame's homography (frame t -> frame t-1) into the
    // canonical chain, predicts all hypotheses, returns the ROI to sample
    // (clamped to the frame). Throws on a non-invertible homography.
    Rect begin_frame(const std::array<double, 9>& homography, double dt,
                     int frame_w, int frame_h);

    // Blob coordinates must be in current-frame pixels.
    void finish_frame(const std::vector<Blob>& blobs);

    // frame px -> canonical meters
    Eigen::Vector2d to_canonical_m(double px, double py) const;
    // canonical meters -> current frame px
    Eigen::Vector2d to_frame_px(const Eigen::Vector2d& m) const;

private:
    struct Hypothesis {
        FilterBank bank;
        std::vector<int> decisions;  // blob id per frame in window, -1 = miss
        double loglik = 0.0;
        int miss_streak = 0;
    };

    TrackerParams params_;
    TargetModel model_;
    double gsd_;
    Eigen::Matrix3d canon_from_frame_;
    std::vector<Hypothesis> hypotheses_;  // sorted by loglik desc
    std::vector<HistoryEntry> history_;
    int frame_index_ = 0;
    bool alive_ = true;
    bool predicted_ = false;
};

// Track/Target Purity per the standard dominant-target definition.
// Returns {TrP, TgP}; both 0 when no history entry overlaps ground truth.
std::pair<double, double> compute_purity(const std::vector<HistoryEntry>& history,
                                         const GroundTruth& truth,
                                         double iou_gate = 0.3);

}  // namespace hlt
