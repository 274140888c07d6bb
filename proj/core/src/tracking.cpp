#include "hlt/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace hlt {

std::vector<MotionModel> default_motion_models(double omega, double q) {
    return {{MotionKind::ConstantVelocity, 0.0, q},
            {MotionKind::TurnLeft, std::abs(omega), q},
            {MotionKind::TurnRight, -std::abs(omega), q}};
}

Eigen::Vector4d FilterBank::mixture_mean() const {
    Eigen::Vector4d m = Eigen::Vector4d::Zero();
    for (size_t i = 0; i < states.size(); ++i) m += weights[i] * states[i].x;
    return m;
}

Eigen::Matrix4d FilterBank::mixture_cov() const {
    Eigen::Vector4d m = mixture_mean();
    Eigen::Matrix4d P = Eigen::Matrix4d::Zero();
    for (size_t i = 0; i < states.size(); ++i) {
        Eigen::Vector4d d = states[i].x - m;
        P += weights[i] * (states[i].P + d * d.transpose());
    }
    return P;
}

FilterBank make_filter_bank(const std::vector<MotionModel>& models,
                            const Eigen::Vector4d& x0, const Eigen::Matrix4d& P0) {
    if (models.empty()) throw Error("invalid-bank: no motion models");
    FilterBank b;
    b.models = models;
    b.states.assign(models.size(), ModelState{x0, P0});
    b.weights.assign(models.size(), 1.0 / static_cast<double>(models.size()));
    return b;
}

Eigen::Matrix4d transition_matrix(const MotionModel& model, double dt) {
    Eigen::Matrix4d F = Eigen::Matrix4d::Identity();
    if (std::abs(model.omega) < 1e-12) {
        F(0, 2) = dt;
        F(1, 3) = dt;
        return F;
    }
    const double w = model.omega, th = w * dt;
    const double s = std::sin(th), c = std::cos(th);
    F(0, 2) = s / w;
    F(0, 3) = -(1.0 - c) / w;
    F(1, 2) = (1.0 - c) / w;
    F(1, 3) = s / w;
    F(2, 2) = c;
    F(2, 3) = -s;
    F(3, 2) = s;
    F(3, 3) = c;
    return F;
}

Eigen::Matrix4d process_noise(const MotionModel& model, double dt) {
    const double q = model.q;
    const double d3 = dt * dt * dt / 3.0, d2 = dt * dt / 2.0;
    Eigen::Matrix4d Q = Eigen::Matrix4d::Zero();
    Q(0, 0) = Q(1, 1) = q * d3;
    Q(0, 2) = Q(2, 0) = Q(1, 3) = Q(3, 1) = q * d2;
    Q(2, 2) = Q(3, 3) = q * dt;
    return Q;
}

static void require_pd(Eigen::Matrix4d& P) {
    P = ((P + P.transpose()) * 0.5).eval();
    Eigen::LLT<Eigen::Matrix4d> llt(P);
    if (llt.info() != Eigen::Success)
        throw Error("numerical-error: covariance not positive definite");
}

void predict_bank(FilterBank& bank, double dt) {
    if (dt <= 0.0) throw Error("invalid-dt: must be positive");
    for (size_t i = 0; i < bank.states.size(); ++i) {
        Eigen::Matrix4d F = transition_matrix(bank.models[i], dt);
        auto& st = bank.states[i];
        st.x = F * st.x;
        st.P = F * st.P * F.transpose() + process_noise(bank.models[i], dt);
        require_pd(st.P);
    }
}

namespace {

struct Innovation {
    Eigen::Vector2d nu;
    Eigen::Matrix2d S;
    double d2;
    double log_density;
};

Innovation innovation_of(const ModelState& st, const Eigen::Vector2d& z,
                         const Eigen::Matrix2d& R) {
    Innovation in;
    in.nu = z - st.x.head<2>();
    in.S = st.P.topLeftCorner<2, 2>() + R;
    double det = in.S.determinant();
    if (!(det > 1e-18))
        throw Error("numerical-error: singular innovation covariance");
    Eigen::Matrix2d Sinv = in.S.inverse();
    in.d2 = in.nu.dot(Sinv * in.nu);
    in.log_density = -0.5 * in.d2 - 0.5 * std::log(det) - std::log(2.0 * M_PI);
    return in;
}

}  // namespace

void update_bank(FilterBank& bank, const Eigen::Vector2d& z,
                 const Eigen::Matrix2d& R) {
    double wsum = 0.0;
    for (size_t i = 0; i < bank.states.size(); ++i) {
        auto& st = bank.states[i];
        Innovation in = innovation_of(st, z, R);
        Eigen::Matrix2d Sinv = in.S.inverse();
        Eigen::Matrix<double, 4, 2> K = st.P.leftCols<2>() * Sinv;
        st.x += K * in.nu;
        // Joseph form
        Eigen::Matrix4d IKH = Eigen::Matrix4d::Identity();
        IKH.leftCols<2>() -= K;
        st.P = IKH * st.P * IKH.transpose() + K * R * K.transpose();
        require_pd(st.P);
        bank.weights[i] *= std::exp(in.log_density);
        wsum += bank.weights[i];
    }
    if (wsum <= 0.0) {
        std::fill(bank.weights.begin(), bank.weights.end(),
                  1.0 / static_cast<double>(bank.weights.size()));
    } else {
        const double floor = 1e-6;
        double s2 = 0.0;
        for (double& w : bank.weights) {
            w = std::max(w / wsum, floor);
            s2 += w;
        }
        for (double& w : bank.weights) w /= s2;
    }
}

double gate_distance2(const FilterBank& predicted, const Eigen::Vector2d& z,
                      const Eigen::Matrix2d& R) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& st : predicted.states)
        best = std::min(best, innovation_of(st, z, R).d2);
    return best;
}

double motion_log_likelihood(const FilterBank& predicted, const Eigen::Vector2d& z,
                             const Eigen::Matrix2d& R) {
    double density = 0.0;
    for (size_t i = 0; i < predicted.states.size(); ++i)
        density += predicted.weights[i] *
                   std::exp(innovation_of(predicted.states[i], z, R).log_density);
    return std::log(std::max(density, 1e-300));
}

double spectral_log_likelihood(const Blob& blob, const TargetModel& model,
                               double sigma_s) {
    if (blob.group_hists.size() != model.group_hists.size())
        throw Error("dimension-mismatch: blob vs model group count");
    double sum = 0.0;
    for (size_t g = 0; g < model.group_hists.size(); ++g)
        sum += chi2_distance(blob.group_hists[g], model.group_hists[g]);
    return -sum / static_cast<double>(model.group_hists.size()) / sigma_s;
}

Tracker::Tracker(const TargetModel& model, const Rect& init_bbox, double gsd,
                 const TrackerParams& params)
    : params_(params), model_(model), gsd_(gsd) {
    canon_from_frame_ = Eigen::Matrix3d::Identity();
    double cx = (init_bbox.x + init_bbox.w / 2.0) * gsd;
    double cy = (init_bbox.y + init_bbox.h / 2.0) * gsd;
    Eigen::Vector4d x0(cx, cy, 0.0, 0.0);
    double sp = std::max(init_bbox.w, init_bbox.h) * gsd / 4.0;
    Eigen::Matrix4d P0 = Eigen::Matrix4d::Zero();
    P0(0, 0) = P0(1, 1) = sp * sp;
    P0(2, 2) = P0(3, 3) = params.init_speed_sigma * params.init_speed_sigma;
    Hypothesis h;
    h.bank = make_filter_bank(default_motion_models(params.omega, params.q), x0, P0);
    hypotheses_.push_back(std::move(h));
    HistoryEntry e;
    e.frame = 0;
    e.associated = true;
    e.blob_bbox = init_bbox;
    e.canon_x_m = cx;
    e.canon_y_m = cy;
    history_.push_back(e);
    frame_index_ = 1;
}

const FilterBank& Tracker::best_bank() const { return hypotheses_.front().bank; }

Eigen::Vector2d Tracker::to_canonical_m(double px, double py) const {
    Eigen::Vector3d p = canon_from_frame_ * Eigen::Vector3d(px, py, 1.0);
    return Eigen::Vector2d(p.x() / p.z() * gsd_, p.y() / p.z() * gsd_);
}

Eigen::Vector2d Tracker::to_frame_px(const Eigen::Vector2d& m) const {
    Eigen::Vector3d p = canon_from_frame_.inverse() *
                        Eigen::Vector3d(m.x() / gsd_, m.y() / gsd_, 1.0);
    return Eigen::Vector2d(p.x() / p.z(), p.y() / p.z());
}

Rect Tracker::begin_frame(const std::array<double, 9>& homography, double dt,
                          int frame_w, int frame_h) {
    if (!alive_) throw Error("track-terminated");
    Eigen::Matrix3d H;
    H << homography[0], homography[1], homography[2], homography[3],
        homography[4], homography[5], homography[6], homography[7], homography[8];
    if (std::abs(H.determinant()) < 1e-12)
        throw Error("invalid-homography: not invertible");
    canon_from_frame_ = (canon_from_frame_ * H).eval();
    for (auto& h : hypotheses_) predict_bank(h.bank, dt);
    predicted_ = true;

    Eigen::Vector4d mean = hypotheses_.front().bank.mixture_mean();
    Eigen::Vector2d fp = to_frame_px(mean.head<2>());
    int half = params_.roi_size_px / 2;
    Rect roi{(int)std::lround(fp.x()) - half, (int)std::lround(fp.y()) - half,
             params_.roi_size_px, params_.roi_size_px};
    return roi.clamped(frame_w, frame_h);
}

void Tracker::finish_frame(const std::vector<Blob>& blobs) {
    if (!alive_) return;
    if (!predicted_) throw Error("protocol-error: finish_frame before begin_frame");
    predicted_ = false;

    struct Child {
        Hypothesis hyp;
        double last_score;
        int decision;
    };
    std::vector<Child> children;
    for (const auto& h : hypotheses_) {
        for (size_t bi = 0; bi < blobs.size(); ++bi) {
            const Blob& blob = blobs[bi];
            Eigen::Vector2d z = to_canonical_m(blob.cx, blob.cy);
            double sx = std::max(blob.bbox.w * gsd_ / 4.0, 0.25);
            double sy = std::max(blob.bbox.h * gsd_ / 4.0, 0.25);
            Eigen::Matrix2d R = Eigen::Matrix2d::Zero();
            R(0, 0) = sx * sx;
            R(1, 1) = sy * sy;
            if (gate_distance2(h.bank, z, R) > params_.gate_d2) continue;
            double score =
                params_.alpha * spectral_log_likelihood(blob, model_, params_.sigma_s) +
                (1.0 - params_.alpha) * motion_log_likelihood(h.bank, z, R);
            Child c;
            c.hyp = h;
            update_bank(c.hyp.bank, z, R);
            c.hyp.decisions.push_back(static_cast<int>(bi));
            c.hyp.loglik = h.loglik + score;
            c.hyp.miss_streak = 0;
            c.last_score = score;
            c.decision = static_cast<int>(bi);
            children.push_back(std::move(c));
        }
        Child miss;
        miss.hyp = h;
        miss.hyp.decisions.push_back(-1);
        miss.hyp.loglik = h.loglik + params_.miss_log_penalty;
        miss.hyp.miss_streak = h.miss_streak + 1;
        miss.last_score = params_.miss_log_penalty;
        miss.decision = -1;
        children.push_back(std::move(miss));
    }

    std::stable_sort(children.begin(), children.end(),
                     [](const Child& a, const Child& b) {
                         return a.hyp.loglik > b.hyp.loglik;
                     });
    if (static_cast<int>(children.size()) > params_.max_hypotheses)
        children.resize(params_.max_hypotheses);

    // commit the root decision once the window is full (N-scan pruning)
    if (static_cast<int>(children.front().hyp.decisions.size()) >= params_.n_scan) {
        int root = children.front().hyp.decisions.front();
        children.erase(std::remove_if(children.begin(), children.end(),
                                      [&](const Child& c) {
                                          return c.hyp.decisions.front() != root;
                                      }),
                       children.end());
        for (auto& c : children)
            c.hyp.decisions.erase(c.hyp.decisions.begin());
    }

    const Child& best = children.front();
    HistoryEntry e;
    e.frame = frame_index_;
    e.associated = best.decision >= 0;
    if (e.associated) e.blob_bbox = blobs[best.decision].bbox;
    Eigen::Vector4d mean = best.hyp.bank.mixture_mean();
    e.canon_x_m = mean(0);
    e.canon_y_m = mean(1);
    history_.push_back(e);

    if (best.decision >= 0 && best.last_score > params_.model_update_floor)
        model_ = update_target_model(model_, blobs[best.decision].group_hists,
                                     params_.lambda);

    hypotheses_.clear();
    for (auto& c : children) hypotheses_.push_back(std::move(c.hyp));

    if (hypotheses_.front().miss_streak >= params_.max_misses) alive_ = false;
    ++frame_index_;
}

std::pair<double, double> compute_purity(const std::vector<HistoryEntry>& history,
                                         const GroundTruth& truth, double iou_gate) {
    if (history.empty()) throw Error("empty-history");
    std::map<int, int> matches;
    for (const auto& e : history) {
        if (!e.associated) continue;
        if (e.frame < 0 || e.frame >= static_cast<int>(truth.frames.size())) continue;
        int best_id = -1;
        double best_iou = iou_gate;
        for (const auto& tv : truth.frames[e.frame].vehicles) {
            double iou = rect_iou(e.blob_bbox, tv.bbox);
            if (iou > best_iou) {
                best_iou = iou;
                best_id = tv.id;
            }
        }
        if (best_id >= 0) ++matches[best_id];
    }
    if (matches.empty()) return {0.0, 0.0};
    int dominant = -1, dom_count = 0;
    for (const auto& [id, n] : matches)
        if (n > dom_count) {
            dominant = id;
            dom_count = n;
        }
    int truth_life = 0;
    for (const auto& f : truth.frames)
        for (const auto& tv : f.vehicles)
            if (tv.id == dominant) {
                ++truth_life;
                break;
            }
    double trp = static_cast<double>(dom_count) / static_cast<double>(history.size());
    double tgp = truth_life > 0
                     ? static_cast<double>(dom_count) / static_cast<double>(truth_life)
                     : 0.0;
    return {trp, tgp};
}

}  // namespace hlt
