#include "hlt/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hlt {

int64_t BinaryMap::count_positive() const {
    int64_t n = 0;
    for (uint8_t v : grid) n += v;
    return n;
}

namespace {

constexpr int kOtsuBins = 256;

inline int otsu_bin(double v) {
    int b = static_cast<int>(v * kOtsuBins);
    return std::clamp(b, 0, kOtsuBins - 1);
}

// sum over classes of S_k^2 / C_k; monotone transform of between-class
// variance so argmax tuples agree with the textbook criterion
inline double class_score(const double* P, const double* S, int a, int b) {
    double c = P[b + 1] - P[a];
    if (c <= 0.0) return 0.0;
    double s = S[b + 1] - S[a];
    return s * s / c;
}

}  // namespace

std::vector<double> otsu_multilevel(const LikelihoodMap& map, int levels) {
    if (levels < 1 || levels > 3) throw Error("invalid-levels: need 1..3");
    if (map.grid.empty()) throw Error("empty-map");
    bool constant = std::all_of(map.grid.begin(), map.grid.end(),
                                [&](double v) { return v == map.grid[0]; });
    if (constant) return std::vector<double>(levels, map.grid[0]);

    double P[kOtsuBins + 1] = {0.0};
    double S[kOtsuBins + 1] = {0.0};
    {
        double cnt[kOtsuBins] = {0.0};
        for (double v : map.grid) cnt[otsu_bin(v)] += 1.0;
        for (int j = 0; j < kOtsuBins; ++j) {
            double mid = (j + 0.5) / kOtsuBins;
            P[j + 1] = P[j] + cnt[j];
            S[j + 1] = S[j] + cnt[j] * mid;
        }
    }

    auto edge = [](int j) { return static_cast<double>(j + 1) / kOtsuBins; };
    double best = -1.0;
    std::vector<double> out;
    if (levels == 1) {
        int bj = 0;
        for (int j = 0; j < kOtsuBins - 1; ++j) {
            double v = class_score(P, S, 0, j) + class_score(P, S, j + 1, kOtsuBins - 1);
            if (v > best) { best = v; bj = j; }
        }
        out = {edge(bj)};
    } else if (levels == 2) {
        int b1 = 0, b2 = 1;
        for (int j1 = 0; j1 < kOtsuBins - 2; ++j1) {
            double s1 = class_score(P, S, 0, j1);
            for (int j2 = j1 + 1; j2 < kOtsuBins - 1; ++j2) {
                double v = s1 + class_score(P, S, j1 + 1, j2) +
                           class_score(P, S, j2 + 1, kOtsuBins - 1);
                if (v > best) { best = v; b1 = j1; b2 = j2; }
            }
        }
        out = {edge(b1), edge(b2)};
    } else {
        int b1 = 0, b2 = 1, b3 = 2;
        for (int j1 = 0; j1 < kOtsuBins - 3; ++j1) {
            double s1 = class_score(P, S, 0, j1);
            for (int j2 = j1 + 1; j2 < kOtsuBins - 2; ++j2) {
                double s2 = s1 + class_score(P, S, j1 + 1, j2);
                for (int j3 = j2 + 1; j3 < kOtsuBins - 1; ++j3) {
                    double v = s2 + class_score(P, S, j2 + 1, j3) +
                               class_score(P, S, j3 + 1, kOtsuBins - 1);
                    if (v > best) { best = v; b1 = j1; b2 = j2; b3 = j3; }
                }
            }
        }
        out = {edge(b1), edge(b2), edge(b3)};
    }
    return out;
}

BinaryMap binarize(const LikelihoodMap& map, double threshold) {
    if (!std::isfinite(threshold)) throw Error("invalid-threshold: non-finite");
    BinaryMap b;
    b.width = map.width;
    b.height = map.height;
    b.threshold = threshold;
    b.grid.resize(map.grid.size());
    for (size_t i = 0; i < map.grid.size(); ++i)
        b.grid[i] = map.grid[i] > threshold ? 1 : 0;
    return b;
}

std::vector<double> fusion_coefficients(const std::vector<BinaryMap>& binaries) {
    if (binaries.empty()) throw Error("empty-input: no binary maps");
    const size_t n = binaries[0].grid.size();
    std::vector<double> c(binaries.size());
    double total = 0.0;
    for (size_t i = 0; i < binaries.size(); ++i) {
        if (binaries[i].grid.size() != n)
            throw Error("dimension-mismatch: binary maps");
        c[i] = static_cast<double>(binaries[i].count_positive());
        total += c[i];
    }
    if (total == 0.0) {
        std::fill(c.begin(), c.end(), 1.0 / static_cast<double>(c.size()));
    } else {
        for (double& v : c) v /= total;
    }
    return c;
}

std::vector<double> logistic_weights(const std::vector<double>& c, double k, double x0) {
    if (k == 0.0) throw Error("invalid-k: zero steepness");
    std::vector<double> w(c.size());
    for (size_t i = 0; i < c.size(); ++i) {
        double a = -k * (c[i] - x0);
        if (a > 700.0) w[i] = 0.0;
        else if (a < -700.0) w[i] = 1.0;
        else w[i] = 1.0 / (1.0 + std::exp(a));
    }
    return w;
}

FusionWeights normalize_weights(const std::vector<double>& raw, double k, double x0) {
    if (raw.empty()) throw Error("empty-input: no weights");
    FusionWeights fw;
    fw.k = k;
    fw.x0 = x0;
    fw.w = raw;
    double sum = 0.0;
    for (double v : fw.w) sum += std::abs(v);
    if (sum == 0.0) {
        std::fill(fw.w.begin(), fw.w.end(), 1.0 / static_cast<double>(fw.w.size()));
    } else {
        for (double& v : fw.w) v = std::abs(v) / sum;
    }
    return fw;
}

LikelihoodMap fuse(const std::vector<LikelihoodMap>& maps, const FusionWeights& weights) {
    if (maps.empty()) throw Error("empty-input: no maps");
    if (weights.w.size() != maps.size())
        throw Error("dimension-mismatch: weights vs maps");
    LikelihoodMap out;
    out.width = maps[0].width;
    out.height = maps[0].height;
    out.group_id = -1;
    out.grid.assign(maps[0].grid.size(), 0.0);
    for (size_t m = 0; m < maps.size(); ++m) {
        if (maps[m].grid.size() != out.grid.size())
            throw Error("dimension-mismatch: map sizes");
        double w = weights.w[m];
        const double* src = maps[m].grid.data();
        for (size_t i = 0; i < out.grid.size(); ++i) out.grid[i] += w * src[i];
    }
    return out;
}

std::pair<LikelihoodMap, FusionWeights> adaptive_fuse(
    const std::vector<LikelihoodMap>& maps, const FusionParams& params) {
    if (maps.empty()) throw Error("empty-input: no maps");
    std::vector<BinaryMap> binaries;
    binaries.reserve(maps.size());
    for (const auto& m : maps) {
        auto t = otsu_multilevel(m, params.otsu_levels);
        binaries.push_back(binarize(m, t.back()));  // upper threshold
    }
    auto c = fusion_coefficients(binaries);
    double x0 = params.x0 < 0.0 ? 1.0 / static_cast<double>(maps.size()) : params.x0;
    auto raw = logistic_weights(c, params.k, x0);
    FusionWeights fw = normalize_weights(raw, params.k, x0);
    return {fuse(maps, fw), fw};
}

LikelihoodMap sum_rule_fuse(const std::vector<LikelihoodMap>& maps) {
    if (maps.empty()) throw Error("empty-input: no maps");
    FusionWeights fw;
    fw.w.assign(maps.size(), 1.0 / static_cast<double>(maps.size()));
    return fuse(maps, fw);
}

namespace {

void masked_stats(const LikelihoodMap& map, const BinaryMap& mask, double& n,
                  double& sum, double& sumsq) {
    if (mask.grid.size() != map.grid.size())
        throw Error("dimension-mismatch: mask vs map");
    n = sum = sumsq = 0.0;
    for (size_t i = 0; i < map.grid.size(); ++i) {
        if (mask.grid[i]) {
            n += 1.0;
            sum += map.grid[i];
            sumsq += map.grid[i] * map.grid[i];
        }
    }
}

}  // namespace

FusionWeights variance_ratio_weights(const std::vector<LikelihoodMap>& maps,
                                     const BinaryMap& fg_mask,
                                     const BinaryMap& bg_mask) {
    if (maps.empty()) throw Error("empty-input: no maps");
    constexpr double eps = 1e-6;
    std::vector<double> scores(maps.size());
    for (size_t m = 0; m < maps.size(); ++m) {
        double nf, sf, qf, nb, sb, qb;
        masked_stats(maps[m], fg_mask, nf, sf, qf);
        masked_stats(maps[m], bg_mask, nb, sb, qb);
        if (nf == 0.0 || nb == 0.0) throw Error("empty-mask");
        double var_f = qf / nf - (sf / nf) * (sf / nf);
        double var_b = qb / nb - (sb / nb) * (sb / nb);
        double nt = nf + nb, st = sf + sb, qt = qf + qb;
        double var_t = qt / nt - (st / nt) * (st / nt);
        scores[m] = var_t / (var_f + var_b + eps);
    }
    return normalize_weights(scores);
}

double fg_bg_margin(const LikelihoodMap& map, const BinaryMap& fg_mask,
                    const BinaryMap& bg_mask) {
    double nf, sf, qf, nb, sb, qb;
    masked_stats(map, fg_mask, nf, sf, qf);
    masked_stats(map, bg_mask, nb, sb, qb);
    if (nf == 0.0 || nb == 0.0) throw Error("empty-mask");
    return sf / nf - sb / nb;
}

}  // namespace hlt
