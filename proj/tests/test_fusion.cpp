#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hlt/fusion.hpp"
#include "hlt/rng.hpp"

using namespace hlt;

namespace {

LikelihoodMap make_map(int w, int h, double fill = 0.0) {
    LikelihoodMap m;
    m.width = w;
    m.height = h;
    m.grid.assign(static_cast<size_t>(w) * h, fill);
    return m;
}

LikelihoodMap random_map(Rng& rng, int w, int h) {
    LikelihoodMap m = make_map(w, h);
    for (auto& v : m.grid) v = rng.uniform();
    return m;
}

// exhaustive between-class-variance oracle over 256-bin histograms,
// independent of the prefix-sum implementation
std::vector<double> otsu_oracle(const LikelihoodMap& map, int levels) {
    constexpr int B = 256;
    double cnt[B] = {0.0};
    for (double v : map.grid) {
        int b = std::clamp(static_cast<int>(v * B), 0, B - 1);
        cnt[b] += 1.0;
    }
    auto score_range = [&](int a, int b) {
        double c = 0.0, s = 0.0;
        for (int j = a; j <= b; ++j) {
            c += cnt[j];
            s += cnt[j] * ((j + 0.5) / B);
        }
        return c > 0.0 ? s * s / c : 0.0;
    };
    double best = -1.0;
    std::vector<double> out;
    if (levels == 1) {
        int bj = 0;
        for (int j = 0; j < B - 1; ++j) {
            double v = score_range(0, j) + score_range(j + 1, B - 1);
            if (v > best) { best = v; bj = j; }
        }
        out = {(bj + 1) / double(B)};
    } else {
        int b1 = 0, b2 = 1;
        for (int j1 = 0; j1 < B - 2; ++j1)
            for (int j2 = j1 + 1; j2 < B - 1; ++j2) {
                double v = score_range(0, j1) + score_range(j1 + 1, j2) +
                           score_range(j2 + 1, B - 1);
                if (v > best) { best = v; b1 = j1; b2 = j2; }
            }
        out = {(b1 + 1) / double(B), (b2 + 1) / double(B)};
    }
    return out;
}

}  // namespace

TEST_CASE("otsu separates a two-value map") {
    LikelihoodMap m = make_map(10, 10);
    for (size_t i = 0; i < m.grid.size(); ++i) m.grid[i] = i < 50 ? 0.2 : 0.8;
    auto t = otsu_multilevel(m, 1);
    REQUIRE(t.size() == 1);
    CHECK(t[0] > 0.2);
    CHECK(t[0] < 0.8);
}

TEST_CASE("otsu equals the exhaustive oracle") {
    Rng rng(61);
    for (int it = 0; it < 20; ++it) {
        LikelihoodMap m = random_map(rng, 16, 16);
        CHECK(otsu_multilevel(m, 1) == otsu_oracle(m, 1));
        CHECK(otsu_multilevel(m, 2) == otsu_oracle(m, 2));
    }
}

TEST_CASE("otsu on a constant map returns the constant") {
    LikelihoodMap m = make_map(8, 8, 0.37);
    auto t = otsu_multilevel(m, 2);
    CHECK(t == std::vector<double>{0.37, 0.37});
}

TEST_CASE("binarize uses strict inequality") {
    LikelihoodMap m = make_map(3, 1);
    m.grid = {0.4, 0.5, 0.6};
    auto b = binarize(m, 0.5);
    CHECK(b.grid == std::vector<uint8_t>{0, 0, 1});
    CHECK(binarize(make_map(4, 4, 0.0), 0.5).count_positive() == 0);
}

TEST_CASE("fusion coefficients from positive counts") {
    BinaryMap a, b;
    a.width = b.width = 10;
    a.height = b.height = 10;
    a.grid.assign(100, 0);
    b.grid.assign(100, 0);
    std::fill_n(a.grid.begin(), 30, uint8_t{1});
    std::fill_n(b.grid.begin(), 70, uint8_t{1});
    auto c = fusion_coefficients({a, b});
    CHECK(c[0] == doctest::Approx(0.3));
    CHECK(c[1] == doctest::Approx(0.7));

    BinaryMap empty = a;
    empty.grid.assign(100, 0);
    auto u = fusion_coefficients({empty, empty, empty});
    for (double v : u) CHECK(v == doctest::Approx(1.0 / 3));

    BinaryMap full = a;
    full.grid.assign(100, 1);
    auto sel = fusion_coefficients({full, empty});
    CHECK(sel[0] == doctest::Approx(1.0));
    CHECK(sel[1] == doctest::Approx(0.0));
}

TEST_CASE("logistic weighting") {
    auto w = logistic_weights({0.25}, -40.0, 0.25);
    CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-12));

    auto mono = logistic_weights({0.1, 0.9}, -40.0, 0.5);
    CHECK(mono[0] > mono[1]);

    auto sat = logistic_weights({1e6, -1e6}, -40.0, 0.0);
    CHECK(sat[0] == 0.0);
    CHECK(sat[1] == 1.0);

    CHECK_THROWS_AS(static_cast<void>(logistic_weights({0.5}, 0.0, 0.0)), Error);
}

TEST_CASE("weight normalization") {
    CHECK(normalize_weights({0.5, 0.5}).w == std::vector<double>{0.5, 0.5});
    auto w = normalize_weights({1.0, 1.0, 2.0});
    CHECK(w.w[0] == doctest::Approx(0.25));
    CHECK(w.w[2] == doctest::Approx(0.5));
    CHECK(normalize_weights({0.5}).w == std::vector<double>{1.0});
    auto z = normalize_weights({0.0, 0.0});
    CHECK(z.w == std::vector<double>{0.5, 0.5});
}

TEST_CASE("fuse is a convex combination") {
    Rng rng(67);
    std::vector<LikelihoodMap> maps;
    for (int i = 0; i < 4; ++i) maps.push_back(random_map(rng, 12, 12));

    FusionWeights sel;
    sel.w = {1.0, 0.0, 0.0, 0.0};
    CHECK(fuse(maps, sel).grid == maps[0].grid);

    FusionWeights eq;
    eq.w.assign(4, 0.25);
    auto mean = fuse(maps, eq);
    for (size_t i = 0; i < mean.grid.size(); ++i) {
        double lo = 1.0, hi = 0.0, s = 0.0;
        for (const auto& m : maps) {
            lo = std::min(lo, m.grid[i]);
            hi = std::max(hi, m.grid[i]);
            s += m.grid[i];
        }
        CHECK(mean.grid[i] == doctest::Approx(s / 4).epsilon(1e-12));
        CHECK(mean.grid[i] >= lo - 1e-12);
        CHECK(mean.grid[i] <= hi + 1e-12);
    }
}

TEST_CASE("sum rule equals uniform fuse") {
    Rng rng(71);
    std::vector<LikelihoodMap> maps = {make_map(6, 6, 0.0), make_map(6, 6, 1.0)};
    auto s = sum_rule_fuse(maps);
    for (double v : s.grid) CHECK(v == doctest::Approx(0.5));
    CHECK(sum_rule_fuse({maps[0]}).grid == maps[0].grid);

    std::vector<LikelihoodMap> rnd;
    for (int i = 0; i < 3; ++i) rnd.push_back(random_map(rng, 8, 8));
    FusionWeights eq;
    eq.w.assign(3, 1.0 / 3);
    CHECK(sum_rule_fuse(rnd).grid == fuse(rnd, eq).grid);
}

TEST_CASE("adaptive fuse: symmetry, selection and degenerate single map") {
    Rng rng(73);
    LikelihoodMap base = random_map(rng, 20, 20);
    std::vector<LikelihoodMap> same(12, base);
    auto [fused, w] = adaptive_fuse(same);
    for (double v : w.w) CHECK(v == doctest::Approx(1.0 / 12).epsilon(1e-9));
    for (size_t i = 0; i < fused.grid.size(); ++i)
        CHECK(fused.grid[i] == doctest::Approx(base.grid[i]).epsilon(1e-9));

    auto [single, sw] = adaptive_fuse({base});
    CHECK(sw.w == std::vector<double>{1.0});
    for (size_t i = 0; i < single.grid.size(); ++i)
        CHECK(single.grid[i] == doctest::Approx(base.grid[i]).epsilon(1e-12));
}

TEST_CASE("adaptive fuse favors the discriminative map") {
    // one map with a compact bright blob on dark background, 11 maps full of
    // scattered bright noise (many positives)
    Rng rng(79);
    std::vector<LikelihoodMap> maps;
    LikelihoodMap disc = make_map(30, 30, 0.05);
    for (int y = 12; y < 18; ++y)
        for (int x = 12; x < 18; ++x) disc.grid[y * 30 + x] = 0.95;
    maps.push_back(disc);
    for (int i = 0; i < 11; ++i) {
        LikelihoodMap noisy = make_map(30, 30, 0.05);
        for (auto& v : noisy.grid)
            if (rng.uniform() < 0.5) v = 0.9 + 0.1 * rng.uniform();
        maps.push_back(noisy);
    }
    auto [fused, w] = adaptive_fuse(maps);
    size_t best = std::max_element(w.w.begin(), w.w.end()) - w.w.begin();
    CHECK(best == 0);
}

TEST_CASE("fusion weights are a simplex and anti-monotone in positives") {
    Rng rng(83);
    for (int it = 0; it < 10; ++it) {
        std::vector<LikelihoodMap> maps;
        for (int i = 0; i < 6; ++i) maps.push_back(random_map(rng, 14, 14));
        auto [fused, w] = adaptive_fuse(maps);
        double sum = 0.0;
        for (double v : w.w) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));

        // recompute positive counts the same way adaptive_fuse defines them
        std::vector<int64_t> pos;
        for (const auto& m : maps)
            pos.push_back(binarize(m, otsu_multilevel(m, 2).back()).count_positive());
        for (size_t a = 0; a < maps.size(); ++a)
            for (size_t b = 0; b < maps.size(); ++b)
                if (pos[a] < pos[b]) CHECK(w.w[a] >= w.w[b] - 1e-12);

        // permutation equivariance: reverse the list
        std::vector<LikelihoodMap> rev(maps.rbegin(), maps.rend());
        auto [fused2, w2] = adaptive_fuse(rev);
        for (size_t i = 0; i < w.w.size(); ++i)
            CHECK(w2.w[i] == doctest::Approx(w.w[w.w.size() - 1 - i]).epsilon(1e-12));
        for (size_t i = 0; i < fused.grid.size(); ++i)
            CHECK(fused2.grid[i] == doctest::Approx(fused.grid[i]).epsilon(1e-9));
    }
}

TEST_CASE("variance ratio weighting") {
    BinaryMap fg, bg;
    fg.width = bg.width = 20;
    fg.height = bg.height = 20;
    fg.grid.assign(400, 0);
    bg.grid.assign(400, 0);
    for (int y = 8; y < 12; ++y)
        for (int x = 8; x < 12; ++x) fg.grid[y * 20 + x] = 1;
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 20; ++x)
            if (!fg.grid[y * 20 + x]) bg.grid[y * 20 + x] = 1;

    LikelihoodMap separating = make_map(20, 20, 0.0);
    for (int y = 8; y < 12; ++y)
        for (int x = 8; x < 12; ++x) separating.grid[y * 20 + x] = 1.0;
    LikelihoodMap constant = make_map(20, 20, 0.4);

    auto w = variance_ratio_weights({separating, constant}, fg, bg);
    CHECK(w.w[0] > 0.5);
    CHECK(w.w[0] + w.w[1] == doctest::Approx(1.0).epsilon(1e-9));

    BinaryMap empty = fg;
    empty.grid.assign(400, 0);
    CHECK_THROWS_AS(
        static_cast<void>(variance_ratio_weights({constant}, empty, bg)), Error);
}

TEST_CASE("foreground/background margin") {
    BinaryMap fg, bg;
    fg.width = bg.width = 10;
    fg.height = bg.height = 10;
    fg.grid.assign(100, 0);
    bg.grid.assign(100, 0);
    for (int i = 0; i < 20; ++i) fg.grid[i] = 1;
    for (int i = 20; i < 100; ++i) bg.grid[i] = 1;

    LikelihoodMap perfect = make_map(10, 10, 0.0);
    for (int i = 0; i < 20; ++i) perfect.grid[i] = 1.0;
    CHECK(fg_bg_margin(perfect, fg, bg) == doctest::Approx(1.0));

    LikelihoodMap flat = make_map(10, 10, 0.3);
    CHECK(fg_bg_margin(flat, fg, bg) == doctest::Approx(0.0));

    Rng rng(89);
    LikelihoodMap rnd = random_map(rng, 10, 10);
    double mf = 0.0, mb = 0.0;
    for (int i = 0; i < 20; ++i) mf += rnd.grid[i] / 20.0;
    for (int i = 20; i < 100; ++i) mb += rnd.grid[i] / 80.0;
    CHECK(fg_bg_margin(rnd, fg, bg) == doctest::Approx(mf - mb).epsilon(1e-12));
}
