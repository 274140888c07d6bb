#include "hlt/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "hlt/rng.hpp"

namespace hlt {

double SpectralSignature::reflectance(double nm) const {
    double v = offset;
    for (const auto& b : bumps) {
        double z = (nm - b.center_nm) / b.sigma_nm;
        v += b.amplitude * std::exp(-0.5 * z * z);
    }
    return std::clamp(v, 0.0, 1.0);
}

const std::vector<SpectralSignature>& signature_palette() {
    static const std::vector<SpectralSignature> palette = {
        // background materials
        {"asphalt", 0.09, {{900.0, 400.0, 0.05}}},
        {"vegetation", 0.04, {{550.0, 40.0, 0.09}, {860.0, 100.0, 0.40}}},
        {"concrete", 0.28, {{700.0, 350.0, 0.10}}},
        {"soil", 0.16, {{750.0, 250.0, 0.16}}},
        {"shadow", 0.03, {}},
        // vehicle paints; bases sit above the untextured road materials but
        // inside the range textured terrain can reach, so background windows
        // span the mid-confidence range instead of pinning at zero
        {"paint_red", 0.30, {{640.0, 40.0, 0.22}, {880.0, 90.0, 0.10}}},
        {"paint_blue", 0.26, {{460.0, 35.0, 0.25}}},
        {"paint_green", 0.33, {{540.0, 35.0, 0.20}}},
        {"paint_white", 0.46, {{550.0, 300.0, 0.06}}},
        {"paint_black", 0.15, {{940.0, 120.0, 0.20}}},
        {"paint_silver", 0.39, {{650.0, 400.0, 0.05}}},
        {"paint_yellow", 0.28, {{590.0, 55.0, 0.28}, {860.0, 110.0, 0.12}}},
        {"paint_darkred", 0.20, {{660.0, 30.0, 0.24}}},
        {"paint_cyan", 0.23, {{495.0, 45.0, 0.26}}},
        {"paint_nir", 0.17, {{920.0, 60.0, 0.34}}},
    };
    return palette;
}

const SpectralSignature& signature_by_name(const std::string& name) {
    for (const auto& s : signature_palette())
        if (s.name == name) return s;
    throw Error("config-error: unknown signature '" + name + "'");
}

int SceneConfig::n_bands() const {
    double range = band_end_nm - band_start_nm;
    double n = range / band_step_nm;
    if (band_step_nm <= 0 || std::abs(n - std::round(n)) > 1e-9)
        throw Error("config-error: band step does not divide band range");
    return static_cast<int>(std::round(n)) + 1;
}

std::vector<double> SceneConfig::wavelengths() const {
    std::vector<double> w;
    int n = n_bands();
    w.reserve(n);
    for (int i = 0; i < n; ++i) w.push_back(band_start_nm + i * band_step_nm);
    return w;
}

namespace {

struct Polyline {
    std::vector<std::pair<double, double>> pts;
    std::vector<double> cum;  // cumulative arc length, closed loop
    double total = 0.0;

    explicit Polyline(const std::vector<std::pair<double, double>>& p) : pts(p) {
        if (pts.size() < 2) throw Error("config-error: route needs >= 2 points");
        cum.resize(pts.size() + 1);
        cum[0] = 0.0;
        for (size_t i = 0; i < pts.size(); ++i) {
            auto [x0, y0] = pts[i];
            auto [x1, y1] = pts[(i + 1) % pts.size()];
            cum[i + 1] = cum[i] + std::hypot(x1 - x0, y1 - y0);
        }
        total = cum.back();
    }

    // position and unit heading at arc length s (wrapped)
    void at(double s, double& x, double& y, double& hx, double& hy) const {
        s = std::fmod(s, total);
        if (s < 0) s += total;
        size_t i = 0;
        while (i + 1 < cum.size() && cum[i + 1] < s) ++i;
        auto [x0, y0] = pts[i];
        auto [x1, y1] = pts[(i + 1) % pts.size()];
        double seg = cum[i + 1] - cum[i];
        double t = seg > 0 ? (s - cum[i]) / seg : 0.0;
        x = x0 + t * (x1 - x0);
        y = y0 + t * (y1 - y0);
        double n = std::hypot(x1 - x0, y1 - y0);
        hx = n > 0 ? (x1 - x0) / n : 1.0;
        hy = n > 0 ? (y1 - y0) / n : 0.0;
    }
};

// Smooth value noise in [-1,1]: hashed lattice values, bilinear blend.
// Lives in world coordinates so camera drift slides over a fixed terrain.
double lattice_noise(uint64_t seed, int64_t cx, int64_t cy) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(cx) +
                 0xc2b2ae3d27d4eb4fULL * static_cast<uint64_t>(cy);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return std::ldexp(static_cast<double>(z >> 11), -52) - 1.0;
}

double terrain_texture(uint64_t seed, double wx, double wy, int cell) {
    double gx = wx / cell, gy = wy / cell;
    double ix = std::floor(gx), iy = std::floor(gy);
    double fx = gx - ix, fy = gy - iy;
    auto c = [&](int dx, int dy) {
        return lattice_noise(seed, static_cast<int64_t>(ix) + dx,
                             static_cast<int64_t>(iy) + dy);
    };
    double top = c(0, 0) + fx * (c(1, 0) - c(0, 0));
    double bot = c(0, 1) + fx * (c(1, 1) - c(0, 1));
    return top + fy * (bot - top);
}

}  // namespace

SceneRenderer::SceneRenderer(const SceneConfig& config) : config_(config) {
    if (config_.n_frames < 1) throw Error("config-error: n_frames < 1");
    for (const auto& v : config_.vehicles)
        if (v.speed_sigma_mps < 0)
            throw Error("config-error: negative speed sigma");
    wavelengths_ = config_.wavelengths();
    const int B = static_cast<int>(wavelengths_.size());

    // resolve materials: index 0 = base, then regions in order
    auto spectrum_of = [&](const std::string& name) {
        const auto& sig = signature_by_name(name);
        std::vector<float> s(B);
        for (int b = 0; b < B; ++b)
            s[b] = static_cast<float>(sig.reflectance(wavelengths_[b]));
        return s;
    };
    material_spectra_.push_back(spectrum_of(config_.base_material));
    for (const auto& r : config_.background) {
        material_spectra_.push_back(spectrum_of(r.material));
        region_material_.push_back(static_cast<int>(material_spectra_.size()) - 1);
        region_rect_.push_back(r.region_px);
    }
    for (const auto& v : config_.vehicles)
        paint_spectra_.push_back(spectrum_of(v.paint));

    // illumination: smooth deterministic drift around 1
    illum_.resize(config_.n_frames);
    for (int t = 0; t < config_.n_frames; ++t)
        illum_[t] = 1.0 + config_.illum_amplitude *
                              std::sin(2.0 * M_PI * t / 29.0 + 0.7);

    // camera drift: integer random walk so homographies are exact
    cam_offset_.resize(config_.n_frames);
    {
        Rng rng = Rng::sub(config_.seed, 0xCA3Eu);
        double ox = 0.0, oy = 0.0;
        for (int t = 0; t < config_.n_frames; ++t) {
            if (t > 0) {
                ox += std::round(rng.normal(0.0, config_.camera_drift_px));
                oy += std::round(rng.normal(0.0, config_.camera_drift_px));
            }
            cam_offset_[t] = {ox, oy};
        }
    }

    // vehicle trajectories along their looped routes
    const int n_vehicles = static_cast<int>(config_.vehicles.size());
    placements_.assign(config_.n_frames, std::vector<Placement>(n_vehicles));
    for (int vi = 0; vi < n_vehicles; ++vi) {
        const auto& spec = config_.vehicles[vi];
        Polyline route(spec.route_px);
        const double margin =
            std::max(spec.length_m, spec.width_m) / config_.gsd / 2.0 + 1.0;
        for (const auto& [px, py] : spec.route_px)
            if (px < margin || py < margin || px > config_.frame_w - margin ||
                py > config_.frame_h - margin)
                throw Error("config-error: vehicle route leaves world extent");

        Rng rng = Rng::sub(config_.seed, 0xF00Du + vi);
        const int lpx = std::max(1, (int)std::round(spec.length_m / config_.gsd));
        const int wpx = std::max(1, (int)std::round(spec.width_m / config_.gsd));
        const int spx = std::max(1, (int)std::round(std::sqrt((double)lpx * wpx)));
        double s = spec.route_offset_px;
        for (int t = 0; t < config_.n_frames; ++t) {
            double x, y, hx, hy;
            route.at(s, x, y, hx, hy);
            Placement& p = placements_[t][vi];
            p.cx = x;
            p.cy = y;
            int bw, bh;
            if (std::abs(hx) >= 2.0 * std::abs(hy)) {
                bw = lpx; bh = wpx;          // heading horizontal
            } else if (std::abs(hy) >= 2.0 * std::abs(hx)) {
                bw = wpx; bh = lpx;          // heading vertical
            } else {
                bw = spx; bh = spx;          // diagonal
            }
            p.box = Rect{(int)std::round(x - bw / 2.0),
                         (int)std::round(y - bh / 2.0), bw, bh};
            p.visible = true;
            double v = std::max(0.0, rng.normal(spec.speed_mean_mps, spec.speed_sigma_mps));
            s += v * config_.interval_s / config_.gsd;
        }
    }

    // ground truth
    truth_.gsd = config_.gsd;
    truth_.interval_s = config_.interval_s;
    truth_.frames.resize(config_.n_frames);
    for (int t = 0; t < config_.n_frames; ++t) {
        TruthFrame& tf = truth_.frames[t];
        double dx = 0.0, dy = 0.0;
        if (t > 0) {
            dx = cam_offset_[t].first - cam_offset_[t - 1].first;
            dy = cam_offset_[t].second - cam_offset_[t - 1].second;
        }
        tf.homography = {1, 0, dx, 0, 1, dy, 0, 0, 1};
        for (int vi = 0; vi < n_vehicles; ++vi) {
            const Placement& p = placements_[t][vi];
            Rect fb{p.box.x - (int)cam_offset_[t].first,
                    p.box.y - (int)cam_offset_[t].second, p.box.w, p.box.h};
            Rect vis = fb.clamped(config_.frame_w, config_.frame_h);
            if (vis.w <= 0 || vis.h <= 0) continue;
            TruthVehicle tv;
            tv.id = vi;
            tv.bbox = vis;
            tv.cx = p.cx - cam_offset_[t].first;
            tv.cy = p.cy - cam_offset_[t].second;
            tf.vehicles.push_back(tv);
        }
    }
}

HyperCube SceneRenderer::render_frame(int t) const {
    if (t < 0 || t >= config_.n_frames) throw Error("config-error: frame index");
    const int W = config_.frame_w, H = config_.frame_h;
    const int B = static_cast<int>(wavelengths_.size());
    const int ox = (int)cam_offset_[t].first, oy = (int)cam_offset_[t].second;

    // material index map in frame space; vehicle paints follow backgrounds
    std::vector<int16_t> mat(static_cast<size_t>(W) * H, 0);
    auto fill = [&](const Rect& world_rect, int16_t id) {
        Rect fr = Rect{world_rect.x - ox, world_rect.y - oy, world_rect.w,
                       world_rect.h}
                      .clamped(W, H);
        for (int y = fr.y; y < fr.y2(); ++y)
            std::fill_n(mat.data() + static_cast<size_t>(y) * W + fr.x, fr.w, id);
    };
    for (size_t r = 0; r < region_rect_.size(); ++r)
        fill(region_rect_[r], static_cast<int16_t>(region_material_[r]));
    const int16_t paint_base = static_cast<int16_t>(material_spectra_.size());
    for (size_t vi = 0; vi < placements_[t].size(); ++vi)
        fill(placements_[t][vi].box, static_cast<int16_t>(paint_base + vi));

    // illumination-scaled spectra for this frame
    std::vector<float> spectra(static_cast<size_t>(paint_base + paint_spectra_.size()) * B);
    const double il = illum_[t];
    for (int m = 0; m < paint_base; ++m)
        for (int b = 0; b < B; ++b)
            spectra[static_cast<size_t>(m) * B + b] =
                static_cast<float>(material_spectra_[m][b] * il);
    for (size_t p = 0; p < paint_spectra_.size(); ++p)
        for (int b = 0; b < B; ++b)
            spectra[(paint_base + p) * B + b] =
                static_cast<float>(paint_spectra_[p][b] * il);

    // static terrain albedo texture (vehicle paints stay untextured)
    std::vector<float> tex(static_cast<size_t>(W) * H, 1.0f);
    if (config_.texture_amplitude > 0.0) {
        const uint64_t tseed = config_.seed ^ 0x7E87u;
        const int cell = std::max(1, config_.texture_cell_px);
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x) {
                size_t i = static_cast<size_t>(y) * W + x;
                if (mat[i] >= paint_base) continue;
                double n = terrain_texture(tseed, x + ox, y + oy, cell);
                tex[i] = static_cast<float>(1.0 + config_.texture_amplitude * n);
            }
    }

    HyperCube cube;
    cube.width = W;
    cube.height = H;
    cube.bands = B;
    cube.wavelengths_nm = wavelengths_;
    cube.data.resize(static_cast<size_t>(W) * H * B);
    Rng rng = Rng::sub(config_.seed, 0xBEEFu + static_cast<uint64_t>(t));
    const float sigma = static_cast<float>(config_.noise_sigma);
    for (int b = 0; b < B; ++b) {
        float* out = cube.data.data() + static_cast<size_t>(b) * W * H;
        const size_t n = static_cast<size_t>(W) * H;
        if (sigma > 0.0f) {
            for (size_t i = 0; i < n; ++i) {
                float v = spectra[static_cast<size_t>(mat[i]) * B + b] * tex[i] +
                          sigma * static_cast<float>(rng.normal());
                out[i] = std::clamp(v, 0.0f, 1.0f);
            }
        } else {
            for (size_t i = 0; i < n; ++i)
                out[i] = std::clamp(
                    spectra[static_cast<size_t>(mat[i]) * B + b] * tex[i], 0.0f,
                    1.0f);
        }
    }
    return cube;
}

std::pair<std::vector<HyperCube>, GroundTruth> generate_scene(const SceneConfig& config) {
    SceneRenderer r(config);
    std::vector<HyperCube> frames;
    frames.reserve(config.n_frames);
    for (int t = 0; t < config.n_frames; ++t) frames.push_back(r.render_frame(t));
    return {std::move(frames), r.truth()};
}

SceneConfig default_benchmark_config(uint64_t seed) {
    SceneConfig c;
    c.frame_w = c.frame_h = 256;
    c.n_frames = 100;
    c.interval_s = 1.0;
    c.gsd = 0.75;
    c.band_start_nm = 400.0;
    c.band_end_nm = 990.0;
    c.band_step_nm = 10.0;
    c.noise_sigma = 0.01;
    c.illum_amplitude = 0.02;
    c.camera_drift_px = 2.0;
    c.seed = seed;
    c.base_material = "soil";

    // ring road with square-filled corners, vegetation infield, three buildings
    c.background = {
        {"vegetation", {0, 0, 256, 20}},
        {"vegetation", {0, 236, 256, 20}},
        {"asphalt", {24, 24, 208, 12}},
        {"asphalt", {24, 220, 208, 12}},
        {"asphalt", {24, 24, 12, 208}},
        {"asphalt", {220, 24, 12, 208}},
        {"asphalt", {24, 24, 70, 70}},
        {"asphalt", {162, 24, 70, 70}},
        {"asphalt", {24, 162, 70, 70}},
        {"asphalt", {162, 162, 70, 70}},
        {"vegetation", {96, 96, 64, 64}},
        {"concrete", {104, 104, 22, 20}},
        {"concrete", {132, 118, 20, 24}},
    };

    // rounded-rectangle centerline: straights at 30 px inset; wide corner
    // arcs keep turn rates near the coordinated-turn models at these speeds
    std::vector<std::pair<double, double>> loop;
    const double lo = 30.0, hi = 226.0, r = 56.0;
    auto arc = [&](double cx, double cy, double a0) {
        for (int i = 0; i <= 6; ++i) {
            double a = a0 + i * (M_PI / 2.0) / 6.0;
            loop.emplace_back(cx + r * std::cos(a), cy + r * std::sin(a));
        }
    };
    arc(lo + r, lo + r, M_PI);          // top-left, heading right along top
    arc(hi - r, lo + r, 1.5 * M_PI);    // top-right
    arc(hi - r, hi - r, 0.0);           // bottom-right
    arc(lo + r, hi - r, 0.5 * M_PI);    // bottom-left

    Polyline route(loop);
    Rng rng = Rng::sub(seed, 0x5CEEu);
    std::vector<std::string> paints = {
        "paint_red",  "paint_blue",   "paint_green",   "paint_white",
        "paint_black", "paint_silver", "paint_yellow", "paint_darkred",
        "paint_cyan", "paint_nir"};
    // distinct paints per vehicle: deterministic shuffle
    for (int i = static_cast<int>(paints.size()) - 1; i > 0; --i)
        std::swap(paints[i], paints[rng.uniform_int(0, i)]);
    for (int i = 0; i < 10; ++i) {
        VehicleSpec v;
        v.paint = paints[i];
        v.route_px = loop;
        v.route_offset_px = i * route.total / 10.0 + rng.uniform(0.0, 15.0);
        v.speed_mean_mps = std::clamp(rng.normal(11.0, 2.5), 6.0, 14.0);
        v.speed_sigma_mps = 0.3;
        v.length_m = 7.5;
        v.width_m = 3.5;
        c.vehicles.push_back(std::move(v));
    }
    return c;
}

static nlohmann::json truth_to_json(const GroundTruth& truth) {
    nlohmann::json frames = nlohmann::json::array();
    for (const auto& f : truth.frames) {
        nlohmann::json vs = nlohmann::json::array();
        for (const auto& v : f.vehicles)
            vs.push_back({{"id", v.id},
                          {"cx", v.cx},
                          {"cy", v.cy},
                          {"x", v.bbox.x},
                          {"y", v.bbox.y},
                          {"w", v.bbox.w},
                          {"h", v.bbox.h}});
        frames.push_back({{"homography", f.homography}, {"vehicles", vs}});
    }
    return {{"frames", frames}, {"gsd", truth.gsd}, {"interval_s", truth.interval_s}};
}

void write_truth(const GroundTruth& truth, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error("io-error: cannot write " + path);
    f << truth_to_json(truth).dump(2) << "\n";
}

GroundTruth load_truth(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("io-error: missing " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("parse-error: truth: ") + e.what());
    }
    GroundTruth t;
    t.gsd = j.at("gsd").get<double>();
    t.interval_s = j.at("interval_s").get<double>();
    for (const auto& fj : j.at("frames")) {
        TruthFrame tf;
        auto h = fj.at("homography").get<std::vector<double>>();
        if (h.size() != 9) throw Error("parse-error: homography needs 9 entries");
        std::copy(h.begin(), h.end(), tf.homography.begin());
        for (const auto& vj : fj.at("vehicles")) {
            TruthVehicle tv;
            tv.id = vj.at("id").get<int>();
            tv.cx = vj.at("cx").get<double>();
            tv.cy = vj.at("cy").get<double>();
            tv.bbox = {vj.at("x").get<int>(), vj.at("y").get<int>(),
                       vj.at("w").get<int>(), vj.at("h").get<int>()};
            tf.vehicles.push_back(tv);
        }
        t.frames.push_back(std::move(tf));
    }
    return t;
}

void write_scene(const SceneRenderer& renderer, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (int t = 0; t < renderer.n_frames(); ++t) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%04d", t);
        save_cube(renderer.render_frame(t), dir + "/" + name);
    }
    write_truth(renderer.truth(), dir + "/truth.json");
}

}  // namespace hlt
