#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hlt/pgm.hpp"
#include "hlt/pipeline.hpp"

using json = nlohmann::json;
using namespace hlt;

namespace {

struct CommonOpts {
    int groups = 12;
    std::string fusion = "adaptive";
    double k = -40.0;
    double x0 = -1.0;  // negative = use 1/N
    int otsu_levels = 2;
    double alpha = 0.5;
    double lambda = 0.1;
    int nscan = 3;
    int threads = 1;
    int roi = 200;
    int min_area = 20;
    int max_area = 100;
    uint64_t seed = 0;
    std::string out;
    std::string config_path;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--seed", o.seed, "rng seed");
    cmd->add_option("--groups", o.groups, "number of band groups");
    cmd->add_option("--fusion", o.fusion,
                    "adaptive | sum-rule | variance-ratio");
    cmd->add_option("--k", o.k, "logistic steepness (negative)");
    cmd->add_option("--x0", o.x0, "logistic midpoint; negative = 1/N");
    cmd->add_option("--otsu-levels", o.otsu_levels, "otsu threshold count (1-3)");
    cmd->add_option("--alpha", o.alpha, "spectral vs motion blend");
    cmd->add_option("--lambda", o.lambda, "target model update rate");
    cmd->add_option("--nscan", o.nscan, "association window length");
    cmd->add_option("--threads", o.threads, "worker thread count");
    cmd->add_option("--roi", o.roi, "tracking ROI side length, px");
    cmd->add_option("--min-area", o.min_area, "blob area lower bound, px");
    cmd->add_option("--max-area", o.max_area, "blob area upper bound, px");
    cmd->add_option("--out", o.out, "output file or directory");
    cmd->add_option("--config", o.config_path, "JSON config file");
}

// precedence: explicit flags > config file > defaults
void merge_config_file(CLI::App* cmd, CommonOpts& o) {
    if (o.config_path.empty()) return;
    std::ifstream f(o.config_path);
    if (!f) throw Error("io-error: cannot read config " + o.config_path);
    json j = json::parse(f);
    auto take = [&](const char* flag, const char* key, auto& field) {
        if (cmd->count(flag) == 0 && j.contains(key))
            field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    take("--seed", "seed", o.seed);
    take("--groups", "groups", o.groups);
    take("--fusion", "fusion", o.fusion);
    take("--k", "k", o.k);
    take("--x0", "x0", o.x0);
    take("--otsu-levels", "otsu_levels", o.otsu_levels);
    take("--alpha", "alpha", o.alpha);
    take("--lambda", "lambda", o.lambda);
    take("--nscan", "nscan", o.nscan);
    take("--threads", "threads", o.threads);
    take("--roi", "roi", o.roi);
    take("--min-area", "min_area", o.min_area);
    take("--max-area", "max_area", o.max_area);
    take("--out", "out", o.out);
}

PipelineParams pipeline_params(const CommonOpts& o) {
    PipelineParams p;
    p.n_groups = o.groups;
    p.strategy = fusion_strategy_from_name(o.fusion);
    p.fusion.k = o.k;
    p.fusion.x0 = o.x0;
    p.fusion.otsu_levels = o.otsu_levels;
    p.detection.otsu_levels = o.otsu_levels;
    p.detection.min_area = o.min_area;
    p.detection.max_area = o.max_area;
    p.tracker.alpha = o.alpha;
    p.tracker.lambda = o.lambda;
    p.tracker.n_scan = o.nscan;
    p.tracker.roi_size_px = o.roi;
    p.threads = o.threads;
    return p;
}

json effective_config(const CommonOpts& o) {
    return json{{"seed", o.seed},
                {"groups", o.groups},
                {"fusion", o.fusion},
                {"k", o.k},
                {"x0", o.x0},
                {"otsu_levels", o.otsu_levels},
                {"alpha", o.alpha},
                {"lambda", o.lambda},
                {"nscan", o.nscan},
                {"threads", o.threads},
                {"roi", o.roi},
                {"min_area", o.min_area},
                {"max_area", o.max_area}};
}

void write_json(const json& j, const std::string& out) {
    if (out.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream f(out);
    if (!f) throw Error("io-error: cannot write " + out);
    f << j.dump(2) << "\n";
}

json rect_json(const Rect& r) {
    return json{{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h}};
}

Rect parse_bbox(const std::vector<int>& v) {
    if (v.size() != 4) throw Error("config-error: bbox needs x,y,w,h");
    return Rect{v[0], v[1], v[2], v[3]};
}

double pct2(double ratio) { return std::round(ratio * 10000.0) / 100.0; }

// foreground = given bbox, background = surrounding 3x ring, both clamped
std::pair<BinaryMap, BinaryMap> fg_bg_masks(const Rect& bbox, int w, int h) {
    Rect fg = bbox.clamped(w, h);
    Rect ring = Rect{bbox.x - bbox.w, bbox.y - bbox.h, bbox.w * 3, bbox.h * 3}
                    .clamped(w, h);
    BinaryMap fgm, bgm;
    fgm.width = bgm.width = w;
    fgm.height = bgm.height = h;
    fgm.grid.assign(static_cast<size_t>(w) * h, 0);
    bgm.grid.assign(static_cast<size_t>(w) * h, 0);
    for (int y = ring.y; y < ring.y2(); ++y)
        for (int x = ring.x; x < ring.x2(); ++x) {
            size_t i = static_cast<size_t>(y) * w + x;
            if (fg.contains(x, y)) fgm.grid[i] = 1;
            else bgm.grid[i] = 1;
        }
    return {fgm, bgm};
}

int cmd_gen(const CommonOpts& o, int frames) {
    if (o.out.empty()) throw Error("config-error: gen requires --out directory");
    SceneConfig cfg = default_benchmark_config(o.seed);
    if (frames > 0) cfg.n_frames = frames;
    SceneRenderer renderer(cfg);
    std::filesystem::create_directories(o.out);
    write_scene(renderer, o.out);
    json j = effective_config(o);
    j["n_frames"] = cfg.n_frames;
    j["frame_w"] = cfg.frame_w;
    j["frame_h"] = cfg.frame_h;
    j["gsd"] = cfg.gsd;
    j["noise_sigma"] = cfg.noise_sigma;
    j["texture_amplitude"] = cfg.texture_amplitude;
    j["texture_cell_px"] = cfg.texture_cell_px;
    write_json(j, o.out + "/gen_config.json");
    std::cout << o.out << "\n";
    return 0;
}

int cmd_fuse_demo(const CommonOpts& o, const std::string& cube_stem,
                  const std::vector<int>& bbox_v) {
    if (o.out.empty()) throw Error("config-error: fuse-demo requires --out directory");
    HyperCube cube = load_cube(cube_stem);
    Rect bbox = parse_bbox(bbox_v);
    auto grouping = make_grouping(cube.bands, o.groups);
    auto model = init_target_model(cube, bbox, grouping);
    auto stack = build_integral_histograms(cube, 10);
    auto maps = compute_all_likelihood_maps(stack, grouping, model, o.threads);
    std::filesystem::create_directories(o.out);
    char name[64];
    for (int g = 0; g < grouping.n_groups(); ++g) {
        std::snprintf(name, sizeof(name), "/group_%02d.pgm", g);
        write_pgm(maps[g], o.out + name);
    }

    auto [fgm, bgm] = fg_bg_masks(bbox, cube.width, cube.height);
    FusionParams fp;
    fp.k = o.k;
    fp.x0 = o.x0;
    fp.otsu_levels = o.otsu_levels;

    json report;
    report["config"] = effective_config(o);
    json weights, margins;

    auto [adaptive, aw] = adaptive_fuse(maps, fp);
    write_pgm(adaptive, o.out + "/fused_adaptive.pgm");
    weights["adaptive"] = aw.w;
    margins["adaptive"] = fg_bg_margin(adaptive, fgm, bgm);

    LikelihoodMap sum = sum_rule_fuse(maps);
    write_pgm(sum, o.out + "/fused_sum-rule.pgm");
    margins["sum-rule"] = fg_bg_margin(sum, fgm, bgm);

    FusionWeights vw = variance_ratio_weights(maps, fgm, bgm);
    LikelihoodMap vr = fuse(maps, vw);
    write_pgm(vr, o.out + "/fused_variance-ratio.pgm");
    weights["variance-ratio"] = vw.w;
    margins["variance-ratio"] = fg_bg_margin(vr, fgm, bgm);

    report["weights"] = weights;
    report["margins"] = margins;
    write_json(report, o.out + "/report.json");
    return 0;
}

int cmd_detect(const CommonOpts& o, const std::string& cube_stem,
               const std::string& model_stem, const std::vector<int>& bbox_v) {
    HyperCube cube = load_cube(cube_stem);
    HyperCube model_cube =
        model_stem.empty() ? cube : load_cube(model_stem);
    Rect bbox = parse_bbox(bbox_v);
    auto grouping = make_grouping(cube.bands, o.groups);
    auto model = init_target_model(model_cube, bbox, grouping);
    auto stack = build_integral_histograms(cube, 10);
    auto maps = compute_all_likelihood_maps(stack, grouping, model, o.threads);

    FusionParams fp;
    fp.k = o.k;
    fp.x0 = o.x0;
    fp.otsu_levels = o.otsu_levels;
    LikelihoodMap fused;
    FusionStrategy strategy = fusion_strategy_from_name(o.fusion);
    if (strategy == FusionStrategy::Adaptive) {
        fused = adaptive_fuse(maps, fp).first;
    } else if (strategy == FusionStrategy::SumRule) {
        fused = sum_rule_fuse(maps);
    } else {
        auto [fgm, bgm] = fg_bg_masks(bbox, cube.width, cube.height);
        fused = fuse(maps, variance_ratio_weights(maps, fgm, bgm));
    }

    DetectionParams dp;
    dp.min_area = o.min_area;
    dp.max_area = o.max_area;
    dp.otsu_levels = o.otsu_levels;
    auto blobs = extract_candidates(fused, stack, grouping, dp);

    json j;
    j["config"] = effective_config(o);
    j["blobs"] = json::array();
    for (const auto& b : blobs)
        j["blobs"].push_back({{"id", b.id},
                              {"cx", b.cx},
                              {"cy", b.cy},
                              {"bbox", rect_json(b.bbox)},
                              {"area", b.area},
                              {"mean_confidence", b.mean_confidence}});
    write_json(j, o.out);
    return 0;
}

std::string frame_stem(const std::string& dir, int t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "/frame_%04d", t);
    return dir + buf;
}

int cmd_track(const CommonOpts& o, const std::string& scene_dir, int target_id,
              const std::vector<int>& init_bbox_v) {
    GroundTruth truth = load_truth(scene_dir + "/truth.json");
    if (truth.frames.empty()) throw Error("config-error: empty ground truth");

    Rect init_bbox;
    if (!init_bbox_v.empty()) {
        init_bbox = parse_bbox(init_bbox_v);
    } else {
        const TruthVehicle* tv = nullptr;
        for (const auto& v : truth.frames[0].vehicles)
            if (v.id == target_id) tv = &v;
        if (!tv)
            throw Error("config-error: target " + std::to_string(target_id) +
                        " not in frame 0 truth");
        init_bbox = tv->bbox;
    }

    HyperCube frame0 = load_cube(frame_stem(scene_dir, 0));
    TrackingPipeline pipe(frame0, init_bbox, truth.gsd, pipeline_params(o));
    int n = static_cast<int>(truth.frames.size());
    for (int t = 1; t < n && pipe.alive(); ++t) {
        HyperCube frame = load_cube(frame_stem(scene_dir, t));
        pipe.step(frame, truth.frames[t].homography, truth.interval_s);
    }

    const auto& history = pipe.tracker().history();
    auto [trp, tgp] = compute_purity(history, truth);

    json j;
    j["config"] = effective_config(o);
    j["scene"] = scene_dir;
    j["target"] = target_id;
    j["gsd"] = truth.gsd;
    j["interval_s"] = truth.interval_s;
    j["frames"] = json::array();
    for (const auto& e : history) {
        json fe{{"frame", e.frame},
                {"associated", e.associated},
                {"canon_x_m", e.canon_x_m},
                {"canon_y_m", e.canon_y_m}};
        if (e.associated) fe["bbox"] = rect_json(e.blob_bbox);
        j["frames"].push_back(std::move(fe));
    }
    for (const auto& s : pipe.steps()) {
        json& fe = j["frames"][s.frame];
        fe["roi"] = rect_json(s.roi);
        fe["n_blobs"] = s.n_blobs;
        if (!s.weights.empty()) fe["weights"] = s.weights;
    }
    j["summary"] = {{"frames_tracked", history.size()},
                    {"trp_pct", pct2(trp)},
                    {"tgp_pct", pct2(tgp)}};
    write_json(j, o.out);
    return 0;
}

int cmd_eval(const CommonOpts& o, const std::string& truth_path,
             const std::vector<std::string>& logs) {
    GroundTruth truth = load_truth(truth_path);
    json j;
    j["config"] = effective_config(o);
    j["per_target"] = json::array();
    double trp_sum = 0.0, tgp_sum = 0.0;
    for (const auto& path : logs) {
        std::ifstream f(path);
        if (!f) throw Error("io-error: cannot read log " + path);
        json log = json::parse(f);
        std::vector<HistoryEntry> history;
        for (const auto& fe : log.at("frames")) {
            HistoryEntry e;
            e.frame = fe.at("frame").get<int>();
            e.associated = fe.at("associated").get<bool>();
            if (e.associated) {
                const auto& b = fe.at("bbox");
                e.blob_bbox = Rect{b.at("x").get<int>(), b.at("y").get<int>(),
                                   b.at("w").get<int>(), b.at("h").get<int>()};
            }
            e.canon_x_m = fe.at("canon_x_m").get<double>();
            e.canon_y_m = fe.at("canon_y_m").get<double>();
            history.push_back(e);
        }
        auto [trp, tgp] = compute_purity(history, truth);
        trp_sum += trp;
        tgp_sum += tgp;
        j["per_target"].push_back({{"log", path},
                                   {"target", log.value("target", -1)},
                                   {"trp_pct", pct2(trp)},
                                   {"tgp_pct", pct2(tgp)}});
    }
    if (logs.empty()) throw Error("config-error: eval requires at least one --log");
    j["mean_trp_pct"] = pct2(trp_sum / static_cast<double>(logs.size()));
    j["mean_tgp_pct"] = pct2(tgp_sum / static_cast<double>(logs.size()));
    write_json(j, o.out);
    return 0;
}

int cmd_bench(const CommonOpts& o, int iters) {
    if (iters < 20) throw Error("config-error: bench needs >= 20 iterations");
    // representative 200x200x60 ROI cut from the benchmark scene
    SceneConfig cfg = default_benchmark_config(o.seed);
    SceneRenderer renderer(cfg);
    HyperCube frame = renderer.render_frame(0);
    HyperCube roi = crop_roi(frame, {28, 28, 200, 200});
    const TruthVehicle& tv = renderer.truth().frames[0].vehicles[0];
    Rect bbox{tv.bbox.x - 28, tv.bbox.y - 28, tv.bbox.w, tv.bbox.h};
    bbox = bbox.clamped(roi.width, roi.height);
    if (bbox.area() < 4) bbox = Rect{100, 100, 8, 4};

    auto grouping = make_grouping(roi.bands, o.groups);
    auto model = init_target_model(roi, bbox, grouping);
    FusionParams fp;
    fp.k = o.k;
    fp.x0 = o.x0;
    fp.otsu_levels = o.otsu_levels;
    DetectionParams dp;
    dp.min_area = o.min_area;
    dp.max_area = o.max_area;
    dp.otsu_levels = o.otsu_levels;

    using clock = std::chrono::steady_clock;
    auto secs = [](clock::time_point a, clock::time_point b) {
        return std::chrono::duration<double>(b - a).count();
    };
    std::vector<double> integral_s, likelihood_s, fusion_s, total_s;
    for (int it = 0; it < iters; ++it) {
        auto t0 = clock::now();
        auto stack = build_integral_histograms(roi, 10);
        auto t1 = clock::now();
        auto maps = compute_all_likelihood_maps(stack, grouping, model, o.threads);
        auto t2 = clock::now();
        auto fused = adaptive_fuse(maps, fp).first;
        auto t3 = clock::now();
        auto blobs = extract_candidates(fused, stack, grouping, dp);
        auto t4 = clock::now();
        (void)blobs;
        integral_s.push_back(secs(t0, t1));
        likelihood_s.push_back(secs(t1, t2));
        fusion_s.push_back(secs(t2, t3));
        total_s.push_back(secs(t0, t4));
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };
    json j;
    j["config"] = effective_config(o);
    j["iterations"] = iters;
    j["roi"] = {{"w", 200}, {"h", 200}, {"bands", roi.bands}};
    j["integral_s"] = median(integral_s);
    j["likelihood_s"] = median(likelihood_s);
    j["fusion_s"] = median(fusion_s);
    j["detect_total_s"] = median(total_s);
    write_json(j, o.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hyperspectral likelihood-map tracker"};
    app.require_subcommand(1);

    CommonOpts o;
    int gen_frames = 0;
    std::vector<int> bbox_v, model_bbox_v, init_bbox_v;
    std::string cube_stem, model_stem, scene_dir, truth_path;
    std::vector<std::string> logs;
    int target_id = 0, bench_iters = 21;

    CLI::App* gen = app.add_subcommand("gen", "generate a benchmark scene");
    add_common(gen, o);
    gen->add_option("--frames", gen_frames, "override frame count");

    CLI::App* fuse_demo =
        app.add_subcommand("fuse-demo", "fuse one ROI cube, dump maps");
    add_common(fuse_demo, o);
    fuse_demo->add_option("--cube", cube_stem, "cube stem (.bsq/.json)")->required();
    fuse_demo->add_option("--bbox", bbox_v, "target bbox x y w h")
        ->expected(4)
        ->required();

    CLI::App* detect = app.add_subcommand("detect", "detect blobs in a cube");
    add_common(detect, o);
    detect->add_option("--cube", cube_stem, "cube stem")->required();
    detect->add_option("--model-cube", model_stem, "model source cube stem");
    detect->add_option("--model-bbox", model_bbox_v, "model bbox x y w h")
        ->expected(4)
        ->required();

    CLI::App* track = app.add_subcommand("track", "track one target through a scene");
    add_common(track, o);
    track->add_option("--scene", scene_dir, "scene directory")->required();
    track->add_option("--init-from-truth", target_id, "truth vehicle id");
    track->add_option("--init-bbox", init_bbox_v, "initial bbox x y w h")
        ->expected(4);

    CLI::App* eval = app.add_subcommand("eval", "score track logs against truth");
    add_common(eval, o);
    eval->add_option("--truth", truth_path, "truth.json path")->required();
    eval->add_option("--log", logs, "track log (repeatable)");

    CLI::App* bench = app.add_subcommand("bench", "time the detection stages");
    add_common(bench, o);
    bench->add_option("--iters", bench_iters, "iterations (>= 20)");

    CLI11_PARSE(app, argc, argv);

    try {
        CLI::App* sub = app.get_subcommands().front();
        merge_config_file(sub, o);
        if (sub == gen) return cmd_gen(o, gen_frames);
        if (sub == fuse_demo) return cmd_fuse_demo(o, cube_stem, bbox_v);
        if (sub == detect) return cmd_detect(o, cube_stem, model_stem, model_bbox_v);
        if (sub == track) return cmd_track(o, scene_dir, target_id, init_bbox_v);
        if (sub == eval) return cmd_eval(o, truth_path, logs);
        if (sub == bench) return cmd_bench(o, bench_iters);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
