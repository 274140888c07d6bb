#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hlt/cube.hpp"

namespace hlt {

// Reflectance curve modeled as a constant offset plus Gaussian bumps,
// clamped to [0,1].
struct SpectralSignature {
    struct Bump {
        double center_nm;
        double sigma_nm;
        double amplitude;
    };
    std::string name;
    double offset = 0.0;
    std::vector<Bump> bumps;

    double reflectance(double nm) const;
};

// Built-in material/paint palette (roads, vegetation, buildings, soil and
// ten vehicle paints). Curves are synthetic stand-ins, not measured spectra.
const std::vector<SpectralSignature>& signature_palette();
const SpectralSignature& signature_by_name(const std::string& name);

struct VehicleSpec {
    std::string paint;
    std::vector<std::pair<double, double>> route_px;  // looped polyline, world px
    double route_offset_px = 0.0;                     // initial arc position
    double speed_mean_mps = 15.6;
    double speed_sigma_mps = 0.5;
    double length_m = 7.5;
    double width_m = 3.5;
};

struct RegionSpec {
    std::string material;
    Rect region_px;  // world coordinates; painted in list order
};

struct SceneConfig {
    int frame_w = 256;
    int frame_h = 256;
    int n_frames = 100;
    double interval_s = 1.0;
    double gsd = 0.75;  // meters per pixel
    double band_start_nm = 400.0;
    double band_end_nm = 990.0;
    double band_step_nm = 10.0;
    std::string base_material = "soil";
    std::vector<RegionSpec> background;
    std::vector<VehicleSpec> vehicles;
    double noise_sigma = 0.01;       // reflectance units
    double illum_amplitude = 0.02;   // per-frame scalar 1 +/- amplitude
    double texture_amplitude = 0.3;  // terrain albedo variation, fractional
    int texture_cell_px = 6;         // texture correlation length, world px
    double camera_drift_px = 2.0;    // random-walk step sigma per axis
    uint64_t seed = 0;

    int n_bands() const;
    std::vector<double> wavelengths() const;
};

struct TruthVehicle {
    int id = 0;
    double cx = 0.0, cy = 0.0;  // frame px
    Rect bbox;                  // frame px
};

struct TruthFrame {
    std::array<double, 9> homography;  // frame t -> frame t-1, row-major
    std::vector<TruthVehicle> vehicles;
};

struct GroundTruth {
    std::vector<TruthFrame> frames;
    double gsd = 0.0;
    double interval_s = 0.0;
};

// Precomputes trajectories, illumination and camera drift so individual
// frames render independently (pure in the frame index).
class SceneRenderer {
public:
    explicit SceneRenderer(const SceneConfig& config);

    int n_frames() const { return config_.n_frames; }
    const SceneConfig& config() const { return config_; }
    const GroundTruth& truth() const { return truth_; }

    HyperCube render_frame(int t) const;

private:
    SceneConfig config_;
    GroundTruth truth_;
    std::vector<double> wavelengths_;
    std::vector<std::vector<float>> material_spectra_;  // [material][band]
    std::vector<std::vector<float>> paint_spectra_;     // [vehicle][band]
    std::vector<double> illum_;                          // per frame
    std::vector<std::pair<double, double>> cam_offset_;  // per frame, world px
    // per frame, per vehicle: world-px rect + center
    struct Placement {
        double cx, cy;
        Rect box;
        bool visible;
    };
    std::vector<std::vector<Placement>> placements_;
    std::vector<int> region_material_;  // index into material_spectra_
    std::vector<Rect> region_rect_;
};

// Renders the full sequence. Prefer SceneRenderer for long sequences.
std::pair<std::vector<HyperCube>, GroundTruth> generate_scene(const SceneConfig& config);

// The 100-frame / 10-vehicle ring-road benchmark layout. Vehicle paints,
// routes and speeds vary with the seed; the static layout does not.
SceneConfig default_benchmark_config(uint64_t seed);

// Writes frame_%04d.bsq/.json plus truth.json into `dir`.
void write_scene(const SceneRenderer& renderer, const std::string& dir);
void write_truth(const GroundTruth& truth, const std::string& path);
GroundTruth load_truth(const std::string& path);

}  // namespace hlt
