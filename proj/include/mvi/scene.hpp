#pragma once

#include "mvi/forward.hpp"
#include "mvi/patterns.hpp"
#include "mvi/recon.hpp"
#include "mvi/targets.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mvi {

struct GridSpec {
    std::size_t side = 32;
    double pitch = 0.0;  // 0 in a config file = ideal pitch
    bool operator==(const GridSpec&) const = default;
};

struct PatternSpec {
    Coding coding = Coding::hadamard;
    std::size_t samples_per_pattern = 1;
    bool shuffle = false;        // seeded Hadamard row permutation
    std::size_t n_patterns = 0;  // random speckle only
    bool operator==(const PatternSpec&) const = default;
};

struct SpectralSpec {
    std::size_t window_len = 0;      // 0 = four seconds of samples
    std::size_t hop = 0;             // 0 = window_len / 2
    std::size_t max_modes = 8;
    double threshold_factor = 5.0;
    std::size_t survey_samples = 0;  // 0 = 8 windows
    bool operator==(const SpectralSpec&) const = default;
};

struct ReconRequest {
    ReconMethod method = ReconMethod::static_target;
    std::string tag;
    std::vector<VibrationComponent> components;  // discrete_mode
    double filter_k = 3.0;
    double floor = default_relevance_floor;
    std::size_t n_interval = 0;  // type1: 0 = from detected modes
    double frequency = 0.0;      // type2 target frequency f_i
    std::vector<std::size_t> t0 = {0};
    std::size_t max_subsamples = 0;
    bool operator==(const ReconRequest&) const = default;
};

struct SceneConfig {
    std::string name = "scene";
    std::uint64_t seed = 0;
    SystemGeometry geometry;
    GridSpec grid;
    TimingConfig timing;
    MotionConfig motion;
    PatternSpec patterns;
    Target target;
    double eta = 1.0;
    double lo_amplitude = 1.0;
    bool psf_blur = false;
    SpectralSpec spectral;
    std::vector<ReconRequest> recon;
    std::string output_dir = "out";
    std::string notes;

    // Resolves the ideal pitch and aperture defaults, then checks every
    // cross-reference. Throws InvalidArgument naming the field at fault.
    void finalize();
    ForwardOptions forward_options(unsigned threads = 1) const;
    bool operator==(const SceneConfig&) const = default;
};

SceneConfig parse_scene(const std::string& json_text, const std::filesystem::path& base_dir = {});
std::string serialize_scene(const SceneConfig& config);
SceneConfig load_scene(const std::filesystem::path& path);

std::vector<std::string> preset_names();
SceneConfig preset(const std::string& name, std::optional<std::uint64_t> seed = std::nullopt);

// Applies a new seed. For presets the scene is regenerated, since the
// seed also drives scatterer placement.
SceneConfig reseed(const SceneConfig& config, std::uint64_t seed);

PatternSchedule build_schedule(const SceneConfig& config);

} // namespace mvi
