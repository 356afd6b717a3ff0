#pragma once

#include "mvi/forward.hpp"
#include "mvi/scene.hpp"
#include "mvi/spectral.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mvi {

std::string version();

std::string sha256_hex(std::span<const unsigned char> bytes);
std::string sha256_file(const std::filesystem::path& path);

// Coded echo of the configured scene over the full record.
EchoRecord simulate(const SceneConfig& config, const PatternSchedule& schedule, unsigned threads = 1);

// Short flat-illumination echo of the same scene, used for the
// time-frequency stage (coding spreads the coded echo's spectrum).
EchoRecord survey_echo(const SceneConfig& config, unsigned threads = 1);

struct SpectralResult {
    TFSpectrum spectrum;
    std::vector<DetectedMode> modes;
    std::size_t n_interval = 0;  // LCM of the detected N_mn
    std::vector<std::string> warnings;
};

SpectralResult analyse_spectrum(const SceneConfig& config, const EchoRecord& survey);

struct RunOptions {
    std::filesystem::path out_dir;  // empty = config.output_dir
    unsigned threads = 1;
    bool write_png = true;
};

struct RunResult {
    std::filesystem::path out_dir;
    std::string manifest_json;
    std::vector<std::string> files;  // relative to out_dir, manifest excluded
};

// synthesize -> spectral analysis -> requested reconstructions, writing
// artifacts and manifest.json. Stage failures surface as StageError.
RunResult run(const SceneConfig& config, const RunOptions& options = {});

} // namespace mvi
