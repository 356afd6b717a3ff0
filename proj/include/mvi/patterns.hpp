#pragma once

#include "mvi/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mvi {

enum class Coding { hadamard, random_speckle, uniform };

std::string to_string(Coding c);
Coding coding_from_string(const std::string& s);

// Ordered source-plane patterns plus the sample -> pattern map. Patterns
// cycle, so total_samples may exceed the cycle length.
struct PatternSchedule {
    std::vector<ComplexGrid> patterns;
    std::size_t samples_per_pattern = 1;
    std::size_t total_samples = 0;
    Coding coding = Coding::hadamard;
    std::size_t side = 0;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> order_seed;  // Hadamard row shuffle, if any
    std::vector<std::size_t> row_order;       // Sylvester row behind each pattern

    std::size_t cycle_length() const noexcept { return patterns.size(); }
    std::size_t pattern_for_sample(std::size_t sample_index) const;

    // Sets the sample bookkeeping; total_samples = 0 means one full cycle.
    PatternSchedule& with_timing(std::size_t samples_per_pattern, std::size_t total_samples);

    void validate() const;
};

// Rows of the Sylvester Hadamard matrix of order side^2, reshaped to
// side x side with +-1 amplitudes. With order_seed the row order is a
// seeded permutation; otherwise natural order.
PatternSchedule hadamard_patterns(std::size_t side, double pitch,
                                  std::optional<std::uint64_t> order_seed = std::nullopt);

// n patterns of i.i.d. unit-magnitude, uniform-phase cells.
PatternSchedule random_speckle_patterns(std::size_t side, std::size_t n, std::uint64_t seed, double pitch);

// A single all-ones pattern (flat illumination).
PatternSchedule uniform_pattern(std::size_t side, double pitch);

// Entry (r, c) of the Sylvester Hadamard matrix: (-1)^popcount(r & c).
int sylvester_entry(std::size_t r, std::size_t c) noexcept;

// Directory of pattern_NNNNN.cgrd files plus manifest.json.
void write_schedule(const std::filesystem::path& dir, const PatternSchedule& schedule);
PatternSchedule read_schedule(const std::filesystem::path& dir);

} // namespace mvi
