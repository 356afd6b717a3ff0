#include "mvi/patterns.hpp"

#include "binary_io.hpp"
#include "mvi/errors.hpp"
#include "mvi/rng.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace mvi {

using nlohmann::json;

std::string to_string(Coding c)
{
    switch (c) {
    case Coding::hadamard: return "hadamard";
    case Coding::random_speckle: return "random_speckle";
    case Coding::uniform: return "uniform";
    }
    return "unknown";
}

Coding coding_from_string(const std::string& s)
{
    if (s == "hadamard") return Coding::hadamard;
    if (s == "random_speckle") return Coding::random_speckle;
    if (s == "uniform") return Coding::uniform;
    throw InvalidArgument("unknown coding '" + s + "'");
}

std::size_t PatternSchedule::pattern_for_sample(std::size_t sample_index) const
{
    if (sample_index >= total_samples)
        throw InvalidArgument("sample index " + std::to_string(sample_index) + " outside [0, " +
                              std::to_string(total_samples) + ")");
    return (sample_index / samples_per_pattern) % patterns.size();
}

PatternSchedule& PatternSchedule::with_timing(std::size_t spp, std::size_t n_s)
{
    require(spp >= 1, "samples_per_pattern must be >= 1");
    samples_per_pattern = spp;
    total_samples = n_s == 0 ? spp * patterns.size() : n_s;
    return *this;
}

void PatternSchedule::validate() const
{
    require(!patterns.empty(), "schedule has no patterns");
    require(samples_per_pattern >= 1, "samples_per_pattern must be >= 1");
    require(total_samples >= 1, "schedule covers no samples");
    for (const auto& p : patterns)
        require(p.same_shape(patterns.front()) && p.pitch() == patterns.front().pitch(),
                "all patterns must share shape and pitch");
}

int sylvester_entry(std::size_t r, std::size_t c) noexcept
{
    return (std::popcount(r & c) & 1) ? -1 : 1;
}

PatternSchedule hadamard_patterns(std::size_t side, double pitch, std::optional<std::uint64_t> order_seed)
{
    require(side >= 1, "side must be >= 1");
    const std::size_t n = side * side;
    if (!std::has_single_bit(n))
        throw InvalidArgument("side^2 = " + std::to_string(n) + " is not a power of two (Sylvester construction)");

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    if (order_seed) {
        // Fisher-Yates driven by the counter RNG, so the order is portable
        for (std::size_t i = n - 1; i > 0; --i) {
            auto j = static_cast<std::size_t>(counter_hash(*order_seed, stream::pattern_order, i) % (i + 1));
            std::swap(order[i], order[j]);
        }
    }

    PatternSchedule s;
    s.coding = Coding::hadamard;
    s.side = side;
    s.order_seed = order_seed;
    s.seed = order_seed.value_or(0);
    s.row_order = order;
    s.patterns.reserve(n);
    for (std::size_t a = 0; a < n; ++a) {
        ComplexGrid g(side, side, pitch);
        for (std::size_t i = 0; i < n; ++i) g[i] = static_cast<double>(sylvester_entry(order[a], i));
        s.patterns.push_back(std::move(g));
    }
    s.with_timing(1, 0);
    return s;
}

PatternSchedule random_speckle_patterns(std::size_t side, std::size_t n, std::uint64_t seed, double pitch)
{
    require(side >= 1, "side must be >= 1");
    require(n >= 1, "need at least one speckle pattern");
    PatternSchedule s;
    s.coding = Coding::random_speckle;
    s.side = side;
    s.seed = seed;
    s.patterns.reserve(n);
    const std::size_t cells = side * side;
    for (std::size_t a = 0; a < n; ++a) {
        ComplexGrid g(side, side, pitch);
        for (std::size_t i = 0; i < cells; ++i)
            g[i] = std::polar(1.0, 2.0 * std::numbers::pi * counter_uniform(seed, stream::speckle, a * cells + i));
        s.patterns.push_back(std::move(g));
    }
    s.with_timing(1, 0);
    return s;
}

PatternSchedule uniform_pattern(std::size_t side, double pitch)
{
    PatternSchedule s;
    s.coding = Coding::uniform;
    s.side = side;
    s.patterns.emplace_back(side, side, pitch, cplx(1.0, 0.0));
    s.with_timing(1, 0);
    return s;
}

namespace {

std::string pattern_name(std::size_t i)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "pattern_%05zu.cgrd", i);
    return buf;
}

} // namespace

void write_schedule(const std::filesystem::path& dir, const PatternSchedule& schedule)
{
    schedule.validate();
    std::filesystem::create_directories(dir);
    json files = json::array();
    for (std::size_t i = 0; i < schedule.patterns.size(); ++i) {
        write_cgrd(dir / pattern_name(i), schedule.patterns[i]);
        files.push_back(pattern_name(i));
    }
    json m;
    m["coding"] = to_string(schedule.coding);
    m["side"] = schedule.side;
    m["n_patterns"] = schedule.patterns.size();
    m["samples_per_pattern"] = schedule.samples_per_pattern;
    m["total_samples"] = schedule.total_samples;
    m["seed"] = schedule.seed;
    m["order_seed"] = schedule.order_seed ? json(*schedule.order_seed) : json(nullptr);
    m["row_order"] = schedule.row_order;
    m["files"] = files;
    std::string text = m.dump(2) + "\n";
    detail::write_file(dir / "manifest.json",
                       {reinterpret_cast<const unsigned char*>(text.data()), text.size()});
}

PatternSchedule read_schedule(const std::filesystem::path& dir)
{
    auto bytes = detail::read_file(dir / "manifest.json");
    json m;
    try {
        m = json::parse(bytes.begin(), bytes.end());
    } catch (const json::exception& e) {
        throw IoError("schedule manifest: " + std::string(e.what()));
    }
    PatternSchedule s;
    try {
        s.coding = coding_from_string(m.at("coding").get<std::string>());
        s.side = m.at("side").get<std::size_t>();
        s.seed = m.at("seed").get<std::uint64_t>();
        if (!m.at("order_seed").is_null()) s.order_seed = m.at("order_seed").get<std::uint64_t>();
        s.row_order = m.value("row_order", std::vector<std::size_t>{});
        std::size_t n = m.at("n_patterns").get<std::size_t>();
        for (std::size_t i = 0; i < n; ++i) s.patterns.push_back(read_cgrd(dir / pattern_name(i)));
        s.with_timing(m.at("samples_per_pattern").get<std::size_t>(), m.at("total_samples").get<std::size_t>());
    } catch (const json::exception& e) {
        throw IoError("schedule manifest: " + std::string(e.what()));
    }
    s.validate();
    return s;
}

} // namespace mvi
