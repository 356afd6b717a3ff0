#include "helpers.hpp"

#include "mvi/errors.hpp"
#include "mvi/grid.hpp"
#include "mvi/pipeline.hpp"
#include "mvi/png_export.hpp"
#include "mvi/scene.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <iterator>
#include <set>

using namespace mvi;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// every artifact listed once, hashes and sizes match what is on disk
void check_manifest(const fs::path& dir)
{
    json m = json::parse(slurp(dir / "manifest.json"));
    std::set<std::string> listed;
    for (const auto& f : m.at("files")) {
        std::string rel = f.at("path");
        CHECK(listed.insert(rel).second);
        fs::path p = dir / rel;
        REQUIRE(fs::exists(p));
        CHECK(f.at("bytes").get<std::uintmax_t>() == fs::file_size(p));
        CHECK(f.at("sha256").get<std::string>() == sha256_file(p));
    }
    std::set<std::string> on_disk;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) on_disk.insert(fs::relative(e.path(), dir).generic_string());
    on_disk.erase("manifest.json");
    CHECK(on_disk == listed);
    CHECK(m.contains("version"));
    CHECK(m.contains("seed"));
    CHECK(m.at("input_hash").get<std::string>().size() == 64);
    CHECK(m.contains("timings"));
    CHECK(m.contains("warnings"));
}

} // namespace

TEST_CASE("scene config survives a serialize/parse round trip for every preset")
{
    for (const auto& name : preset_names()) {
        CAPTURE(name);
        SceneConfig c = preset(name, 7);
        SceneConfig back = parse_scene(serialize_scene(c));
        CHECK(back == c);
        CHECK(serialize_scene(back) == serialize_scene(c));
    }
}

TEST_CASE("scene parsing rejects bad input with InvalidArgument")
{
    json j = json::parse(serialize_scene(preset("table2_discrete", 1)));
    SUBCASE("seed is mandatory")
    {
        j.erase("seed");
        CHECK_THROWS_AS(parse_scene(j.dump()), InvalidArgument);
    }
    SUBCASE("unknown recon method")
    {
        j["recon"][0]["method"] = "holographic";
        CHECK_THROWS_AS(parse_scene(j.dump()), InvalidArgument);
    }
    SUBCASE("grid mismatch")
    {
        j["grid"]["side"] = 16;
        CHECK_THROWS_AS(parse_scene(j.dump()), InvalidArgument);
    }
    SUBCASE("not json at all")
    {
        CHECK_THROWS_AS(parse_scene("{ seed: "), InvalidArgument);
    }
    CHECK_THROWS_AS(preset("no_such_preset"), InvalidArgument);
}

TEST_CASE("reseed changes the scatterers but nothing structural")
{
    SceneConfig a = preset("table2_discrete", 1);
    SceneConfig b = reseed(a, 2);
    CHECK(b.seed == 2);
    CHECK(b.grid == a.grid);
    CHECK(b.recon == a.recon);
    CHECK_FALSE(b == a);
}

TEST_CASE("png mapping names")
{
    CHECK(png_mapping_from_string("magnitude") == PngMapping::magnitude);
    CHECK(png_mapping_from_string("phase") == PngMapping::phase);
    CHECK(png_mapping_from_string("real") == PngMapping::real);
    CHECK_THROWS_AS(png_mapping_from_string("hue"), InvalidArgument);
}

TEST_CASE("grey levels")
{
    ComplexGrid zero(4, 4, 1.0);
    for (auto m : {PngMapping::magnitude, PngMapping::real})
        for (auto v : grey_levels(zero, m)) CHECK(v == 0);

    // phase ramp covering exactly one turn across 256 columns
    ComplexGrid ramp(1, 256, 1.0);
    for (std::size_t c = 0; c < 256; ++c) ramp(0, c) = std::polar(1.0, -M_PI + 2.0 * M_PI * (c + 0.5) / 256.0);
    auto px = grey_levels(ramp, PngMapping::phase);
    for (std::size_t c = 0; c < 256; ++c) CHECK(px[c] == c);

    // magnitude: max maps to 255, zero stays black
    ComplexGrid g(1, 3, 1.0);
    g(0, 1) = {0.0, 2.0};
    g(0, 2) = {-4.0, 0.0};
    auto mag = grey_levels(g, PngMapping::magnitude);
    CHECK(mag[0] == 0);
    CHECK(mag[1] == 128);
    CHECK(mag[2] == 255);

    ComplexGrid bad(1, 1, 1.0);
    bad[0] = {std::nan(""), 0.0};
    CHECK_THROWS_AS(grey_levels(bad, PngMapping::magnitude), NumericError);
}

TEST_CASE("png files are written with the png signature")
{
    auto dir = testing::scratch("png");
    auto g = testing::random_grid(8, 5, 1.0, 3);
    export_png(dir / "a.png", g, PngMapping::phase);
    std::string bytes = slurp(dir / "a.png");
    REQUIRE(bytes.size() > 8);
    CHECK(bytes.substr(1, 3) == "PNG");
    CHECK_THROWS_AS(export_png("/proc/nope/a.png", g, PngMapping::phase), std::exception);
}

TEST_CASE("sha256 of known strings")
{
    std::string abc = "abc";
    std::span<const unsigned char> s(reinterpret_cast<const unsigned char*>(abc.data()), abc.size());
    CHECK(sha256_hex(s) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex({}) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("pipeline run on the discrete preset")
{
    auto dir = testing::scratch("run_table2");
    SceneConfig c = preset("table2_discrete", 1);
    RunOptions opt;
    opt.out_dir = dir / "a";
    opt.threads = 2;
    RunResult r = run(c, opt);

    for (const char* tag : {"mode1", "mode2", "mode3"}) {
        CAPTURE(tag);
        fs::path img = opt.out_dir / "recon" / (std::string(tag) + ".cgrd");
        REQUIRE(fs::exists(img));
        ComplexGrid g = read_cgrd(img);
        CHECK(g.rows() == c.grid.side);
        CHECK(fs::exists(opt.out_dir / "recon" / (std::string(tag) + "_mag.png")));
    }
    json m = json::parse(r.manifest_json);
    CHECK(m.at("metrics").at("mode1").at("support_f1").get<double>() >= 0.9);
    check_manifest(opt.out_dir);

    // same seed, different thread count: identical binary artifacts
    RunOptions opt2 = opt;
    opt2.out_dir = dir / "b";
    opt2.threads = 1;
    run(c, opt2);
    for (const char* rel : {"echo.cech", "recon/mode1.cgrd", "recon/mode2.cgrd", "recon/mode3.cgrd",
                            "truth/snapshot_t0.cgrd", "spectrum/spectrogram.cgrd", "config.json"})
    {
        CAPTURE(rel);
        CHECK(sha256_file(opt.out_dir / rel) == sha256_file(opt2.out_dir / rel));
    }
}

TEST_CASE("pipeline run on the plate preset writes frame and k-space stacks")
{
    auto dir = testing::scratch("run_table3");
    SceneConfig c = preset("table3_plate_type1", 1);
    RunOptions opt;
    opt.out_dir = dir;
    opt.threads = 2;
    opt.write_png = false;
    RunResult r = run(c, opt);
    check_manifest(dir);

    json m = json::parse(r.manifest_json);
    std::size_t frames = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir / "recon"))
        if (e.path().extension() == ".cgrd") ++frames;
    std::size_t kframes = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir / "kspace"))
        if (e.path().extension() == ".cgrd") ++kframes;
    CHECK(frames >= 4);
    CHECK(kframes == frames);
    for (const auto& e : fs::recursive_directory_iterator(dir)) CHECK(e.path().extension() != ".png");
    CHECK(m.at("metrics").at("detected_N_t").get<std::size_t>() > 0);
}

TEST_CASE("run surfaces I/O failures as a StageError of kind io")
{
    SceneConfig c = preset("table2_discrete", 1);
    RunOptions opt;
    opt.out_dir = "/proc/mvi_cannot_write_here";
    try {
        run(c, opt);
        FAIL("expected StageError");
    } catch (const StageError& e) {
        CHECK(e.kind() == StageError::Kind::io);
    }
}
