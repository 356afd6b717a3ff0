#include "helpers.hpp"

#include "mvi/errors.hpp"
#include "mvi/forward.hpp"
#include "mvi/pipeline.hpp"
#include "mvi/spectral.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <numeric>

using namespace mvi;

namespace {

std::vector<cplx> tones(std::vector<double> freqs, double fs, std::size_t n, std::vector<double> amps = {})
{
    std::vector<cplx> x(n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < freqs.size(); ++i)
            x[k] += (amps.empty() ? 1.0 : amps[i]) * tone(freqs[i], k / fs);
    return x;
}

std::vector<cplx> white(std::size_t n, std::uint64_t seed)
{
    std::vector<cplx> x(n);
    for (std::size_t k = 0; k < n; ++k) {
        auto [a, b] = counter_normal_pair(seed, stream::test, k);
        x[k] = {a, b};
    }
    return x;
}

std::size_t argmax_bin(const TFSpectrum& s, std::size_t frame)
{
    std::size_t best = 1;
    for (std::size_t b = 1; b < s.bins; ++b)
        if (s.at(frame, b) > s.at(frame, best)) best = b;
    return best;
}

} // namespace

TEST_CASE("spectrogram of a zero record is zero")
{
    std::vector<cplx> z(1000);
    auto s = spectrogram(z, 100, 200);
    CHECK(s.frames == 9);
    CHECK(s.bins == 101);
    for (double v : s.magnitudes) CHECK(v == 0.0);
}

TEST_CASE("pure tone gives a ridge at every time slice")
{
    auto s = spectrogram(tones({5.0}, 400, 8000), 400, 1600);
    for (std::size_t f = 0; f < s.frames; ++f)
        CHECK(std::abs(argmax_bin(s, f) * s.freq_step - 5.0) <= s.freq_step);

    // off-grid tone still lands within one bin
    auto t = spectrogram(tones({7.13}, 400, 8000), 400, 1600);
    for (std::size_t f = 0; f < t.frames; ++f)
        CHECK(std::abs(argmax_bin(t, f) * t.freq_step - 7.13) <= t.freq_step);
}

TEST_CASE("spectrogram frames obey Parseval with the window normalisation")
{
    auto x = white(3000, 12);
    const std::size_t W = 256, hop = 100;
    auto s = spectrogram(x, 50, W, hop);
    double w2 = 0;
    std::vector<double> w(W);
    for (std::size_t n = 0; n < W; ++n) {
        w[n] = 0.5 - 0.5 * std::cos(2 * M_PI * n / W);
        w2 += w[n] * w[n];
    }
    for (std::size_t f = 0; f < s.frames; ++f) {
        double time_energy = 0, freq_energy = 0;
        for (std::size_t n = 0; n < W; ++n) time_energy += w[n] * w[n] * std::norm(x[f * hop + n]);
        for (std::size_t b = 0; b < s.bins; ++b) freq_energy += s.at(f, b);
        CHECK(std::abs(freq_energy - time_energy / w2) <= 1e-6 * time_energy / w2);
    }
}

TEST_CASE("spectrogram argument checks")
{
    std::vector<cplx> x(10);
    CHECK_THROWS_AS(spectrogram(x, 10, 20), InvalidArgument);
    CHECK_THROWS_AS(spectrogram(x, 10, 1), InvalidArgument);
    CHECK_THROWS_AS(spectrogram(x, 0, 4), InvalidArgument);
}

TEST_CASE("detect: 2, 4 and 5 Hz tones give the expected interval counts")
{
    auto s = spectrogram(tones({2, 4, 5}, 400, 16000), 400, 1600);
    auto modes = detect_frequencies(s, 400, 8);
    REQUIRE(modes.size() == 3);
    std::vector<std::size_t> n;
    for (const auto& m : modes) n.push_back(m.samples_per_period);
    std::sort(n.begin(), n.end());
    CHECK(n == std::vector<std::size_t>{80, 100, 200});
    for (const auto& m : modes) CHECK_FALSE(m.rounding_warning);
    CHECK(interval_lcm(n) == 400);
}

TEST_CASE("detect: single tone")
{
    auto s = spectrogram(tones({12.5}, 100, 4000), 100, 400);
    auto modes = detect_frequencies(s, 100, 8);
    REQUIRE(modes.size() == 1);
    CHECK(modes[0].frequency == doctest::Approx(12.5).epsilon(1e-9));
    CHECK(modes[0].samples_per_period == 8);
    CHECK(modes[0].confidence > 0.9);
}

TEST_CASE("detect: rounding warning for non-integer periods")
{
    auto s = spectrogram(tones({3.0}, 400, 16000), 400, 1600);
    auto modes = detect_frequencies(s, 400, 8);
    REQUIRE(modes.size() == 1);
    CHECK(modes[0].samples_per_period == 133);
    CHECK(modes[0].rounding_warning);
}

TEST_CASE("detect: white noise yields no modes")
{
    int false_alarms = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto s = spectrogram(white(20000, 100 + seed), 200, 400);
        false_alarms += !detect_frequencies(s, 200, 8).empty();
    }
    CHECK(false_alarms == 0);
}

TEST_CASE("detect: harmonic pruning keeps the fundamental")
{
    auto s = spectrogram(tones({4, 8, 12}, 200, 8000, {0.5, 1.0, 0.7}), 200, 800);
    DetectOptions o;
    o.prune_harmonics = true;
    auto modes = detect_frequencies(s, 200, 8, o);
    REQUIRE(modes.size() == 1);
    CHECK(modes[0].frequency == doctest::Approx(4.0));
    CHECK(detect_frequencies(s, 200, 8).size() == 3);
}

TEST_CASE("detect round trip through the echo model")
{
    auto g = ideal_geometry(1550e-9, 10.0, 4);
    const double p = ideal_pitch(g.wavelength, g.z1, 4);
    for (double fv : {3.0, 7.0, 11.0, 20.0}) {
        const double fs = 100;
        DiscreteTargetSet d;
        d.shape = {4, 4, p};
        d.scatterers.push_back({{1, 1}, 1.0, {{100e-9, fv, 0.4}}, 0, 0});
        TimingConfig t;
        t.sample_interval = 1 / fs;
        t.n_samples = 4000;
        t.f_if = 12.5;
        auto echo = synthesize_echo(d, uniform_pattern(4, p).with_timing(1, 4000), g, t, {});
        auto s = spectrogram(echo, 400);
        DetectOptions o;
        o.prune_harmonics = true;
        auto modes = detect_frequencies(s, fs, 4, o);
        REQUIRE_FALSE(modes.empty());
        CHECK(std::abs(modes[0].frequency - fv) <= s.freq_step);
    }
}

TEST_CASE("plate preset survey shows ridges near 2, 4 and 5 Hz")
{
    SceneConfig cfg = preset("table3_plate_type1");
    cfg.finalize();
    auto survey = survey_echo(cfg);
    auto s = spectrogram(survey, 1600);
    auto avg = s.time_average();
    std::vector<double> sorted = avg;
    std::sort(sorted.begin(), sorted.end());
    const double med = sorted[sorted.size() / 2];
    for (double f : {2.0, 4.0, 5.0}) {
        auto b = static_cast<std::size_t>(std::lround(f / s.freq_step));
        double local = std::max({avg[b - 1], avg[b], avg[b + 1]});
        CHECK(local > 5.0 * med);
        // a local maximum within one bin
        bool peak = false;
        for (std::size_t c = b - 1; c <= b + 1; ++c) peak |= avg[c] >= avg[c - 1] && avg[c] >= avg[c + 1];
        CHECK(peak);
    }
}

TEST_CASE("interval lcm")
{
    std::vector<std::size_t> a{200, 100, 80}, b{20, 10}, c{7};
    CHECK(interval_lcm(a) == 400);
    CHECK(interval_lcm(b) == 20);
    CHECK(interval_lcm(c) == 7);
    CHECK_THROWS_AS(interval_lcm(std::vector<std::size_t>{}), InvalidArgument);

    for (std::uint64_t i = 0; i < 300; ++i) {
        std::vector<std::size_t> in;
        std::size_t count = 1 + i % 3;
        for (std::size_t j = 0; j < count; ++j)
            in.push_back(1 + static_cast<std::size_t>(testing::uniform(7, 3 * i + j) * (i % 2 ? 10000 : 60)));
        std::size_t l = interval_lcm(in);
        for (auto v : in) CHECK(l % v == 0);
        // brute force: no smaller common multiple among multiples of the largest input
        std::size_t big = *std::max_element(in.begin(), in.end());
        if (l / big < 200000)
            for (std::size_t m = big; m < l; m += big) {
                bool all = std::all_of(in.begin(), in.end(), [&](std::size_t v) { return m % v == 0; });
                CHECK_FALSE(all);
                if (all) break;
            }
    }
}

TEST_CASE("bessel functions and line spectra")
{
    CHECK(bessel_j(0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(bessel_j(3, 0.0)) < 1e-15);
    // tabulated values
    CHECK(bessel_j(0, 1.0) == doctest::Approx(0.7651976865579666).epsilon(1e-13));
    CHECK(bessel_j(1, 2.5) == doctest::Approx(0.4970941024642741).epsilon(1e-13));
    CHECK(bessel_j(-1, 2.5) == doctest::Approx(-0.4970941024642741).epsilon(1e-13));
    CHECK(bessel_j(5, 9.7261) == doctest::Approx(std::cyl_bessel_j(5.0, 9.7261)).epsilon(1e-12));

    auto lines = bessel_line_spectrum(0.0, 1550e-9, 10, 40, 3);
    REQUIRE(lines.size() == 7);
    for (const auto& l : lines) CHECK(l.amplitude == doctest::Approx(l.order == 0 ? 1.0 : 0.0));
    CHECK(lines[3].frequency == 40.0);

    const double B = 4 * M_PI * 1200e-9 / 1550e-9;
    CHECK(B == doctest::Approx(9.73).epsilon(1e-3));
    auto l2 = bessel_line_spectrum(1200e-9, 1550e-9, 15, 0, 2);
    CHECK(l2[0].frequency == -30.0);
    CHECK(l2[4].amplitude == doctest::Approx(std::abs(std::cyl_bessel_j(2.0, B))).epsilon(1e-12));
}

TEST_CASE("Jacobi-Anger expansion reproduces the phase modulation")
{
    for (double B : {0.5, 3.0, 9.7261, 12.0}) {
        int mmax = static_cast<int>(std::ceil(B)) + 20;
        for (double theta : {0.0, 0.3, 1.7, -2.9, 3.1}) {
            cplx acc = 0;
            for (int m = -mmax; m <= mmax; ++m) acc += bessel_j(m, B) * std::polar(1.0, m * theta);
            CHECK(std::abs(acc - std::polar(1.0, B * std::sin(theta))) <= 1e-9);
        }
    }
}

TEST_CASE("spectrum exports")
{
    auto s = spectrogram(tones({5.0}, 40, 400), 40, 80);
    auto dir = testing::scratch("spectrum");
    write_spectrum_csv(dir / "s.csv", s);
    std::ifstream in(dir / "s.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "time,frequency,magnitude");
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == s.frames * s.bins);

    write_spectrum_cgrd(dir / "s.cgrd", s);
    auto g = read_cgrd(dir / "s.cgrd");
    CHECK(g.rows() == s.frames);
    CHECK(g.cols() == s.bins);
    CHECK(g(2, 10).real() == s.at(2, 10));
    CHECK(g(2, 10).imag() == 0.0);

    DetectedMode m{5.0, 8, 0.99, false};
    auto j = nlohmann::json::parse(modes_to_json({m}, 8));
    CHECK(j["N_t"] == 8);
    CHECK(j["modes"][0]["N"] == 8);
}
