#include "mvi/png_export.hpp"

#include "mvi/errors.hpp"

#include <png.h>

#include <csetjmp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>

namespace mvi {

PngMapping png_mapping_from_string(const std::string& s)
{
    if (s == "magnitude") return PngMapping::magnitude;
    if (s == "phase") return PngMapping::phase;
    if (s == "real") return PngMapping::real;
    throw InvalidArgument("PNG mapping must be magnitude, phase or real (got '" + s + "')");
}

std::vector<unsigned char> grey_levels(const ComplexGrid& grid, PngMapping mapping)
{
    std::vector<unsigned char> px(grid.size());
    if (mapping == PngMapping::phase) {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double u = (std::arg(grid[i]) + std::numbers::pi) / two_pi;
            u -= std::floor(u);
            px[i] = static_cast<unsigned char>(std::min(255.0, std::floor(u * 256.0)));
        }
        return px;
    }
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        v[i] = mapping == PngMapping::magnitude ? std::abs(grid[i]) : grid[i].real();
    for (double x : v)
        if (!std::isfinite(x)) throw NumericError("cannot render a grid with non-finite values");
    auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    double lo = *lo_it, hi = *hi_it;
    if (mapping == PngMapping::magnitude) lo = std::min(lo, 0.0);
    double span = hi - lo;
    for (std::size_t i = 0; i < v.size(); ++i)
        px[i] = span > 0.0 ? static_cast<unsigned char>(std::lround(255.0 * (v[i] - lo) / span)) : 0;
    return px;
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};

void write_grey_png(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                    const std::vector<unsigned char>& px)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "wb"));
    if (!f) throw IoError("cannot write " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng initialisation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG encoding failed for " + path.string());
    }
    png_init_io(png, f.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(cols), static_cast<png_uint_32>(rows), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    // image row 0 at the top is the largest y (north up)
    for (std::size_t r = rows; r-- > 0;) png_write_row(png, px.data() + r * cols);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace

void export_png(const std::filesystem::path& path, const ComplexGrid& grid, PngMapping mapping)
{
    write_grey_png(path, grid.rows(), grid.cols(), grey_levels(grid, mapping));
}

void export_png(const std::filesystem::path& path, const RealGrid& grid, PngMapping mapping)
{
    export_png(path, to_complex(grid), mapping);
}

} // namespace mvi
