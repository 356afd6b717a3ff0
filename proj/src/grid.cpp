#include "mvi/grid.hpp"

#include "binary_io.hpp"
#include "mvi/errors.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <string>

namespace mvi {

namespace detail {

void ByteReader::need(std::size_t n) const
{
    if (pos_ + n > bytes_.size()) throw IoError("truncated binary record");
}

std::vector<unsigned char> read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const unsigned char> bytes)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + path.string());
}

} // namespace detail

template <typename T>
Grid<T>::Grid(std::size_t rows, std::size_t cols, double pitch, T fill)
    : rows_(rows), cols_(cols), pitch_(pitch), data_(rows * cols, fill)
{
    require(rows >= 1 && cols >= 1, "grid needs at least one row and one column");
    require(pitch > 0.0 && std::isfinite(pitch), "grid pitch must be positive");
}

template <typename T>
Grid<T>::Grid(std::size_t rows, std::size_t cols, double pitch, std::vector<T> data)
    : rows_(rows), cols_(cols), pitch_(pitch), data_(std::move(data))
{
    require(rows >= 1 && cols >= 1, "grid needs at least one row and one column");
    require(pitch > 0.0 && std::isfinite(pitch), "grid pitch must be positive");
    require(data_.size() == rows * cols, "grid data length must equal rows * cols");
}

template <typename T>
std::optional<CellIndex> Grid<T>::cell_at(double x, double y) const noexcept
{
    double c = x / pitch_ + cols_ / 2.0;
    double r = y / pitch_ + rows_ / 2.0;
    double rc = std::round(c);
    double rr = std::round(r);
    if (std::abs(c - rc) > 1e-6 || std::abs(r - rr) > 1e-6) return std::nullopt;
    if (rc < 0 || rr < 0 || rc >= static_cast<double>(cols_) || rr >= static_cast<double>(rows_)) return std::nullopt;
    return CellIndex{static_cast<std::size_t>(rr), static_cast<std::size_t>(rc)};
}

template class Grid<cplx>;
template class Grid<double>;

RealGrid magnitude(const ComplexGrid& grid)
{
    RealGrid out(grid.rows(), grid.cols(), grid.pitch());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = std::abs(grid[i]);
    return out;
}

RealGrid phase(const ComplexGrid& grid)
{
    RealGrid out(grid.rows(), grid.cols(), grid.pitch());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = std::arg(grid[i]);
    return out;
}

RealGrid real_part(const ComplexGrid& grid)
{
    RealGrid out(grid.rows(), grid.cols(), grid.pitch());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = grid[i].real();
    return out;
}

ComplexGrid to_complex(const RealGrid& grid)
{
    ComplexGrid out(grid.rows(), grid.cols(), grid.pitch());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = grid[i];
    return out;
}

std::vector<unsigned char> encode_cgrd(const ComplexGrid& grid)
{
    constexpr auto max_dim = std::numeric_limits<std::uint32_t>::max();
    require(grid.rows() <= max_dim && grid.cols() <= max_dim, "grid too large for CGRD");
    detail::ByteWriter w;
    w.magic("CGRD");
    w.u32(static_cast<std::uint32_t>(grid.rows()));
    w.u32(static_cast<std::uint32_t>(grid.cols()));
    w.u32(0);  // reserved, keeps pitch 8-byte aligned in a 24-byte header
    w.f64(grid.pitch());
    for (const cplx& v : grid.data()) {
        w.f64(v.real());
        w.f64(v.imag());
    }
    return std::move(w.bytes());
}

ComplexGrid decode_cgrd(std::span<const unsigned char> bytes)
{
    detail::ByteReader r(bytes);
    if (!r.magic("CGRD")) throw IoError("not a CGRD file (bad magic)");
    std::size_t rows = r.u32();
    std::size_t cols = r.u32();
    r.u32();
    double pitch = r.f64();
    if (rows == 0 || cols == 0 || !(pitch > 0.0)) throw IoError("CGRD header has invalid shape or pitch");
    if (r.remaining() != rows * cols * 16) throw IoError("CGRD payload length does not match header");
    std::vector<cplx> data(rows * cols);
    for (auto& v : data) {
        double re = r.f64();
        double im = r.f64();
        v = {re, im};
    }
    return ComplexGrid(rows, cols, pitch, std::move(data));
}

void write_cgrd(const std::filesystem::path& path, const ComplexGrid& grid)
{
    detail::write_file(path, encode_cgrd(grid));
}

void write_cgrd(const std::filesystem::path& path, const RealGrid& grid)
{
    write_cgrd(path, to_complex(grid));
}

ComplexGrid read_cgrd(const std::filesystem::path& path)
{
    return decode_cgrd(detail::read_file(path));
}

} // namespace mvi
