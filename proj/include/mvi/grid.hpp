#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace mvi {

using cplx = std::complex<double>;

struct CellIndex {
    std::size_t row = 0;
    std::size_t col = 0;
    bool operator==(const CellIndex&) const = default;
};

// Sampled field on a plane with square cells. Cell (r, c) sits at
// ((c - cols/2) * pitch, (r - rows/2) * pitch); data is row-major.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(std::size_t rows, std::size_t cols, double pitch, T fill = T{});
    Grid(std::size_t rows, std::size_t cols, double pitch, std::vector<T> data);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    double pitch() const noexcept { return pitch_; }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    std::span<T> data() & noexcept { return data_; }
    std::span<const T> data() const& noexcept { return data_; }
    // a span into a temporary grid would dangle
    std::span<const T> data() const&& = delete;
    const std::vector<T>& values() const noexcept { return data_; }

    double x_of(std::size_t c) const noexcept { return (static_cast<double>(c) - cols_ / 2.0) * pitch_; }
    double y_of(std::size_t r) const noexcept { return (static_cast<double>(r) - rows_ / 2.0) * pitch_; }
    std::pair<double, double> coord(std::size_t r, std::size_t c) const noexcept { return {x_of(c), y_of(r)}; }

    // Inverse of coord(): the cell whose anchor point is (x, y), if any.
    std::optional<CellIndex> cell_at(double x, double y) const noexcept;

    bool same_shape(const Grid& other) const noexcept
    {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    bool operator==(const Grid&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    double pitch_ = 1.0;
    std::vector<T> data_;
};

using ComplexGrid = Grid<cplx>;
using RealGrid = Grid<double>;

extern template class Grid<cplx>;
extern template class Grid<double>;

RealGrid magnitude(const ComplexGrid& grid);
RealGrid phase(const ComplexGrid& grid);
RealGrid real_part(const ComplexGrid& grid);
ComplexGrid to_complex(const RealGrid& grid);

// CGRD: 24-byte header "CGRD", u32 rows, u32 cols, u32 reserved (0),
// f64 pitch (little-endian), then
// rows*cols interleaved (re, im) f64, row-major.
void write_cgrd(const std::filesystem::path& path, const ComplexGrid& grid);
void write_cgrd(const std::filesystem::path& path, const RealGrid& grid);
ComplexGrid read_cgrd(const std::filesystem::path& path);

std::vector<unsigned char> encode_cgrd(const ComplexGrid& grid);
ComplexGrid decode_cgrd(std::span<const unsigned char> bytes);

} // namespace mvi
