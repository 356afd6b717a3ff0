#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

namespace mvi::detail {

namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

class Buffer {
public:
    explicit Buffer(std::size_t n) : p_(fftw_alloc_complex(n)) {}
    ~Buffer() { fftw_free(p_); }
    Buffer(const Buffer&) = delete;
    Buffer& operator=(const Buffer&) = delete;
    fftw_complex* get() const noexcept { return p_; }

private:
    fftw_complex* p_;
};

std::vector<cplx> run(const std::vector<cplx>& in, int rank, const int* dims)
{
    const std::size_t n = in.size();
    if (n == 0) return {};
    Buffer a(n), b(n);
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft(rank, dims, a.get(), b.get(), FFTW_FORWARD, FFTW_ESTIMATE);
    }
    std::memcpy(a.get(), in.data(), n * sizeof(cplx));
    fftw_execute(plan);
    std::vector<cplx> out(n);
    std::memcpy(out.data(), b.get(), n * sizeof(cplx));
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

} // namespace

std::vector<cplx> dft(const std::vector<cplx>& in)
{
    int n = static_cast<int>(in.size());
    return run(in, 1, &n);
}

std::vector<cplx> dft2(const std::vector<cplx>& in, std::size_t rows, std::size_t cols)
{
    int dims[2] = {static_cast<int>(rows), static_cast<int>(cols)};
    return run(in, 2, dims);
}

} // namespace mvi::detail
