#ifndef FPL_COMMON_HPP
#define FPL_COMMON_HPP

#include <complex>
#include <functional>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fpl {

using Vec = std::vector<double>;
using CVec = std::vector<std::complex<double>>;
using Complex = std::complex<double>;

// Row-major dense matrix. Kept deliberately plain: every hot loop in this
// library walks contiguous rows.
struct Mat {
    std::size_t rows = 0, cols = 0;
    Vec data;

    Mat() = default;
    Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::size_t size() const { return data.size(); }
};

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] inline void fail(const std::string& what) { throw Error(what); }

inline void require(bool cond, const std::string& what) {
    if (!cond) fail(what);
}

// Worker count for the few data-parallel loops (kernel rows, MC sampling).
// Defaults to 1 so runs are bit-stable unless the user opts in.
std::size_t worker_count();

// Runs fn(first, last) over [0, n) split into contiguous chunks, one per
// worker. Chunk boundaries depend only on (n, workers), so per-chunk
// reductions stay deterministic for a fixed FPL_THREADS.
void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace fpl

#endif
