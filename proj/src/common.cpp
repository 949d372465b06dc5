#include "fpl/common.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace fpl {

std::size_t worker_count() {
    const char* env = std::getenv("FPL_THREADS");
    if (!env || !*env) return 1;
    const long v = std::strtol(env, nullptr, 10);
    if (v <= 1) return 1;
    return static_cast<std::size_t>(v);
}

void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    const std::size_t workers = std::min(worker_count(), n == 0 ? std::size_t{1} : n);
    if (workers <= 1 || n == 0) {
        fn(0, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(fn, lo, hi);
    }
    for (auto& t : pool) t.join();
}

}  // namespace fpl
