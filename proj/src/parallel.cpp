#include "ldplab/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace ldplab {

void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
    if (n == 0) return;
    unsigned threads = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("LDPLAB_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) threads = static_cast<unsigned>(v);
    }
    if (threads <= 1 || n == 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    const unsigned used = static_cast<unsigned>(std::min<size_t>(threads, n));
    pool.reserve(used);
    for (unsigned t = 0; t < used; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    for (auto& th : pool) th.join();
}

} // namespace ldplab
