#include "e2f/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace e2f {

int max_threads() {
    static const int cached = [] {
        if (const char* env = std::getenv("E2F_THREADS")) {
            int n = std::atoi(env);
            if (n >= 1) return std::min(n, 16);
        }
        unsigned hw = std::thread::hardware_concurrency();
        return std::clamp<int>(static_cast<int>(hw), 1, 16);
    }();
    return cached;
}

void parallel_for(std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    std::size_t workers = static_cast<std::size_t>(max_threads());
    if (grain > 0) workers = std::min(workers, std::max<std::size_t>(1, n / grain));
    workers = std::min(workers, n);
    if (workers <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t begin = w * chunk;
        std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& t : threads) t.join();
}

}  // namespace e2f
