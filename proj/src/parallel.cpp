#include "genfrac/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace genfrac {

int worker_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("GENFRAC_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap >= 1 && cap < hw) hw = cap;
            if (cap >= 1 && cap >= hw) hw = cap > 64 ? 64 : cap;
        } catch (...) {
            // ignore malformed values, keep hardware default
        }
    }
    return hw;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const int workers = worker_count();
    if (workers <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto run = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const int spawn = std::min<std::size_t>(workers, count) - 1;
    pool.reserve(spawn);
    for (int w = 0; w < spawn; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
}

} // namespace genfrac
