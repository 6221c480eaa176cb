#include "difftomo/parallel.hpp"

namespace difftomo {

namespace {
std::atomic<int> g_max_threads{0};
thread_local bool t_inside_parallel = false;

// Keeps block counts bounded so per-block accumulators stay cheap on large
// ranges while small ranges still split at the requested grain.
constexpr size_t kMaxBlocks = 64;
}  // namespace

void set_max_threads(int n) { g_max_threads.store(n < 0 ? 0 : n); }

int max_threads() {
    int n = g_max_threads.load();
    if (n == 0) {
        unsigned hw = std::thread::hardware_concurrency();
        n = hw == 0 ? 1 : static_cast<int>(hw);
    }
    return n;
}

size_t block_count(size_t n, size_t grain) {
    if (n == 0) return 0;
    if (grain == 0) grain = 1;
    size_t min_grain = (n + kMaxBlocks - 1) / kMaxBlocks;
    grain = std::max(grain, min_grain);
    return (n + grain - 1) / grain;
}

size_t parallel_for_blocks(size_t n, size_t grain,
                           const std::function<void(size_t, size_t, size_t)>& fn) {
    const size_t blocks = block_count(n, grain);
    if (blocks == 0) return 0;
    const size_t step = (n + blocks - 1) / blocks;

    const int threads = max_threads();
    if (blocks == 1 || threads <= 1 || t_inside_parallel) {
        t_inside_parallel = true;
        for (size_t b = 0; b < blocks; ++b)
            fn(b, b * step, std::min(n, (b + 1) * step));
        t_inside_parallel = false;
        return blocks;
    }

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        t_inside_parallel = true;
        for (;;) {
            size_t b = next.fetch_add(1);
            if (b >= blocks) break;
            fn(b, b * step, std::min(n, (b + 1) * step));
        }
        t_inside_parallel = false;
    };

    const size_t nworkers = std::min<size_t>(static_cast<size_t>(threads), blocks);
    std::vector<std::thread> pool;
    pool.reserve(nworkers - 1);
    for (size_t i = 1; i < nworkers; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return blocks;
}

void parallel_for(size_t n, size_t grain, const std::function<void(size_t)>& fn) {
    parallel_for_blocks(n, grain, [&](size_t, size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) fn(i);
    });
}

}  // namespace difftomo
