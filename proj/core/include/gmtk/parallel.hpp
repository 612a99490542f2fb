#pragma once
#include <atomic>
#include <cstdlib>
#include <future>
#include <thread>
#include <vector>

namespace gmtk {

inline int default_thread_count() {
    if (const char* env = std::getenv("GMTK_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

/// Runs fn(chunk_index) for chunk_index in [0, nchunks) on a pool and
/// returns results in chunk order. Work is split by fixed chunk index,
/// not by thread, so the combined result does not depend on the thread
/// count or on scheduling.
template <typename Fn>
auto parallel_map_chunks(int nchunks, Fn&& fn, int threads = default_thread_count())
    -> std::vector<decltype(fn(0))> {
    using R = decltype(fn(0));
    std::vector<R> results(nchunks);
    if (threads <= 1 || nchunks <= 1) {
        for (int i = 0; i < nchunks; ++i) results[i] = fn(i);
        return results;
    }
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= nchunks) break;
            results[i] = fn(i);
        }
    };
    std::vector<std::thread> pool;
    int nt = std::min(threads, nchunks);
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return results;
}

} // namespace gmtk
