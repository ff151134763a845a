/// Deterministic parallel map: work items are computed on a small thread
/// pool and written into a vector indexed by item, so any later reduction
/// runs in item order no matter the thread count.
#ifndef UEDA_PARALLEL_HPP
#define UEDA_PARALLEL_HPP

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace ueda {

template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, int threads, Fn&& fn) {
    std::vector<T> out(count);
    if (count == 0) return out;
    if (threads < 1) threads = 1;
    threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), count));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                out[i] = fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
    return out;
}

} // namespace ueda

#endif // UEDA_PARALLEL_HPP
