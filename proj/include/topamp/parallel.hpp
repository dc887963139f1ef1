#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace topamp {

// threads <= 0: TWPA_THREADS if set, else hardware concurrency
inline int resolve_threads(int threads) {
    if (threads > 0) return threads;
    if (const char* env = std::getenv("TWPA_THREADS")) {
        try {
            int v = std::stoi(env);
            if (v > 0) return v;
        } catch (...) {
        }
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Results are stored by index, so output order never depends on the worker count.
template <class T, class F>
std::vector<T> parallel_map(size_t count, int threads, F&& fn) {
    std::vector<T> out(count);
    std::vector<std::exception_ptr> errs(count);
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next++; i < count; i = next++) {
            try {
                out[i] = fn(i);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    const int nt = std::min<int>(resolve_threads(threads), static_cast<int>(std::max<size_t>(count, 1)));
    if (nt <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace topamp
