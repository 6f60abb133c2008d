#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace qsurr {

inline unsigned num_threads() {
    if (const char* env = std::getenv("SURR_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Static block partition over [0, n). Each item must write only to its own
// output slot; the reduction order is then fixed by the caller, keeping
// results independent of scheduling.
template <class F>
void parallel_for(std::size_t n, F&& body) {
    unsigned nt = std::min<std::size_t>(num_threads(), n);
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    std::size_t chunk = (n + nt - 1) / nt;
    for (unsigned t = 0; t < nt; ++t) {
        std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace qsurr
