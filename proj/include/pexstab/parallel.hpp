#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <thread>
#include <vector>

namespace pexstab {

/// Number of worker threads used by enumeration scans. Defaults to 1; capped by
/// the PEXSTAB_THREADS environment variable when that is set.
std::size_t scan_threads();
void set_scan_threads(std::size_t n);

struct ScanResult {
    double value;
    std::size_t index;  // lowest index attaining `value`
};

/// Maximum of `f(i)` over i in [0, n). Ties resolve to the lowest index, so the
/// result does not depend on the thread count. NaN never wins.
template <class F>
ScanResult parallel_max(std::size_t n, F&& f) {
    const auto scan = [&](std::size_t lo, std::size_t hi) {
        ScanResult best{-std::numeric_limits<double>::infinity(), lo};
        for (std::size_t i = lo; i < hi; ++i) {
            const double v = f(i);
            if (v > best.value) best = {v, i};
        }
        return best;
    };
    const std::size_t threads = std::min(scan_threads(), std::max<std::size_t>(n / 256, 1));
    if (threads <= 1) return scan(0, n);

    std::vector<ScanResult> partial(threads);
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t lo = std::min(n, t * chunk);
        const std::size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([&, t, lo, hi] { partial[t] = scan(lo, hi); });
    }
    for (auto& th : pool) th.join();
    ScanResult best = partial.front();
    for (const auto& p : partial)
        if (p.value > best.value) best = p;
    return best;
}

template <class F>
ScanResult parallel_min(std::size_t n, F&& f) {
    auto r = parallel_max(n, [&](std::size_t i) { return -f(i); });
    r.value = -r.value;
    return r;
}

}  // namespace pexstab
