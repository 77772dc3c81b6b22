#include "pexstab/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace pexstab {
namespace {

std::atomic<std::size_t> g_requested{1};

std::size_t env_cap() {
    const char* env = std::getenv("PEXSTAB_THREADS");
    if (env == nullptr) return std::numeric_limits<std::size_t>::max();
    try {
        const long v = std::stol(env);
        return v < 1 ? 1 : static_cast<std::size_t>(v);
    } catch (...) {
        return 1;
    }
}

}  // namespace

std::size_t scan_threads() { return std::min(g_requested.load(), env_cap()); }

void set_scan_threads(std::size_t n) { g_requested.store(n == 0 ? 1 : n); }

}  // namespace pexstab
