#include "ricker/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ricker {

unsigned thread_count() {
    if (const char* env = std::getenv("RICKER_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n >= 1)
            return static_cast<unsigned>(std::min(n, 1024L));
        // unparseable values fall through to the hardware default
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

namespace {
// Below this many items the thread spawn costs more than it saves.
constexpr std::size_t kSerialCutoff = 4096;
}  // namespace

void parallel_for_blocks(
    std::size_t n, std::size_t n_blocks,
    const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    if (n_blocks == 0) n_blocks = 1;
    n_blocks = std::min(n_blocks, n);

    const auto lo = [&](std::size_t b) { return b * n / n_blocks; };

    const unsigned workers =
        std::min<std::size_t>(thread_count(), n_blocks);
    if (workers == 1 || n < kSerialCutoff) {
        for (std::size_t b = 0; b < n_blocks; ++b) body(b, lo(b), lo(b + 1));
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    const auto worker = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
            if (b >= n_blocks) return;
            try {
                body(b, lo(b), lo(b + 1));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body) {
    parallel_for_blocks(n, kDefaultBlocks,
                        [&](std::size_t, std::size_t begin, std::size_t end) {
                            body(begin, end);
                        });
}

}  // namespace ricker
