#include "conekernel/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string_view>
#include <thread>
#include <vector>

namespace conekernel {

int resolve_thread_count(int requested) noexcept {
    int n = requested > 0 ? requested : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("CONEKERNEL_THREADS")) {
        const std::string_view text(env);
        int cap = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), cap);
        if (ec == std::errc() && ptr == text.data() + text.size() && cap > 0) n = std::min(n, cap);
    }
    return n;
}

void parallel_for(std::size_t n_tasks, int threads, const std::function<void(std::size_t, int)>& fn) {
    const int workers = static_cast<int>(std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(n_tasks, 1)));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::size_t error_task = n_tasks;
    std::exception_ptr error;

    auto body = [&](int worker) {
        for (;;) {
            if (failed.load(std::memory_order_relaxed)) return;
            const std::size_t task = next.fetch_add(1, std::memory_order_relaxed);
            if (task >= n_tasks) return;
            try {
                fn(task, worker);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (task < error_task) {
                    error_task = task;
                    error = std::current_exception();
                }
                failed.store(true, std::memory_order_relaxed);
            }
        }
    };

    if (workers == 1) {
        body(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(body, w);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
}

} // namespace conekernel
