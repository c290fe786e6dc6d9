#include "tabml/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tabml {

namespace {

std::atomic<std::size_t> g_thread_limit{1};
thread_local bool t_inside_worker = false;

}  // namespace

void set_thread_limit(std::size_t threads) { g_thread_limit = std::max<std::size_t>(threads, 1); }

std::size_t thread_limit() { return g_thread_limit; }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const auto workers = std::min(thread_limit(), n);
    if (workers <= 1 || t_inside_worker) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        t_inside_worker = true;
        while (true) {
            const auto i = next.fetch_add(1);
            if (i >= n) break;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = n;
            }
        }
        t_inside_worker = false;
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace tabml
