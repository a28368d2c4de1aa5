#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hypspec::parallel {

/// Process-wide default worker count; 1 unless the CLI says otherwise.
int default_threads();
void set_default_threads(int n);

/// Calls f(i) for i in [0, n) on up to `threads` workers. Each index is
/// evaluated exactly once and writes only its own slot, so results are
/// independent of scheduling. If several calls throw, the exception from the
/// smallest index is rethrown.
template <class F>
void for_each_index(std::size_t n, int threads, F&& f) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t err_index = n;
    std::exception_ptr err;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (i < err_index) {
                    err_index = i;
                    err = std::current_exception();
                }
            }
        }
    };
    const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(nt - 1);
    for (std::size_t t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

template <class T, class F>
std::vector<T> map(std::size_t n, int threads, F&& f) {
    std::vector<T> out(n);
    for_each_index(n, threads, [&](std::size_t i) { out[i] = f(i); });
    return out;
}

/// Pairwise (tree) summation; the association order depends only on n.
double tree_sum(const std::vector<double>& v);

}  // namespace hypspec::parallel
