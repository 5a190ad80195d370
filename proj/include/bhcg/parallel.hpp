#pragma once

// Data-parallel helpers for the integer scans. Work is split into contiguous
// chunks and merged in chunk order, so results do not depend on the job count.

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace bhcg
{

/// Resolves a requested job count; 0 means hardware concurrency.
inline unsigned resolve_jobs(unsigned jobs)
{
    if (jobs == 0)
        jobs = std::max(1u, std::thread::hardware_concurrency());
    return jobs;
}

/// Calls body(lo_i, hi_i, chunk_index) for a partition of [lo, hi).
template <class Body>
void parallel_chunks(std::int64_t lo, std::int64_t hi, unsigned jobs, Body&& body)
{
    jobs = resolve_jobs(jobs);
    const std::int64_t n = hi - lo;
    if (n <= 0)
        return;
    if (jobs == 1 || n < 2) {
        body(lo, hi, 0u);
        return;
    }
    const auto chunks = static_cast<std::int64_t>(std::min<std::int64_t>(jobs, n));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(chunks));
    for (std::int64_t i = 0; i < chunks; ++i) {
        const std::int64_t a = lo + n * i / chunks;
        const std::int64_t b = lo + n * (i + 1) / chunks;
        threads.emplace_back([&body, a, b, i] { body(a, b, static_cast<unsigned>(i)); });
    }
    for (auto& t : threads)
        t.join();
}

/// #{i in [lo, hi) : pred(i)}.
template <class Pred>
std::int64_t parallel_count(std::int64_t lo, std::int64_t hi, unsigned jobs, Pred&& pred)
{
    const unsigned n = resolve_jobs(jobs);
    std::vector<std::int64_t> partial(n, 0);
    parallel_chunks(lo, hi, n, [&](std::int64_t a, std::int64_t b, unsigned chunk) {
        std::int64_t c = 0;
        for (std::int64_t i = a; i < b; ++i)
            if (pred(i))
                ++c;
        partial[chunk] = c;
    });
    std::int64_t total = 0;
    for (auto c : partial)
        total += c;
    return total;
}

/// out[i - lo] = f(i) for i in [lo, hi).
template <class T, class F>
std::vector<T> parallel_map(std::int64_t lo, std::int64_t hi, unsigned jobs, F&& f)
{
    std::vector<T> out(static_cast<std::size_t>(std::max<std::int64_t>(0, hi - lo)));
    parallel_chunks(lo, hi, jobs, [&](std::int64_t a, std::int64_t b, unsigned) {
        for (std::int64_t i = a; i < b; ++i)
            out[static_cast<std::size_t>(i - lo)] = f(i);
    });
    return out;
}

} // namespace bhcg
