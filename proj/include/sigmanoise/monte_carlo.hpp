#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

namespace sigmanoise {

struct MonteCarloEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t samples = 0;

    /// |mean − target| ≤ k·standard_error.
    bool brackets(double target, double k = 4.0) const { return std::abs(mean - target) <= k * standard_error; }
};

/// Sample n of a run draws its randomness from (seed, n).
struct McOptions {
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
};

struct RunningMoments {
    std::size_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }

    void merge(const RunningMoments& other) {
        if (other.count == 0) return;
        if (count == 0) {
            *this = other;
            return;
        }
        const double n = static_cast<double>(count + other.count);
        const double delta = other.mean - mean;
        mean += delta * static_cast<double>(other.count) / n;
        m2 += other.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(other.count) / n;
        count += other.count;
    }

    MonteCarloEstimate estimate() const {
        MonteCarloEstimate e;
        e.mean = mean;
        e.samples = count;
        if (count > 1) {
            const double variance = m2 / static_cast<double>(count - 1);
            e.standard_error = std::sqrt(variance / static_cast<double>(count));
        }
        return e;
    }
};

/// Samples are processed in fixed blocks whose partial moments are merged in
/// block order, so the result does not depend on the number of workers.
inline constexpr std::size_t kMonteCarloBlock = 4096;

/// Runs `body(n, out)` for n < samples; `out` has `outputs` slots per sample.
/// Returns one estimate per output slot.
template <class Body>
std::vector<MonteCarloEstimate> run_monte_carlo(std::size_t samples, std::size_t outputs, std::size_t workers,
                                                Body&& body) {
    if (outputs == 0) throw std::invalid_argument("monte carlo: no outputs");
    if (workers == 0) workers = 1;
    const std::size_t blocks = (samples + kMonteCarloBlock - 1) / kMonteCarloBlock;
    std::vector<RunningMoments> partial(blocks * outputs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        std::vector<double> out(outputs);
        try {
            for (;;) {
                const std::size_t b = next.fetch_add(1);
                if (b >= blocks) return;
                const std::size_t end = std::min(samples, (b + 1) * kMonteCarloBlock);
                for (std::size_t n = b * kMonteCarloBlock; n < end; ++n) {
                    body(n, std::span<double>(out));
                    for (std::size_t k = 0; k < outputs; ++k) partial[b * outputs + k].add(out[k]);
                }
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = blocks;
        }
    };
    workers = std::min(workers, std::max<std::size_t>(blocks, 1));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    std::vector<MonteCarloEstimate> result(outputs);
    for (std::size_t k = 0; k < outputs; ++k) {
        RunningMoments total;
        for (std::size_t b = 0; b < blocks; ++b) total.merge(partial[b * outputs + k]);
        result[k] = total.estimate();
    }
    return result;
}

}  // namespace sigmanoise
