#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "cdxsem/io.hpp"

namespace cdxsem::parallel {

struct LineChunk {
    std::uint64_t index = 0;
    std::vector<std::string> lines;
};

// Feeds line chunks from the inputs through `map` on `workers` threads and
// hands results to `emit` in input order on the calling thread. With
// workers <= 1 everything runs inline, no threads. The number of chunks in
// flight (queued, computing, or awaiting emission) is capped, so memory
// stays bounded regardless of input size.
//
// MapFn:  Result(LineChunk&&)   (must be thread-safe across chunks)
// EmitFn: void(Result&&)        (called in chunk order, single-threaded)
template <typename Result, typename MapFn, typename EmitFn>
void run_chunked(const std::vector<std::string>& inputs, int workers, std::size_t chunk_lines, MapFn map,
                 EmitFn emit) {
    if (chunk_lines == 0)
        chunk_lines = 1;

    if (workers <= 1) {
        std::uint64_t index = 0;
        LineChunk chunk;
        auto flush = [&] {
            if (chunk.lines.empty())
                return;
            chunk.index = index++;
            emit(map(std::move(chunk)));
            chunk = LineChunk{};
        };
        for (const auto& input : inputs) {
            io::LineReader reader(input);
            std::string_view line;
            while (reader.next(line)) {
                chunk.lines.emplace_back(line);
                if (chunk.lines.size() >= chunk_lines)
                    flush();
            }
        }
        flush();
        return;
    }

    struct Shared {
        std::mutex mutex;
        std::condition_variable cv_work;   // workers: queue or shutdown
        std::condition_variable cv_result; // collector: a result landed
        std::deque<LineChunk> queue;
        std::map<std::uint64_t, Result> done;
        std::uint64_t produced = 0;
        std::uint64_t next_emit = 0;
        bool exhausted = false;
        std::exception_ptr error;
    } shared;
    const std::size_t max_in_flight = static_cast<std::size_t>(workers) * 4;

    auto worker_loop = [&shared, &map] {
        while (true) {
            LineChunk chunk;
            {
                std::unique_lock lock(shared.mutex);
                shared.cv_work.wait(lock, [&] {
                    return !shared.queue.empty() || shared.exhausted || shared.error;
                });
                if (shared.error || shared.queue.empty())
                    return;
                chunk = std::move(shared.queue.front());
                shared.queue.pop_front();
            }
            const std::uint64_t chunk_index = chunk.index;
            try {
                Result result = map(std::move(chunk));
                {
                    std::lock_guard lock(shared.mutex);
                    shared.done.emplace(chunk_index, std::move(result));
                }
                shared.cv_result.notify_one();
            } catch (...) {
                {
                    std::lock_guard lock(shared.mutex);
                    if (!shared.error)
                        shared.error = std::current_exception();
                }
                shared.cv_result.notify_all();
                shared.cv_work.notify_all();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i)
        pool.emplace_back(worker_loop);

    auto shutdown = [&] {
        {
            std::lock_guard lock(shared.mutex);
            shared.exhausted = true;
        }
        shared.cv_work.notify_all();
        for (auto& t : pool)
            t.join();
    };

    // Emits every consecutive completed chunk; never blocks.
    auto drain_ready = [&] {
        while (true) {
            Result ready;
            {
                std::lock_guard lock(shared.mutex);
                const auto it = shared.done.find(shared.next_emit);
                if (it == shared.done.end())
                    return;
                ready = std::move(it->second);
                shared.done.erase(it);
                ++shared.next_emit;
            }
            emit(std::move(ready));
        }
    };

    try {
        LineChunk chunk;
        auto push = [&] {
            if (chunk.lines.empty())
                return;
            drain_ready();
            while (true) {
                std::unique_lock lock(shared.mutex);
                if (shared.error)
                    std::rethrow_exception(shared.error);
                if (shared.produced - shared.next_emit < max_in_flight) {
                    chunk.index = shared.produced++;
                    shared.queue.push_back(std::move(chunk));
                    break;
                }
                shared.cv_result.wait(lock, [&] {
                    return shared.error || shared.done.contains(shared.next_emit);
                });
                lock.unlock();
                drain_ready();
            }
            shared.cv_work.notify_one();
            chunk = LineChunk{};
        };

        for (const auto& input : inputs) {
            io::LineReader reader(input);
            std::string_view line;
            while (reader.next(line)) {
                chunk.lines.emplace_back(line);
                if (chunk.lines.size() >= chunk_lines)
                    push();
            }
        }
        push();

        {
            std::lock_guard lock(shared.mutex);
            shared.exhausted = true;
        }
        shared.cv_work.notify_all();

        while (true) {
            {
                std::unique_lock lock(shared.mutex);
                if (shared.error)
                    std::rethrow_exception(shared.error);
                if (shared.next_emit >= shared.produced)
                    break;
                shared.cv_result.wait(lock, [&] {
                    return shared.error || shared.done.contains(shared.next_emit);
                });
                if (shared.error)
                    std::rethrow_exception(shared.error);
            }
            drain_ready();
        }
    } catch (...) {
        {
            std::lock_guard lock(shared.mutex);
            if (!shared.error)
                shared.error = std::current_exception();
        }
        shutdown();
        throw;
    }
    shutdown();
}

} // namespace cdxsem::parallel
