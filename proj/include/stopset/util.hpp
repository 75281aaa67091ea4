#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace stopset {

// Log level from STOPSET_LOG (error, warn, info, debug); default warn.
namespace logging {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

inline Level level() {
    static Level cached = [] {
        const char* env = std::getenv("STOPSET_LOG");
        if (!env) return Level::warn;
        const std::string v(env);
        if (v == "error") return Level::error;
        if (v == "info") return Level::info;
        if (v == "debug") return Level::debug;
        return Level::warn;
    }();
    return cached;
}

inline void emit(Level lvl, const char* tag, const std::string& message) {
    if (lvl <= level()) std::fprintf(stderr, "[%s] %s\n", tag, message.c_str());
}

inline void error(const std::string& m) { emit(Level::error, "error", m); }
inline void warn(const std::string& m) { emit(Level::warn, "warn", m); }
inline void info(const std::string& m) { emit(Level::info, "info", m); }
inline void debug(const std::string& m) { emit(Level::debug, "debug", m); }

}  // namespace logging

// FNV-1a, used for config hashes in CSV metadata lines.
inline std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

// Index-parallel loop with deterministic work assignment; results must be
// written to per-index slots. threads = 0 picks the hardware count.
inline void parallel_for(std::size_t count, std::size_t threads,
                         const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count ? count : 1);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += threads) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace stopset
