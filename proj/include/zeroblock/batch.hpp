#pragma once

#include "zeroblock/simnet.hpp"

#include <exception>
#include <optional>
#include <type_traits>
#include <vector>

namespace zeroblock {

/**
 * Runs `fn(config, rep)` for rep = 0..reps-1 with config.seed = base.seed + rep.
 * Repetitions are distributed over OpenMP threads; results come back in rep
 * order and do not depend on the thread count.
 */
template <class Fn>
auto run_batch(const SimConfig& base, std::size_t reps, Fn fn)
    -> std::vector<std::invoke_result_t<Fn, const SimConfig&, std::size_t>>
{
    using R = std::invoke_result_t<Fn, const SimConfig&, std::size_t>;
    std::vector<std::optional<R>> slots(reps);
    std::vector<std::exception_ptr> errors(reps);
    const auto n = static_cast<std::int64_t>(reps);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            SimConfig cfg = base;
            cfg.seed = base.seed + static_cast<std::uint64_t>(i);
            slots[static_cast<std::size_t>(i)].emplace(fn(static_cast<const SimConfig&>(cfg), static_cast<std::size_t>(i)));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<R> out;
    out.reserve(reps);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

//! Sequential reference for run_batch.
template <class Fn>
auto run_batch_serial(const SimConfig& base, std::size_t reps, Fn fn)
    -> std::vector<std::invoke_result_t<Fn, const SimConfig&, std::size_t>>
{
    std::vector<std::invoke_result_t<Fn, const SimConfig&, std::size_t>> out;
    out.reserve(reps);
    for (std::size_t i = 0; i < reps; ++i) {
        SimConfig cfg = base;
        cfg.seed = base.seed + i;
        out.push_back(fn(static_cast<const SimConfig&>(cfg), i));
    }
    return out;
}

} // namespace zeroblock
