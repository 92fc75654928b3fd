#pragma once

// Cycle discovery and basin census over [1, N].
//
// The resolution of n is defined canonically so that it does not depend on
// traversal order or sharding: follow the orbit of n until it first drops
// below n (inherit that value's resolution), closes a cycle (Brent), or trips
// a cap. Cycles are identified by their minimum element.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "syracuse/cycle.hpp"
#include "syracuse/error.hpp"
#include "syracuse/integer.hpp"
#include "syracuse/map.hpp"

namespace syracuse {

enum class UnresolvedReason { StepCap, ValueCap, DependsOnUnresolved };

inline std::string_view to_string(UnresolvedReason r) {
    switch (r) {
    case UnresolvedReason::StepCap: return "StepCap";
    case UnresolvedReason::ValueCap: return "ValueCap";
    case UnresolvedReason::DependsOnUnresolved: return "DependsOnUnresolved";
    }
    return "?";
}

struct Resolution {
    bool converged = false;
    Integer omega;                   // when converged
    std::uint64_t steps_to_cycle = 0;  // when converged
    UnresolvedReason reason = UnresolvedReason::StepCap;

    static Resolution to_cycle(Integer omega, std::uint64_t steps) {
        return {true, std::move(omega), steps, UnresolvedReason::StepCap};
    }
    static Resolution unresolved(UnresolvedReason r) { return {false, 0, 0, r}; }
};

struct DetectResult {
    Resolution resolution;
    std::optional<Cycle> cycle;  // set when the cycle was found on this orbit
};

using ResolutionLookup = std::function<std::optional<Resolution>(const Integer&)>;

/// Elements of the cycle through `member`, by direct iteration.
inline std::vector<Integer> cycle_through(const MapParams& map, const Integer& member) {
    std::vector<Integer> out{member};
    for (Integer v = step(map, member); v != member; v = step(map, v)) out.push_back(v);
    return out;
}

/// Follows the orbit of n. A repeat within the tracked path yields the cycle;
/// with `lookup`, a value below n whose resolution is known is inherited.
inline DetectResult detect_cycle(const MapParams& map, const Integer& n, const Caps& caps = {},
                                 const ResolutionLookup& lookup = {}) {
    if (sgn(n) <= 0) throw Error(ErrorCode::BadArgument, "detect_cycle needs n >= 1");
    std::vector<Integer> path{n};
    std::unordered_map<Integer, std::size_t, IntegerHash> index{{n, 0}};
    if (n > caps.max_value) return {Resolution::unresolved(UnresolvedReason::ValueCap), std::nullopt};
    Integer v = n;
    for (std::uint64_t k = 1; k <= caps.max_steps; ++k) {
        v = step(map, v);
        if (auto it = index.find(v); it != index.end()) {
            const auto first = it->second;
            Cycle c = canonical_form(std::span<const Integer>(path).subspan(first));
            return {Resolution::to_cycle(c.omega, first), std::move(c)};
        }
        if (v > caps.max_value) return {Resolution::unresolved(UnresolvedReason::ValueCap), std::nullopt};
        if (lookup && v < n) {
            if (auto known = lookup(v)) {
                if (!known->converged)
                    return {Resolution::unresolved(UnresolvedReason::DependsOnUnresolved), std::nullopt};
                // The path may already sit on the cycle before reaching v.
                const auto members = cycle_through(map, known->omega);
                const std::unordered_set<Integer, IntegerHash> on_cycle(members.begin(), members.end());
                for (std::size_t i = 0; i < path.size(); ++i) {
                    if (on_cycle.count(path[i])) return {Resolution::to_cycle(known->omega, i), std::nullopt};
                }
                return {Resolution::to_cycle(known->omega, k + known->steps_to_cycle), std::nullopt};
            }
        }
        index.emplace(v, path.size());
        path.push_back(v);
    }
    return {Resolution::unresolved(UnresolvedReason::StepCap), std::nullopt};
}

struct UnresolvedEntry {
    std::uint64_t n;
    UnresolvedReason reason;

    friend bool operator==(const UnresolvedEntry&, const UnresolvedEntry&) = default;
};

inline constexpr std::size_t kUnresolvedSampleLimit = 100;

/// Classification of one contiguous range [lo, hi].
struct ShardSummary {
    std::uint64_t lo = 0, hi = 0;
    std::map<Integer, std::uint64_t> basin_counts;
    std::map<Integer, Cycle> cycles;
    std::uint64_t unresolved_count = 0;
    std::map<UnresolvedReason, std::uint64_t> unresolved_by_reason;
    std::vector<UnresolvedEntry> unresolved_sample;  // smallest n first
};

struct CensusReport {
    MapParams map;
    std::uint64_t N = 0;
    Caps caps;
    std::map<Integer, Cycle> cycles;  // keyed by omega
    std::map<Integer, std::uint64_t> basin_counts;
    std::uint64_t unresolved_count = 0;
    std::map<UnresolvedReason, std::uint64_t> unresolved_by_reason;
    std::vector<UnresolvedEntry> unresolved_sample;

    std::vector<Integer> omegas() const {
        std::vector<Integer> out;
        for (const auto& [w, _] : cycles) out.push_back(w);
        return out;
    }
};

/// Merges shard summaries; the result depends only on the set of shards.
inline CensusReport merge_shards(const MapParams& map, std::uint64_t N, const Caps& caps,
                                 std::vector<ShardSummary> shards) {
    std::sort(shards.begin(), shards.end(), [](const auto& x, const auto& y) { return x.lo < y.lo; });
    CensusReport r{map, N, caps, {}, {}, 0, {}, {}};
    std::uint64_t expected_lo = 1;
    for (const auto& s : shards) {
        if (s.lo != expected_lo) throw Error(ErrorCode::BadArgument, "shards do not tile [1,N]");
        expected_lo = s.hi + 1;
        for (const auto& [w, c] : s.cycles) {
            auto [it, fresh] = r.cycles.emplace(w, c);
            if (!fresh && !(it->second == c))
                throw Error(ErrorCode::RelationViolation, "two different cycles share omega " + to_string(w));
        }
        for (const auto& [w, count] : s.basin_counts) r.basin_counts[w] += count;
        r.unresolved_count += s.unresolved_count;
        for (const auto& [why, count] : s.unresolved_by_reason) r.unresolved_by_reason[why] += count;
        for (const auto& e : s.unresolved_sample) {
            if (r.unresolved_sample.size() < kUnresolvedSampleLimit) r.unresolved_sample.push_back(e);
        }
    }
    if (expected_lo != N + 1) throw Error(ErrorCode::BadArgument, "shards do not tile [1,N]");
    return r;
}

/// Shared memo over [1, N] plus the cycle registry. Safe for concurrent use:
/// memo entries are written once with values that do not depend on the writer.
class CensusEngine {
public:
    CensusEngine(MapParams map, std::uint64_t N, Caps caps)
        : map_(std::move(map)), N_(N), caps_(std::move(caps)), memo_(new std::atomic<std::int32_t>[N + 1]) {
        if (N < 1) throw Error(ErrorCode::BadArgument, "census needs N >= 1");
        for (std::uint64_t i = 0; i <= N; ++i) memo_[i].store(0, std::memory_order_relaxed);
        cap_fits_u128_ = fits_u128(caps_.max_value);
        if (cap_fits_u128_) cap128_ = to_u128(caps_.max_value);
    }

    const MapParams& map() const { return map_; }
    std::uint64_t N() const { return N_; }
    const Caps& caps() const { return caps_; }

    /// Resolution of n in [1, N] (steps_to_cycle is not tracked by the census).
    Resolution resolution(std::uint64_t n) {
        const auto code = resolve(n);
        if (code > 0) return Resolution::to_cycle(cycle_by_code(code).omega, 0);
        return Resolution::unresolved(reason_of(code));
    }

    ShardSummary run_shard(std::uint64_t lo, std::uint64_t hi) {
        ShardSummary s;
        s.lo = lo;
        s.hi = hi;
        std::map<std::int32_t, std::uint64_t> by_code;
        for (std::uint64_t n = lo; n <= hi; ++n) {
            const auto code = resolve(n);
            ++by_code[code];
            if (code < 0 && s.unresolved_sample.size() < kUnresolvedSampleLimit)
                s.unresolved_sample.push_back({n, reason_of(code)});
        }
        for (const auto& [code, count] : by_code) {
            if (code > 0) {
                const Cycle& c = cycle_by_code(code);
                s.basin_counts[c.omega] += count;
                s.cycles.emplace(c.omega, c);
            } else {
                s.unresolved_count += count;
                s.unresolved_by_reason[reason_of(code)] += count;
            }
        }
        return s;
    }

private:
    static constexpr std::int32_t kStepCap = -1;
    static constexpr std::int32_t kValueCap = -2;
    static constexpr std::int32_t kDepends = -3;

    struct WalkOutcome {
        std::int32_t code = 0;   // nonzero: final classification
        std::uint64_t drop = 0;  // otherwise: first orbit value below the start
    };

    struct BigState {
        Integer hare, tortoise;
        std::uint64_t k = 0, power = 1, lam = 0;
    };

    static UnresolvedReason reason_of(std::int32_t code) {
        if (code == kStepCap) return UnresolvedReason::StepCap;
        if (code == kValueCap) return UnresolvedReason::ValueCap;
        return UnresolvedReason::DependsOnUnresolved;
    }

    const Cycle& cycle_by_code(std::int32_t code) {
        std::lock_guard lock(registry_mutex_);
        return *cycles_[static_cast<std::size_t>(code - 1)];
    }

    std::int32_t register_cycle(const Integer& member) {
        Cycle c = canonicalize(map_, cycle_through(map_, member));
        std::lock_guard lock(registry_mutex_);
        auto [it, fresh] = cycle_ids_.emplace(c.omega, static_cast<std::int32_t>(cycles_.size() + 1));
        if (fresh) cycles_.push_back(std::make_unique<Cycle>(std::move(c)));
        return it->second;
    }

    std::int32_t resolve(std::uint64_t n) {
        if (auto code = memo_[n].load(std::memory_order_acquire)) return code;
        std::vector<std::pair<std::uint64_t, std::uint64_t>> stack{{n, 0}};
        while (!stack.empty()) {
            const auto [m, target] = stack.back();
            if (memo_[m].load(std::memory_order_acquire) != 0) {
                stack.pop_back();
                continue;
            }
            std::uint64_t drop = target;
            if (drop == 0) {
                const WalkOutcome w = walk(m);
                if (w.code != 0) {
                    memo_[m].store(w.code, std::memory_order_release);
                    stack.pop_back();
                    continue;
                }
                drop = w.drop;
                stack.back().second = drop;
            }
            const auto below = memo_[drop].load(std::memory_order_acquire);
            if (below == 0) {
                stack.emplace_back(drop, 0);
                continue;
            }
            memo_[m].store(below > 0 ? below : kDepends, std::memory_order_release);
            stack.pop_back();
        }
        return memo_[n].load(std::memory_order_acquire);
    }

    WalkOutcome walk(std::uint64_t m) {
        if (!cap_fits_u128_ || static_cast<u128>(m) <= cap128_) {
            if (map_.small()) return walk_fast(m);
            BigState st{Integer(static_cast<unsigned long>(m)), Integer(static_cast<unsigned long>(m))};
            return walk_big(m, std::move(st));
        }
        return {kValueCap, 0};
    }

    WalkOutcome walk_fast(std::uint64_t m) {
        const u128 a = static_cast<u128>(map_.a64());
        const bool b_negative = map_.b64() < 0;
        const u128 b_abs = static_cast<u128>(b_negative ? -map_.b64() : map_.b64());
        const u128 limit = (~static_cast<u128>(0) - (b_negative ? 0 : b_abs)) / a;
        const std::uint64_t max_steps = caps_.max_steps;
        u128 hare = m, tortoise = m;
        std::uint64_t k = 0, power = 1, lam = 0;
        for (;;) {
            if (k >= max_steps) return {kStepCap, 0};
            if (hare & 1) {
                if (hare > limit) {
                    return walk_big(m, BigState{from_u128(hare), from_u128(tortoise), k, power, lam});
                }
                const u128 t = a * hare;
                hare = (b_negative ? t - b_abs : t + b_abs) >> 1;
            } else {
                hare >>= 1;
            }
            ++k;
            ++lam;
            if (cap_fits_u128_ && hare > cap128_) return {kValueCap, 0};
            if (hare < m) return {0, static_cast<std::uint64_t>(hare)};
            if (hare == tortoise) return {register_cycle(from_u128(hare)), 0};
            if (lam == power) {
                tortoise = hare;
                power <<= 1;
                lam = 0;
            }
        }
    }

    WalkOutcome walk_big(std::uint64_t m, BigState st) {
        const Integer start(static_cast<unsigned long>(m));
        for (;;) {
            if (st.k >= caps_.max_steps) return {kStepCap, 0};
            st.hare = step(map_, st.hare);
            ++st.k;
            ++st.lam;
            if (st.hare > caps_.max_value) return {kValueCap, 0};
            if (st.hare < start) return {0, st.hare.get_ui()};
            if (st.hare == st.tortoise) return {register_cycle(st.hare), 0};
            if (st.lam == st.power) {
                st.tortoise = st.hare;
                st.power <<= 1;
                st.lam = 0;
            }
        }
    }

    MapParams map_;
    std::uint64_t N_;
    Caps caps_;
    std::unique_ptr<std::atomic<std::int32_t>[]> memo_;
    bool cap_fits_u128_ = false;
    u128 cap128_ = 0;
    std::mutex registry_mutex_;
    std::map<Integer, std::int32_t> cycle_ids_;
    std::vector<std::unique_ptr<Cycle>> cycles_;
};

struct CensusOptions {
    unsigned workers = 1;
    std::uint64_t shard_size = 1u << 16;
};

/// Shard boundaries [lo, hi] tiling [1, N].
inline std::vector<std::pair<std::uint64_t, std::uint64_t>> shard_ranges(std::uint64_t N, std::uint64_t shard_size) {
    if (shard_size < 1) throw Error(ErrorCode::BadArgument, "shard_size must be >= 1");
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    for (std::uint64_t lo = 1; lo <= N; lo += shard_size) out.emplace_back(lo, std::min(N, lo + shard_size - 1));
    return out;
}

/// Runs the listed shards on a pool of workers, in ascending shard order of
/// pickup; `on_done` is called under a lock as each shard completes.
inline void run_shards(CensusEngine& engine, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& ranges,
                       unsigned workers, const std::function<void(ShardSummary&&)>& on_done) {
    std::atomic<std::size_t> next{0};
    std::mutex done_mutex;
    std::exception_ptr failure;
    auto work = [&] {
        try {
            for (std::size_t i = next++; i < ranges.size(); i = next++) {
                ShardSummary s = engine.run_shard(ranges[i].first, ranges[i].second);
                std::lock_guard lock(done_mutex);
                on_done(std::move(s));
            }
        } catch (...) {
            std::lock_guard lock(done_mutex);
            if (!failure) failure = std::current_exception();
            next = ranges.size();
        }
    };
    const unsigned n_threads = std::max(1u, workers);
    if (n_threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
}

inline CensusReport census(const MapParams& map, std::uint64_t N, const Caps& caps = {},
                           const CensusOptions& options = {}) {
    CensusEngine engine(map, N, caps);
    std::vector<ShardSummary> shards;
    run_shards(engine, shard_ranges(N, options.shard_size), options.workers,
               [&](ShardSummary&& s) { shards.push_back(std::move(s)); });
    return merge_shards(map, N, caps, std::move(shards));
}

// ---- serialization ----

inline nlohmann::json integer_json(const Integer& v) {
    if (v.fits_slong_p()) return v.get_si();
    return to_string(v);
}

inline Integer integer_from_json(const nlohmann::json& j) {
    if (j.is_string()) return parse_integer(j.get<std::string>());
    if (j.is_number_unsigned()) return Integer(std::to_string(j.get<std::uint64_t>()));
    if (j.is_number_integer()) return Integer(std::to_string(j.get<std::int64_t>()));
    throw Error(ErrorCode::BadArgument, "expected an integer in JSON");
}

inline nlohmann::json to_json(const Cycle& c) {
    nlohmann::json elements = nlohmann::json::array();
    for (const auto& v : c.elements) elements.push_back(integer_json(v));
    return {{"omega", integer_json(c.omega)},
            {"length", c.length()},
            {"K", c.K},
            {"L", c.L},
            {"min_odd", integer_json(c.min_odd)},
            {"max", integer_json(c.max)},
            {"elements", elements}};
}

inline Cycle cycle_from_json(const nlohmann::json& j) {
    std::vector<Integer> elements;
    for (const auto& e : j.at("elements")) elements.push_back(integer_from_json(e));
    return canonical_form(elements);
}

inline nlohmann::json caps_json(const Caps& caps) {
    return {{"max_steps", caps.max_steps}, {"max_value", to_string(caps.max_value)}};
}

inline nlohmann::json unresolved_json(const std::vector<UnresolvedEntry>& sample) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : sample) out.push_back({{"n", e.n}, {"reason", std::string(to_string(e.reason))}});
    return out;
}

inline nlohmann::json to_json(const CensusReport& r) {
    nlohmann::json cycles = nlohmann::json::array();
    for (const auto& [_, c] : r.cycles) cycles.push_back(to_json(c));
    nlohmann::json basins = nlohmann::json::object();
    for (const auto& [w, count] : r.basin_counts) basins[to_string(w)] = count;
    nlohmann::json reasons = nlohmann::json::object();
    for (const auto& [why, count] : r.unresolved_by_reason) reasons[std::string(to_string(why))] = count;
    return {{"map", {{"a", integer_json(r.map.a())}, {"b", integer_json(r.map.b())}}},
            {"N", r.N},
            {"caps", caps_json(r.caps)},
            {"cycles", cycles},
            {"basin_counts", basins},
            {"unresolved_count", r.unresolved_count},
            {"unresolved_by_reason", reasons},
            {"unresolved_sample", unresolved_json(r.unresolved_sample)}};
}

inline std::string render_json(const CensusReport& r) { return to_json(r).dump(2) + "\n"; }

/// CSV summary with fixed columns omega,length,K,L,basin_count.
inline std::string render_csv(const CensusReport& r) {
    std::ostringstream out;
    out << "omega,length,K,L,basin_count\n";
    for (const auto& [w, c] : r.cycles) {
        const auto it = r.basin_counts.find(w);
        out << to_string(w) << ',' << c.length() << ',' << c.K << ',' << c.L << ','
            << (it == r.basin_counts.end() ? 0 : it->second) << '\n';
    }
    return out.str();
}

} // namespace syracuse
