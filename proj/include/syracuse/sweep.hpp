#pragma once

// Checkpointed census runs. The checkpoint is a JSON-lines file: one header
// line carrying the config hash, then one line per completed shard. Lines are
// only ever appended; a torn trailing line is ignored on resume and its shard
// runs again.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "syracuse/census.hpp"
#include "syracuse/error.hpp"
#include "syracuse/integer.hpp"
#include "syracuse/map.hpp"

namespace syracuse {

enum class ReportFormat { Json, Csv };

struct SweepConfig {
    Integer a = 3, b = 1;
    std::uint64_t N = 1000;
    Caps caps;
    std::uint64_t shard_size = 1u << 16;
    unsigned workers = 1;
    std::string checkpoint_path;  // empty: no checkpointing
    ReportFormat format = ReportFormat::Json;
};

/// Everything that determines the report; worker count and paths do not.
inline std::string canonical_config(const SweepConfig& c) {
    return "a=" + to_string(c.a) + ";b=" + to_string(c.b) + ";N=" + std::to_string(c.N) +
           ";max_steps=" + std::to_string(c.caps.max_steps) + ";max_value=" + to_string(c.caps.max_value) +
           ";shard_size=" + std::to_string(c.shard_size);
}

/// FNV-1a 64 of the canonical config, as 16 hex digits.
inline std::string config_hash(const SweepConfig& c) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : canonical_config(c)) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline nlohmann::json shard_json(const ShardSummary& s) {
    nlohmann::json basins = nlohmann::json::array();
    for (const auto& [w, count] : s.basin_counts) basins.push_back({integer_json(w), count});
    nlohmann::json cycles = nlohmann::json::array();
    for (const auto& [_, c] : s.cycles) cycles.push_back(to_json(c));
    nlohmann::json reasons = nlohmann::json::object();
    for (const auto& [why, count] : s.unresolved_by_reason) reasons[std::string(to_string(why))] = count;
    return {{"lo", s.lo},
            {"hi", s.hi},
            {"basin_counts", basins},
            {"cycles", cycles},
            {"unresolved_count", s.unresolved_count},
            {"unresolved_by_reason", reasons},
            {"unresolved_sample", unresolved_json(s.unresolved_sample)}};
}

inline UnresolvedReason reason_from_string(const std::string& s) {
    for (auto r : {UnresolvedReason::StepCap, UnresolvedReason::ValueCap, UnresolvedReason::DependsOnUnresolved})
        if (s == to_string(r)) return r;
    throw Error(ErrorCode::BadArgument, "unknown unresolved reason " + s);
}

inline ShardSummary shard_from_json(const MapParams& map, const nlohmann::json& j) {
    ShardSummary s;
    s.lo = j.at("lo").get<std::uint64_t>();
    s.hi = j.at("hi").get<std::uint64_t>();
    for (const auto& pair : j.at("basin_counts"))
        s.basin_counts[integer_from_json(pair.at(0))] = pair.at(1).get<std::uint64_t>();
    for (const auto& cj : j.at("cycles")) {
        std::vector<Integer> elements;
        for (const auto& e : cj.at("elements")) elements.push_back(integer_from_json(e));
        Cycle c = canonicalize(map, elements);
        s.cycles.emplace(c.omega, std::move(c));
    }
    s.unresolved_count = j.at("unresolved_count").get<std::uint64_t>();
    for (const auto& [why, count] : j.at("unresolved_by_reason").items())
        s.unresolved_by_reason[reason_from_string(why)] = count.get<std::uint64_t>();
    for (const auto& e : j.at("unresolved_sample"))
        s.unresolved_sample.push_back({e.at("n").get<std::uint64_t>(), reason_from_string(e.at("reason"))});
    return s;
}

struct Checkpoint {
    std::string config_hash;
    std::vector<ShardSummary> shards;
};

/// Reads a checkpoint; nullopt if the file does not exist. A header whose
/// hash differs from `expected_hash` raises ConfigMismatch.
inline std::optional<Checkpoint> load_checkpoint(const std::string& path, const MapParams& map,
                                                 const std::string& expected_hash) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    Checkpoint cp;
    std::set<std::uint64_t> seen;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        if (nl == std::string::npos) break;  // torn trailing line
        const std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        const auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) continue;
        if (header) {
            cp.config_hash = j.value("config_hash", "");
            if (cp.config_hash != expected_hash)
                throw Error(ErrorCode::ConfigMismatch,
                            "checkpoint " + path + " was written for config " + cp.config_hash + ", not " + expected_hash);
            header = false;
            continue;
        }
        auto shard = shard_from_json(map, j.at("shard"));
        if (seen.insert(shard.lo).second) cp.shards.push_back(std::move(shard));
    }
    if (header) return std::nullopt;  // no complete header line: start over
    return cp;
}

struct SweepOutcome {
    bool complete = false;
    std::size_t shards_total = 0;
    std::size_t shards_reused = 0;
    std::size_t shards_run = 0;
    std::optional<CensusReport> report;
};

/// Runs (or resumes) a census. `max_new_shards` stops after that many freshly
/// computed shards, which is how tests simulate a kill.
inline SweepOutcome run_sweep(const SweepConfig& cfg,
                              std::size_t max_new_shards = std::numeric_limits<std::size_t>::max()) {
    const MapParams map = new_map(cfg.a, cfg.b);
    if (cfg.shard_size < 1) throw Error(ErrorCode::BadArgument, "shard_size must be >= 1");
    const auto ranges = shard_ranges(cfg.N, cfg.shard_size);
    const std::string hash = config_hash(cfg);

    SweepOutcome out;
    out.shards_total = ranges.size();
    std::vector<ShardSummary> done;
    std::ofstream log;
    if (!cfg.checkpoint_path.empty()) {
        auto cp = load_checkpoint(cfg.checkpoint_path, map, hash);
        if (cp) {
            done = std::move(cp->shards);
            // Drop any torn tail so new records start on a fresh line.
            std::ifstream in(cfg.checkpoint_path, std::ios::binary);
            std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            in.close();
            const auto last_nl = text.rfind('\n');
            std::filesystem::resize_file(cfg.checkpoint_path, last_nl == std::string::npos ? 0 : last_nl + 1);
            log.open(cfg.checkpoint_path, std::ios::binary | std::ios::app);
        } else {
            log.open(cfg.checkpoint_path, std::ios::binary | std::ios::trunc);
            if (log) log << nlohmann::json{{"config", canonical_config(cfg)}, {"config_hash", hash}}.dump() << '\n';
        }
        if (!log) throw Error(ErrorCode::Io, "cannot write checkpoint " + cfg.checkpoint_path);
        log.flush();
    }
    out.shards_reused = done.size();

    std::set<std::uint64_t> finished;
    for (const auto& s : done) finished.insert(s.lo);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pending;
    for (const auto& r : ranges)
        if (!finished.count(r.first)) pending.push_back(r);
    const bool truncated = pending.size() > max_new_shards;
    if (truncated) pending.resize(max_new_shards);

    CensusEngine engine(map, cfg.N, cfg.caps);
    run_shards(engine, pending, cfg.workers, [&](ShardSummary&& s) {
        if (log.is_open()) {
            log << nlohmann::json{{"shard", shard_json(s)}}.dump() << '\n';
            log.flush();
            if (!log) throw Error(ErrorCode::Io, "checkpoint write failed");
        }
        done.push_back(std::move(s));
        ++out.shards_run;
    });
    if (truncated) return out;
    out.complete = true;
    out.report = merge_shards(map, cfg.N, cfg.caps, std::move(done));
    return out;
}

inline std::string render(const CensusReport& r, ReportFormat f) {
    return f == ReportFormat::Json ? render_json(r) : render_csv(r);
}

/// Writes via a temporary file and a rename so a reader never sees a partial report.
inline void write_file_atomically(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot open " + tmp);
        out << content;
        out.flush();
        if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot rename " + tmp + " to " + path + ": " + ec.message());
}

} // namespace syracuse
