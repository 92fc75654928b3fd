#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "syracuse/sweep.hpp"

using namespace syracuse;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "syracuse_sweep_tests";
    fs::create_directories(dir);
    const auto p = dir / name;
    fs::remove(p);
    return p;
}

SweepConfig base_config(const fs::path& cp) {
    SweepConfig c;
    c.a = 3;
    c.b = 5;
    c.N = 20000;
    c.shard_size = 1000;
    c.checkpoint_path = cp.string();
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST(ConfigHash, IgnoresWorkersAndPaths) {
    SweepConfig x, y;
    y.workers = 8;
    y.checkpoint_path = "/elsewhere";
    y.format = ReportFormat::Csv;
    EXPECT_EQ(config_hash(x), config_hash(y));
    y.N = 1001;
    EXPECT_NE(config_hash(x), config_hash(y));
    EXPECT_EQ(config_hash(x).size(), 16u);
}

TEST(Sweep, ResumeReproducesTheUninterruptedReport) {
    const auto cp = scratch("resume.jsonl");
    auto cfg = base_config(cp);
    SweepConfig plain = cfg;
    plain.checkpoint_path.clear();
    const auto reference = render(*run_sweep(plain).report, ReportFormat::Json);

    const auto partial = run_sweep(cfg, 5);
    EXPECT_FALSE(partial.complete);
    EXPECT_EQ(partial.shards_run, 5u);

    cfg.workers = 3;
    const auto resumed = run_sweep(cfg);
    ASSERT_TRUE(resumed.complete);
    EXPECT_EQ(resumed.shards_reused, 5u);
    EXPECT_EQ(resumed.shards_run, resumed.shards_total - 5);
    EXPECT_EQ(render(*resumed.report, ReportFormat::Json), reference);
}

TEST(Sweep, TornTrailingLineIsDiscarded) {
    const auto cp = scratch("torn.jsonl");
    auto cfg = base_config(cp);
    run_sweep(cfg, 4);
    {
        std::ofstream out(cp, std::ios::binary | std::ios::app);
        out << R"({"shard":{"lo":4001,"hi":)";
    }
    const auto resumed = run_sweep(cfg);
    ASSERT_TRUE(resumed.complete);
    EXPECT_EQ(resumed.shards_reused, 4u);
    // Every line of the repaired checkpoint parses.
    std::ifstream in(cp);
    std::size_t lines = 0;
    for (std::string line; std::getline(in, line); ++lines)
        EXPECT_FALSE(nlohmann::json::parse(line, nullptr, false).is_discarded()) << line;
    EXPECT_EQ(lines, 1 + resumed.shards_total);
}

TEST(Sweep, MismatchedConfigIsRefused) {
    const auto cp = scratch("mismatch.jsonl");
    auto cfg = base_config(cp);
    run_sweep(cfg, 2);
    cfg.N = 30000;
    try {
        run_sweep(cfg);
        FAIL() << "resumed under a different config";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ConfigMismatch);
    }
}

TEST(Sweep, TamperedShardCycleIsRejected) {
    const auto cp = scratch("tamper.jsonl");
    auto cfg = base_config(cp);
    run_sweep(cfg, 1);
    auto text = slurp(cp);
    const auto pos = text.find("\"elements\":[1,4,2]");
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, 18, "\"elements\":[1,4,3]");
    std::ofstream(cp, std::ios::binary | std::ios::trunc) << text;
    EXPECT_THROW(run_sweep(cfg), Error);
}

TEST(Sweep, CompleteCheckpointReusesEverything) {
    const auto cp = scratch("full.jsonl");
    auto cfg = base_config(cp);
    const auto first = run_sweep(cfg);
    const auto again = run_sweep(cfg);
    EXPECT_EQ(again.shards_run, 0u);
    EXPECT_EQ(again.shards_reused, first.shards_total);
    EXPECT_EQ(render_json(*again.report), render_json(*first.report));
}

TEST(WriteFileAtomically, ReplacesContent) {
    const auto p = scratch("report.json");
    write_file_atomically(p.string(), "one");
    write_file_atomically(p.string(), "two");
    EXPECT_EQ(slurp(p), "two");
    EXPECT_FALSE(fs::exists(p.string() + ".tmp"));
    EXPECT_THROW(write_file_atomically("/nonexistent_dir/x/report.json", "x"), Error);
}
