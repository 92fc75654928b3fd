#include <gtest/gtest.h>

#include "syracuse/acceptance.hpp"

using namespace syracuse;

TEST(Oracle, PartialQuotientsAgreeWithLibrary) {
    for (long a : {3, 11, 13, 21, 63}) EXPECT_EQ(oracle::partial_quotients(a, 20), partial_quotients(a, 20)) << a;
}

TEST(Acceptance, GroupFilterSelectsCriteria) {
    AcceptanceOptions opt;
    opt.groups = {"diophantine", "families"};
    std::vector<int> seen;
    const auto results = run_acceptance(opt, [&](const CriterionResult& r) { seen.push_back(r.id); });
    EXPECT_EQ(seen, (std::vector<int>{5, 11, 12}));
    for (const auto& r : results) {
        EXPECT_TRUE(r.pass) << format_line(r);
        EXPECT_EQ(format_line(r).rfind("PASS  ", 0), 0u);
    }
}

TEST(Acceptance, TamperedTableNamesTheFailingCriterion) {
    AcceptanceOptions opt;
    opt.tables = conjecture_tables();
    for (auto& t : opt.tables)
        if (t.name == "(3,5)") t.cycles.pop_back();  // drop Omega(347)
    opt.groups = {"oscillations"};
    auto results = run_acceptance(opt);
    for (const auto& r : results) EXPECT_TRUE(r.pass) << format_line(r);

    // The census criterion compares against the table and must flag the missing entry.
    opt.groups = {"census"};
    results = run_acceptance(opt);
    bool flagged = false;
    for (const auto& r : results) {
        if (r.id == 3) {
            EXPECT_FALSE(r.pass);
            EXPECT_NE(r.detail.find("Omega(347)"), std::string::npos) << r.detail;
            EXPECT_EQ(format_line(r).rfind("FAIL  3 census_3_5", 0), 0u) << format_line(r);
            flagged = true;
        }
    }
    EXPECT_TRUE(flagged);
}

TEST(Acceptance, CorruptTableEntryFailsVerification) {
    AcceptanceOptions opt;
    opt.tables = conjecture_tables();
    for (auto& t : opt.tables)
        if (t.name == "(5,3)") t.cycles[2].elements[1] = 101;
    opt.groups = {"bounds"};
    const auto results = run_acceptance(opt);
    bool flagged = false;
    for (const auto& r : results)
        if (r.id == 9) {
            EXPECT_FALSE(r.pass);
            flagged = true;
        }
    EXPECT_TRUE(flagged);
}
