#pragma once

// The four power-of-two parameter families, the A_nu integrality lemma, the
// Omega(b) existence question and the expansion-factor witness, plus the
// enumerated cycle tables used as fixtures.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "syracuse/census.hpp"
#include "syracuse/cycle.hpp"
#include "syracuse/error.hpp"
#include "syracuse/integer.hpp"
#include "syracuse/map.hpp"

namespace syracuse {

enum class FamilyKind { PlusPlus, MinusPlus, PlusMinus, MinusOne };

inline std::string_view to_string(FamilyKind k) {
    switch (k) {
        case FamilyKind::PlusPlus: return "PlusPlus";
        case FamilyKind::MinusPlus: return "MinusPlus";
        case FamilyKind::PlusMinus: return "PlusMinus";
        case FamilyKind::MinusOne: return "MinusOne";
    }
    return "?";
}

inline FamilyKind family_from_string(std::string_view s) {
    for (auto k : {FamilyKind::PlusPlus, FamilyKind::MinusPlus, FamilyKind::PlusMinus, FamilyKind::MinusOne})
        if (s == to_string(k)) return k;
    throw Error(ErrorCode::BadArgument, "unknown family '" + std::string(s) + "'");
}

inline unsigned min_nu(FamilyKind k) { return k == FamilyKind::MinusOne ? 2 : 1; }

/// PlusPlus (2^v+1, 2^v-1), MinusPlus (2^v-1, 2^v+1), PlusMinus (2^v+1, 1-2^v), MinusOne (2^v-1, 1).
inline MapParams family_map(FamilyKind kind, unsigned nu) {
    if (nu < min_nu(kind) || nu > 4096)
        throw Error(ErrorCode::BadNu, "nu = " + std::to_string(nu) + " out of range for " + std::string(to_string(kind)));
    const Integer p = pow2(nu);
    switch (kind) {
        case FamilyKind::PlusPlus: return new_map(p + 1, p - 1);
        case FamilyKind::MinusPlus: return new_map(p - 1, p + 1);
        case FamilyKind::PlusMinus: return new_map(p + 1, 1 - p);
        case FamilyKind::MinusOne: return new_map(p - 1, Integer(1));
    }
    throw Error(ErrorCode::BadNu, "unknown family");
}

/// (a^nu - 1)/b for the PlusPlus family; A_nu = log2 of it.
struct ANu {
    unsigned nu = 0;
    Integer numerator;    // a^nu - 1
    Integer denominator;  // b
    bool is_integer = false;
    std::optional<unsigned long> A;
    std::optional<bool> bracketed;  // nu(nu-1) < A_nu < nu(nu-1)+1, for nu >= 3
};

inline ANu a_nu(unsigned nu) {
    const MapParams map = family_map(FamilyKind::PlusPlus, nu);
    ANu r;
    r.nu = nu;
    r.numerator = ipow(map.a(), nu) - 1;
    r.denominator = map.b();
    if (mpz_divisible_p(r.numerator.get_mpz_t(), r.denominator.get_mpz_t()) != 0) {
        if (auto e = exact_log2(Integer(r.numerator / r.denominator))) {
            r.is_integer = true;
            r.A = *e;
        }
    }
    if (nu >= 3) {
        const unsigned long base = static_cast<unsigned long>(nu) * (nu - 1);
        r.bracketed = pow2(base) * r.denominator < r.numerator && r.numerator < pow2(base + 1) * r.denominator;
    }
    return r;
}

struct OmegaBResult {
    unsigned nu = 0;
    bool exists = false;
    std::optional<Cycle> cycle;
};

/// b -> a 2^(nu-1) - 1 -> ... -> a^nu - 1 = 2^A b -> ... -> 2b, when A_nu is an integer.
inline OmegaBResult omega_b_cycle_exists(unsigned nu) {
    const MapParams map = family_map(FamilyKind::PlusPlus, nu);
    const ANu info = a_nu(nu);
    OmegaBResult r;
    r.nu = nu;
    if (!info.is_integer) return r;
    std::vector<Integer> elements;
    for (unsigned j = 0; j <= nu; ++j) elements.push_back(ipow(map.a(), j) * pow2(nu - j) - 1);
    for (unsigned long e = *info.A - 1; e >= 1; --e) elements.push_back(pow2(e) * map.b());
    if (!verify_cycle(map, elements))
        throw Error(ErrorCode::RelationViolation, "constructed Omega(b) is not a cycle for nu = " + std::to_string(nu));
    r.exists = true;
    r.cycle = canonical_form(elements);
    return r;
}

struct ExpansionWitness {
    unsigned nu = 0;
    unsigned k = 0;
    Integer n;          // 2^k - 1
    Integer peak;       // T^(k-1)(n) = 2 a^(k-1) - 1
    bool identities_hold = false;
    bool ratio_exceeds = false;  // peak / n > (a/2)^(k-1)
};

/// n_k = 2^k - 1 satisfies T^(j)(n_k) = a^j 2^(k-j) - 1 for j < k.
inline ExpansionWitness expansion_witness(unsigned nu, unsigned k) {
    if (k < 2) throw Error(ErrorCode::BadArgument, "expansion witness needs k >= 2");
    const MapParams map = family_map(FamilyKind::PlusPlus, nu);
    ExpansionWitness w;
    w.nu = nu;
    w.k = k;
    w.n = pow2(k) - 1;
    w.identities_hold = true;
    Integer v = w.n;
    for (unsigned j = 0; j < k; ++j) {
        if (v != ipow(map.a(), j) * pow2(k - j) - 1) w.identities_hold = false;
        if (j + 1 < k) v = step(map, v);
    }
    w.peak = v;
    Rational bound = 1;
    for (unsigned j = 0; j + 1 < k; ++j) bound *= ratio(map.a(), 2);
    w.ratio_exceeds = ratio(w.peak, w.n) > bound;
    return w;
}

struct ExpansionFactor {
    bool resolved = false;
    Rational value;          // max over the orbit / n, when resolved
    Integer running_max;
    std::optional<CapKind> cap;
};

inline ExpansionFactor expansion_factor(const MapParams& map, const Integer& n, const Caps& caps = {}) {
    const Trajectory t = trajectory(map, n, caps);
    ExpansionFactor f;
    f.running_max = n;
    for (const auto& v : t.steps)
        if (v > f.running_max) f.running_max = v;
    if (t.entered_cycle()) {
        f.resolved = true;
        f.value = ratio(f.running_max, n);
    } else {
        f.cap = std::get<CapExceeded>(t.terminal).kind;
    }
    return f;
}

struct ExpectedCycle {
    Integer omega;
    std::size_t length = 0;
    std::vector<Integer> elements;  // in orbit order, starting at omega
};

struct ExpectedCycleTable {
    std::string name;
    Integer a, b;
    std::vector<ExpectedCycle> cycles;
    bool exact = false;  // the enumerated set is claimed complete with G(infinity) empty
};

namespace detail {

inline ExpectedCycle expected(std::initializer_list<long> values) {
    ExpectedCycle c;
    for (long v : values) c.elements.emplace_back(v);
    c.omega = c.elements.front();
    c.length = c.elements.size();
    return c;
}

inline ExpectedCycle expected_power(const Integer& omega, unsigned length) {
    const auto spec = power_cycle(omega, length);
    return {spec.omega, spec.length, spec.elements};
}

} // namespace detail

/// Trivial cycles each family is stated to contain, built from the family formulas.
inline ExpectedCycleTable family_schema(FamilyKind kind, unsigned nu) {
    const MapParams map = family_map(kind, nu);
    ExpectedCycleTable t;
    t.name = std::string(to_string(kind)) + " nu=" + std::to_string(nu);
    t.a = map.a();
    t.b = map.b();
    auto add = [&](const Integer& omega, unsigned length) {
        for (const auto& c : t.cycles)
            if (c.omega == omega) return;
        t.cycles.push_back(detail::expected_power(omega, length));
    };
    switch (kind) {
        case FamilyKind::PlusPlus: add(1, nu + 1); break;
        case FamilyKind::MinusPlus: add(1, nu + 1); add(map.b(), nu); break;
        case FamilyKind::PlusMinus: add(1, 1); add(-map.b(), nu); break;
        case FamilyKind::MinusOne: add(1, nu); break;
    }
    return t;
}

inline void verify_table(const ExpectedCycleTable& t) {
    const MapParams map = new_map(t.a, t.b);
    for (const auto& c : t.cycles) {
        if (c.elements.empty() || c.elements.front() != c.omega || c.elements.size() != c.length ||
            !verify_cycle(map, c.elements))
            throw Error(ErrorCode::NotACycle, t.name + ": Omega(" + to_string(c.omega) + ") does not verify");
    }
}

inline std::vector<ExpectedCycleTable> build_conjecture_tables() {
    using detail::expected;
    std::vector<ExpectedCycleTable> out;
    out.push_back({"(5,3)", 5, 3,
                   {expected({1, 4, 2}), expected({3, 9, 24, 12, 6}), expected({39, 99, 249, 624, 312, 156, 78}),
                    expected({43, 109, 274, 137, 344, 172, 86}), expected({51, 129, 324, 162, 81, 204, 102}),
                    expected({53, 134, 67, 169, 424, 212, 106}), expected({61, 154, 77, 194, 97, 244, 122})},
                   false});
    out.push_back({"(3,5)", 3, 5,
                   {expected({1, 4, 2}), expected({5, 10}), expected({19, 31, 49, 76, 38}),
                    expected({23, 37, 58, 29, 46}),
                    expected({187, 283, 427, 643, 967, 1453, 2182, 1091, 1639, 2461, 3694, 1847, 2773, 4162,
                              2081, 3124, 1562, 781, 1174, 587, 883, 1327, 1993, 2992, 1496, 748, 374}),
                    expected({347, 523, 787, 1183, 1777, 2668, 1334, 667, 1003, 1507, 2263, 3397, 5098, 2549,
                              3826, 1913, 2872, 1436, 718, 359, 541, 814, 407, 613, 922, 461, 694})},
                   true});
    out.push_back({"(3,-1)", 3, -1,
                   {expected({1}), expected({5, 7, 10}),
                    expected({17, 25, 37, 55, 82, 41, 61, 91, 136, 68, 34})},
                   true});
    out.push_back({"(7,9)", 7, 9, {expected({1, 8, 4, 2}), expected({9, 36, 18})}, false});
    out.push_back({"(9,-7)", 9, -7, {expected({1}), expected({7, 28, 14})}, false});
    for (auto kind : {FamilyKind::PlusPlus, FamilyKind::MinusPlus, FamilyKind::PlusMinus, FamilyKind::MinusOne})
        for (unsigned nu = min_nu(kind); nu <= 4; ++nu) out.push_back(family_schema(kind, nu));
    for (const auto& t : out) verify_table(t);
    return out;
}

/// Enumerated cycle data for (5,3), (3,5), (3,-1), (7,9), (9,-7) and the
/// family trivial-cycle schemas for nu <= 4; verified once at first use.
inline const std::vector<ExpectedCycleTable>& conjecture_tables() {
    static const std::vector<ExpectedCycleTable> tables = build_conjecture_tables();
    return tables;
}

inline const ExpectedCycleTable& find_table(const std::vector<ExpectedCycleTable>& tables, std::string_view name) {
    for (const auto& t : tables)
        if (t.name == name) return t;
    throw Error(ErrorCode::BadArgument, "no cycle table named " + std::string(name));
}

inline nlohmann::json tables_to_json(const std::vector<ExpectedCycleTable>& tables) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& t : tables) {
        nlohmann::json cycles = nlohmann::json::array();
        for (const auto& c : t.cycles) {
            nlohmann::json elements = nlohmann::json::array();
            for (const auto& v : c.elements) elements.push_back(integer_json(v));
            cycles.push_back(elements);
        }
        out.push_back({{"name", t.name}, {"a", integer_json(t.a)}, {"b", integer_json(t.b)}, {"exact", t.exact},
                       {"cycles", cycles}});
    }
    return out;
}

/// Inverse of tables_to_json. Entries are not verified here; verify_table does that.
inline std::vector<ExpectedCycleTable> tables_from_json(const nlohmann::json& j) {
    std::vector<ExpectedCycleTable> out;
    for (const auto& tj : j) {
        ExpectedCycleTable t;
        t.name = tj.at("name").get<std::string>();
        t.a = integer_from_json(tj.at("a"));
        t.b = integer_from_json(tj.at("b"));
        t.exact = tj.value("exact", false);
        for (const auto& cj : tj.at("cycles")) {
            ExpectedCycle c;
            for (const auto& v : cj) c.elements.push_back(integer_from_json(v));
            if (c.elements.empty()) throw Error(ErrorCode::BadArgument, t.name + ": empty cycle");
            c.omega = c.elements.front();
            c.length = c.elements.size();
            t.cycles.push_back(std::move(c));
        }
        out.push_back(std::move(t));
    }
    return out;
}

struct TableComparison {
    std::vector<std::string> problems;
    bool ok() const { return problems.empty(); }
};

/// Census against a table: every listed cycle found with its length and
/// elements; when `exact`, no other cycles and nothing unresolved.
inline TableComparison compare_with_table(const CensusReport& r, const ExpectedCycleTable& t, bool exact) {
    TableComparison cmp;
    for (const auto& e : t.cycles) {
        auto it = r.cycles.find(e.omega);
        if (it == r.cycles.end()) {
            cmp.problems.push_back(t.name + ": Omega(" + to_string(e.omega) + ") not found");
            continue;
        }
        if (it->second.length() != e.length)
            cmp.problems.push_back(t.name + ": Omega(" + to_string(e.omega) + ") has length " +
                                   std::to_string(it->second.length()) + ", expected " + std::to_string(e.length));
        else if (it->second.elements != e.elements)
            cmp.problems.push_back(t.name + ": Omega(" + to_string(e.omega) + ") elements differ");
    }
    if (exact) {
        for (const auto& [omega, c] : r.cycles) {
            bool listed = false;
            for (const auto& e : t.cycles) listed = listed || e.omega == omega;
            if (!listed) cmp.problems.push_back(t.name + ": unexpected cycle Omega(" + to_string(omega) + ")");
        }
        if (r.unresolved_count != 0)
            cmp.problems.push_back(t.name + ": " + std::to_string(r.unresolved_count) + " unresolved starts");
    }
    return cmp;
}

/// Full check suite for one family member; emits a JSON summary with a pass flag.
inline nlohmann::json family_check(FamilyKind kind, unsigned nu, std::uint64_t N = 2000) {
    const MapParams map = family_map(kind, nu);
    nlohmann::json checks = nlohmann::json::array();
    bool pass = true;
    auto record = [&](const std::string& name, bool ok, const std::string& detail) {
        checks.push_back({{"check", name}, {"pass", ok}, {"detail", detail}});
        pass = pass && ok;
    };

    const ExpectedCycleTable schema = family_schema(kind, nu);
    const TrivialCycles trivial = trivial_cycles(map);
    bool schema_matches = trivial.power_structure && trivial.cycles.size() == schema.cycles.size();
    for (std::size_t i = 0; schema_matches && i < schema.cycles.size(); ++i)
        schema_matches = trivial.cycles[i].omega == schema.cycles[i].omega &&
                         trivial.cycles[i].elements == schema.cycles[i].elements;
    record("trivial_cycles", schema_matches, std::to_string(schema.cycles.size()) + " stated trivial cycles");

    bool verified = true;
    for (const auto& c : schema.cycles) verified = verified && verify_cycle(map, c.elements);
    record("verify_cycle", verified, "stated trivial cycles close under T");

    if (kind == FamilyKind::PlusPlus) {
        const ANu info = a_nu(nu);
        const bool expect_integer = nu <= 2;
        record("a_nu", info.is_integer == expect_integer && info.bracketed.value_or(true),
               info.is_integer ? "A_nu = " + std::to_string(*info.A) : "A_nu not an integer");
        const auto ob = omega_b_cycle_exists(nu);
        record("omega_b", ob.exists == expect_integer,
               ob.exists ? "Omega(b) has length " + std::to_string(ob.cycle->length()) : "no Omega(b)");
        bool witness = true;
        for (unsigned k = 2; k <= 32; ++k) {
            const auto w = expansion_witness(nu, k);
            witness = witness && w.identities_hold && w.ratio_exceeds;
        }
        record("expansion_witness", witness, "k = 2..32");
    }

    Caps caps;
    caps.max_steps = 100000;
    caps.max_value = pow2(256);
    const CensusReport report = census(map, N, caps);
    const TableComparison cmp = compare_with_table(report, schema, false);
    record("census", cmp.ok(),
           cmp.ok() ? "found " + std::to_string(report.cycles.size()) + " cycles below " + std::to_string(N) +
                          ", unresolved " + std::to_string(report.unresolved_count)
                    : cmp.problems.front());

    return {{"family", to_string(kind)},
            {"nu", nu},
            {"map", {{"a", integer_json(map.a())}, {"b", integer_json(map.b())}}},
            {"checks", checks},
            {"pass", pass}};
}

} // namespace syracuse
