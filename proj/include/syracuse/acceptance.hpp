#pragma once

// Desk-scale acceptance suite: thirteen criteria, each producing one
// pass/fail record. Shared by the acceptance binary and `verify-paper`.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "syracuse/bounds.hpp"
#include "syracuse/census.hpp"
#include "syracuse/diophantine.hpp"
#include "syracuse/families.hpp"
#include "syracuse/map.hpp"
#include "syracuse/oscillations.hpp"
#include "syracuse/sweep.hpp"

#include <unistd.h>

namespace syracuse {

namespace oracle {

// Fixed-point enclosure of ln(a) at `bits` fractional bits, via
// ln a = k ln2 + 2 atanh((a - 2^k)/(a + 2^k)) with ln 2 = 2 atanh(1/3).
// Deliberately shares nothing with the squaring enclosure in interval.hpp.
struct Fixed {
    Integer lo, hi;  // value in [lo, hi] * 2^-bits
};

inline Fixed atanh_fixed(const Integer& num, const Integer& den, unsigned bits) {
    // sum_j x^(2j+1)/(2j+1), x = num/den, |x| <= 1/3
    const Integer scale = pow2(bits);
    Integer sum = 0;
    Integer pnum = num, pden = den;
    const Integer num2 = num * num, den2 = den * den;
    unsigned long terms = 0;
    for (unsigned long j = 0;; ++j) {
        Integer t = scale * pnum;
        Integer d = pden * (2 * j + 1);
        mpz_tdiv_q(t.get_mpz_t(), t.get_mpz_t(), d.get_mpz_t());  // truncation error < 1 ulp
        sum += t;
        ++terms;
        pnum *= num2;
        pden *= den2;
        // tail < |x|^(2j+3) / (1 - x^2) <= 2 |x|^(2j+3); stop once under one ulp
        Integer tail = scale * abs(pnum) * 2;
        if (tail < pden) break;
    }
    const Integer slack(static_cast<unsigned long>(terms + 1));
    return {sum - slack, sum + slack};
}

inline Fixed ln_fixed(const Integer& a, unsigned bits) {
    const Fixed ln2 = atanh_fixed(1, 3, bits + 4);
    // nearest power of two keeps |x| <= 1/3
    unsigned long k = bit_length(a) - 1;
    if (pow2(k + 1) - a < a - pow2(k)) ++k;
    const Fixed t = atanh_fixed(a - pow2(k), a + pow2(k), bits + 4);
    Fixed out{(ln2.lo * 2 * k + t.lo * 2), (ln2.hi * 2 * k + t.hi * 2)};
    mpz_fdiv_q_2exp(out.lo.get_mpz_t(), out.lo.get_mpz_t(), 4);
    mpz_cdiv_q_2exp(out.hi.get_mpz_t(), out.hi.get_mpz_t(), 4);
    return out;
}

/// Sign of p - q log2(a): exact powers when small, atanh enclosures otherwise.
inline int side(const Integer& p, const Integer& q, const Integer& a) {
    if (sgn(q) == 0) return 1;
    if (p.fits_ulong_p() && q.fits_ulong_p() && q.get_ui() * bit_length(a) < 20000 && p.get_ui() < 20000) {
        return cmp(pow2(p.get_ui()), ipow(a, q.get_ui())) > 0 ? 1 : -1;
    }
    for (unsigned bits = 64 + 2 * static_cast<unsigned>(bit_length(p) + bit_length(q));; bits *= 2) {
        const Fixed l2 = ln_fixed(2, bits), la = ln_fixed(a, bits);
        // p ln2 - q ln a
        const Integer lo = p * l2.lo - q * la.hi, hi = p * l2.hi - q * la.lo;
        if (sgn(lo) > 0) return 1;
        if (sgn(hi) < 0) return -1;
    }
}

/// Partial quotients of log2(a) by a Stern-Brocot descent using only `side`.
inline std::vector<Integer> partial_quotients(const Integer& a, std::size_t count) {
    std::vector<Integer> out;
    Integer p2 = 0, q2 = 1, p1 = 1, q1 = 0;
    while (out.size() < count) {
        const int s = side(p2, q2, a);
        auto same = [&](const Integer& k) { return side(k * p1 + p2, k * q1 + q2, a) == s; };
        Integer hi = 1;
        while (same(hi)) hi *= 2;
        Integer lo = hi / 2;  // same(lo) holds or lo == 0
        while (hi - lo > 1) {
            const Integer mid = (lo + hi) / 2;
            (same(mid) ? lo : hi) = mid;
        }
        out.push_back(lo);
        const Integer pn = lo * p1 + p2, qn = lo * q1 + q2;
        p2 = p1;
        q2 = q1;
        p1 = pn;
        q1 = qn;
    }
    return out;
}

} // namespace oracle

struct CriterionResult {
    int id = 0;
    std::string name;
    std::string group;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

struct AcceptanceOptions {
    std::vector<ExpectedCycleTable> tables;  // empty: conjecture_tables()
    std::set<std::string> groups;            // empty: all
    std::filesystem::path scratch_dir;       // empty: a fresh temp directory
};

struct CriterionSpec {
    int id;
    const char* name;
    const char* group;
};

inline const std::vector<CriterionSpec>& criterion_specs() {
    static const std::vector<CriterionSpec> specs = {
        {1, "trivial_cycles", "map"},          {2, "census_3_-1", "census"},
        {3, "census_3_5", "census"},           {4, "census_5_3", "census"},
        {5, "continued_fractions", "diophantine"}, {6, "c0_enclosure", "bounds"},
        {7, "bound_reproduction", "bounds"},   {8, "one_oscillation", "oscillations"},
        {9, "defect_suite", "bounds"},         {10, "oscillation_suite", "oscillations"},
        {11, "a_nu_scan", "families"},         {12, "expansion_witness", "families"},
        {13, "determinism", "census"},
    };
    return specs;
}

namespace detail {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void fail(const std::string& why) {
        if (!pass) detail << "; ";
        else detail.str("");
        pass = false;
        detail << why;
    }
    void require(bool ok, const std::string& why) {
        if (!ok) fail(why);
    }
};

inline std::string join(const std::vector<Integer>& xs) {
    std::string s;
    for (const auto& x : xs) s += (s.empty() ? "" : ",") + to_string(x);
    return "{" + s + "}";
}

/// Length of the cycle through `omega` by direct iteration, or 0 if it does not return within `limit`.
inline std::size_t return_time(const MapParams& map, const Integer& omega, std::size_t limit) {
    Integer v = omega;
    for (std::size_t j = 1; j <= limit; ++j) {
        v = step(map, v);
        if (v == omega) return j;
    }
    return 0;
}

inline void criterion_trivial(Outcome& o) {
    std::mt19937_64 rng(0x5eed'2024);
    std::size_t checked = 0, second = 0;
    const long b_max = 1L << 15;
    while (checked < 200) {
        long a = 0, b = 0;
        if (checked % 2 == 0) {
            const unsigned nu0 = std::uniform_int_distribution<unsigned>(1, 20)(rng);
            const long hi = std::min(b_max, (1L << nu0) - 1);
            b = std::uniform_int_distribution<long>(-b_max, hi)(rng) | 1;
            if (b > hi) b -= 2;
            a = (1L << nu0) - b;
        } else {
            // steer towards a = 2^nu1 - delta with delta b > 0
            const unsigned nu1 = std::uniform_int_distribution<unsigned>(1, 16)(rng);
            const int delta = std::uniform_int_distribution<int>(0, 1)(rng) ? 1 : -1;
            a = (1L << nu1) - delta;
            std::vector<long> bs;
            for (unsigned nu0 = 1; nu0 <= 20; ++nu0) {
                const long cand = (1L << nu0) - a;
                if (delta * cand > 0 && std::labs(cand) <= b_max) bs.push_back(cand);
            }
            if (bs.empty()) continue;
            b = bs[std::uniform_int_distribution<std::size_t>(0, bs.size() - 1)(rng)];
        }
        const MapParams map = new_map(a, b);
        const unsigned nu0 = static_cast<unsigned>(*exact_log2(Integer(a + b)));
        const TrivialCycles tc = trivial_cycles(map);
        const std::string label = map.label();
        auto find = [&](const Integer& omega) -> const TrivialCycleSpec* {
            for (const auto& c : tc.cycles)
                if (c.omega == omega) return &c;
            return nullptr;
        };
        auto check = [&](const Integer& omega, unsigned length) {
            const auto* c = find(omega);
            if (!c) return o.fail(label + ": Omega(" + to_string(omega) + ") missing");
            o.require(c->length == length && c->elements.size() == length,
                      label + ": Omega(" + to_string(omega) + ") length " + std::to_string(c->length) +
                          ", expected " + std::to_string(length));
            o.require(return_time(map, omega, length) == length,
                      label + ": Omega(" + to_string(omega) + ") does not close after " + std::to_string(length));
            for (std::size_t i = 0; i < c->elements.size(); ++i)
                o.require(step(map, c->elements[i]) == c->elements[(i + 1) % c->elements.size()],
                          label + ": element relation fails");
        };
        check(1, nu0);
        for (int delta : {1, -1}) {
            const auto nu1 = exact_log2(Integer(a + delta));
            if (!nu1 || *nu1 < 1 || delta * b <= 0) continue;
            if (delta * b == 1) {
                o.require(*nu1 == nu0, label + ": merged trivial cycles disagree on length");
            } else {
                check(Integer(delta * b), static_cast<unsigned>(*nu1));
                ++second;
            }
        }
        ++checked;
    }
    if (o.pass) o.detail << checked << " maps verified by iteration, " << second << " with a second trivial cycle";
}

inline void criterion_census(Outcome& o, const ExpectedCycleTable& table, std::uint64_t N, const Caps& caps,
                             bool exact, const std::vector<std::size_t>& lengths) {
    try {
        verify_table(table);
    } catch (const Error& e) {
        return o.fail(std::string("table invalid: ") + e.what());
    }
    const MapParams map = new_map(table.a, table.b);
    const CensusReport r = census(map, N, caps, {4, 1u << 16});
    const TableComparison cmp = compare_with_table(r, table, exact);
    for (const auto& p : cmp.problems) o.fail(p);
    std::vector<std::size_t> got;
    for (const auto& e : table.cycles) got.push_back(e.length);
    o.require(got == lengths, table.name + ": table lengths differ from the stated lengths");
    if (o.pass)
        o.detail << table.name << " N=" << N << " omegas " << join(r.omegas()) << ", unresolved "
                 << r.unresolved_count;
}

inline void criterion_cf(Outcome& o) {
    const auto cs = convergents(3, 22);
    o.require(cs[19].q == Integer("397573379"), "q19 = " + to_string(cs[19].q));
    o.require(cs[20].q == Integer("6189245291"), "q20 = " + to_string(cs[20].q));
    for (long a : {3, 5, 7, 9, 15, 17, 31, 33}) {
        const auto mine = partial_quotients(Integer(a), 26);
        const auto theirs = oracle::partial_quotients(Integer(a), 26);
        if (mine != theirs) o.fail("a=" + std::to_string(a) + ": partial quotients disagree with the oracle");
    }
    if (o.pass) o.detail << "q19=" << cs[19].q << " q20=" << cs[20].q << "; a_0..a_25 agree for 8 bases";
}

inline void criterion_c0(Outcome& o) {
    const Interval c = c0_enclosure(new_map(3, 1), Rational(1, 100000));
    // 3 ln2 = 2.0794415..., so the quoted 2.07944 is a 5-decimal rounding: both
    // endpoints must round to it.
    auto round5 = [](const Rational& x) { return floor_of(x * 100000 + Rational(1, 2)); };
    o.require(round5(c.lo) == 207944 && round5(c.hi) == 207944, "enclosure does not round to 2.07944");
    o.require(c.hi - c.lo <= Rational(1, 100000), "width exceeds 1e-5");
    o.detail.precision(9);
    if (o.pass) o.detail << "c0 in [" << c.lo.get_d() << ", " << c.hi.get_d() << "]";
}

inline void criterion_bound(Outcome& o) {
    const Integer N0 = Integer(5) * pow2(60);
    const BoundCertificate cert = min_length_bound(new_map(3, 1), N0, 25, FloorKind::MinOmega);
    o.require(cert.bound >= 363974000, "bound " + to_string(cert.bound) + " below 363974000");
    o.require(cert.rows.size() >= 20, "missing rows");
    if (cert.rows.size() >= 20) {
        const auto& row19 = cert.rows[18];
        o.require(row19.n == 19 && row19.q_n == Integer("397573379") && row19.q_next == Integer("6189245291"),
                  "row 19 is not the (q19, q20) pair");
        o.require(row19.bound == Integer("397573379"), "(q19, q20) row gives " + to_string(row19.bound));
    }
    // Maximizing over n <= 25 picks n = 20; the value comes from an independent high-precision evaluation.
    o.require(cert.bound == Integer("938251748") && cert.n == 20,
              "maximal bound " + to_string(cert.bound) + " at n=" + std::to_string(cert.n));
    const auto check = verify_certificate(cert);
    o.require(check.accepted, "certificate rejected by the independent checker");
    if (o.pass)
        o.detail << "(q19,q20) row = 397573379 (quoted floor 363974000, gap +" << (Integer(397573379) - 363974000)
                 << "); maximum " << cert.bound << " at n=" << cert.n << " (q20,q21)";
}

inline void criterion_circuit(Outcome& o) {
    const auto r = one_oscillation_search(new_map(3, 1), Rational(14));
    o.require(r.k_cap == 91, "K_cap = " + std::to_string(r.k_cap));
    o.require(r.candidates.empty(), std::to_string(r.candidates.size()) + " integral candidates");
    if (o.pass) o.detail << "K_cap=91, no integral x0 for K in [2,91]";
}

inline std::vector<std::pair<MapParams, Cycle>> suite_cycles(const std::vector<ExpectedCycleTable>& tables) {
    std::vector<std::pair<MapParams, Cycle>> out;
    for (const char* name : {"(3,-1)", "(3,5)", "(5,3)"}) {
        const auto& t = find_table(tables, name);
        const MapParams map = new_map(t.a, t.b);
        for (const auto& e : t.cycles) out.emplace_back(map, canonicalize(map, e.elements));
    }
    return out;
}

inline void criterion_defect(Outcome& o, const std::vector<ExpectedCycleTable>& tables) {
    std::size_t checked = 0;
    for (const auto& [map, cycle] : suite_cycles(tables)) {
        if (map.b() < 1) continue;
        const std::string label = map.label() + " Omega(" + to_string(cycle.omega) + ")";
        const DefectCheck d = defect_check(map, cycle);
        o.require(d.holds(), label + ": defect inequalities fail");
        for (const auto& row : bound_consistency(map, cycle, 12))
            o.require(row.length_ok && row.odd_ok, label + ": length bound fails at n=" + std::to_string(row.n));
        ++checked;
    }
    if (o.pass) o.detail << checked << " cycles with b >= 1, all interval-decided";
}

inline void criterion_oscillation(Outcome& o, const std::vector<ExpectedCycleTable>& tables) {
    std::size_t checked = 0, excluded = 0;
    for (const auto& [map, cycle] : suite_cycles(tables)) {
        const std::string label = map.label() + " Omega(" + to_string(cycle.omega) + ")";
        if (cycle.L == 0 || cycle.K == 0) {
            ++excluded;
            continue;
        }
        try {
            const auto d = decompose(map, cycle);
            std::size_t K = 0, L = 0;
            for (std::size_t i = 0; i < d.m; ++i) K += d.k[i], L += d.l[i];
            o.require(K == cycle.K && L == cycle.L, label + ": sums of k_i, l_i differ from K, L");
            o.require(canonical_form(reassemble(map, d)) == cycle, label + ": reassembly differs");
            if (map.a() == 3 && map.b() == 5 && cycle.omega == 19)
                o.require(d.m == 1 && d.k[0] == 3 && d.l[0] == 2, label + ": expected m=1, k=3, l=2");
            if (map.a() == 3 && map.b() == 5 && cycle.omega == 23) o.require(d.m == 2, label + ": expected m=2");
            ++checked;
        } catch (const Error& e) {
            o.fail(label + ": " + e.what());
        }
    }
    if (o.pass)
        o.detail << checked << " cycles decomposed, rise relation exact; " << excluded
                 << " excluded (no even element)";
}

inline void criterion_a_nu(Outcome& o) {
    std::vector<unsigned> integral;
    for (unsigned nu = 1; nu <= 64; ++nu) {
        const ANu r = a_nu(nu);
        if (r.is_integer) integral.push_back(nu);
        if (nu >= 3) o.require(r.bracketed.value_or(false), "bracketing fails at nu=" + std::to_string(nu));
    }
    o.require(integral == std::vector<unsigned>{1, 2}, "integral set is not {1,2}");
    o.require(a_nu(1).A == 1u && a_nu(2).A == 3u, "A_1 or A_2 wrong");
    if (o.pass) o.detail << "integral only at nu=1 (A=1), nu=2 (A=3); bracketing holds for 3..64";
}

inline void criterion_expansion(Outcome& o) {
    std::size_t checked = 0;
    for (unsigned nu = 1; nu <= 8; ++nu)
        for (unsigned k = 2; k <= 64; ++k) {
            const auto w = expansion_witness(nu, k);
            o.require(w.identities_hold && w.ratio_exceeds,
                      "nu=" + std::to_string(nu) + " k=" + std::to_string(k) + " fails");
            ++checked;
        }
    if (o.pass) o.detail << checked << " (nu,k) pairs exact";
}

inline void criterion_determinism(Outcome& o, const std::filesystem::path& scratch) {
    SweepConfig cfg;
    cfg.a = 3;
    cfg.b = 5;
    cfg.N = 200000;
    cfg.shard_size = 8192;
    cfg.workers = 1;
    const std::string one = render_json(*run_sweep(cfg).report);
    cfg.workers = 4;
    const std::string four = render_json(*run_sweep(cfg).report);
    o.require(one == four, "workers 1 and 4 differ");

    std::filesystem::create_directories(scratch);
    cfg.checkpoint_path = (scratch / "determinism.ckpt").string();
    std::filesystem::remove(cfg.checkpoint_path);
    const auto partial = run_sweep(cfg, 7);
    o.require(!partial.complete && partial.shards_run == 7, "interrupted run did not stop");
    {
        std::ofstream torn(cfg.checkpoint_path, std::ios::app);
        torn << "{\"shard\":{\"lo\":";  // killed mid-write
    }
    const auto resumed = run_sweep(cfg);
    o.require(resumed.complete && resumed.shards_reused == 7, "resume did not reuse the completed shards");
    o.require(resumed.report && render_json(*resumed.report) == one, "resumed report differs");
    std::filesystem::remove(cfg.checkpoint_path);
    if (o.pass) o.detail << "byte-identical for workers {1,4} and across kill/resume (" << one.size() << " bytes)";
}

} // namespace detail

/// Runs the selected criteria, reporting each result through `on_result` as it completes.
inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                                   const std::function<void(const CriterionResult&)>& on_result = {}) {
    const std::vector<ExpectedCycleTable>& tables = options.tables.empty() ? conjecture_tables() : options.tables;
    const std::filesystem::path scratch =
        options.scratch_dir.empty()
            ? std::filesystem::temp_directory_path() / ("syracuse-acceptance-" + std::to_string(::getpid()))
            : options.scratch_dir;
    Caps big;
    big.max_steps = 100000;
    big.max_value = pow2(256);

    std::vector<CriterionResult> out;
    for (const auto& spec : criterion_specs()) {
        if (!options.groups.empty() && !options.groups.count(spec.group)) continue;
        detail::Outcome o;
        double limit = 0;
        const auto start = std::chrono::steady_clock::now();
        try {
            switch (spec.id) {
                case 1: limit = 5; detail::criterion_trivial(o); break;
                case 2: limit = 60; detail::criterion_census(o, find_table(tables, "(3,-1)"), 1000000, {}, true, {1, 3, 11}); break;
                case 3: limit = 60; detail::criterion_census(o, find_table(tables, "(3,5)"), 1000000, {}, true, {3, 2, 5, 5, 27, 27}); break;
                case 4: detail::criterion_census(o, find_table(tables, "(5,3)"), 10000, big, false, {3, 5, 7, 7, 7, 7, 7}); break;
                case 5: detail::criterion_cf(o); break;
                case 6: detail::criterion_c0(o); break;
                case 7: detail::criterion_bound(o); break;
                case 8: limit = 10; detail::criterion_circuit(o); break;
                case 9: detail::criterion_defect(o, tables); break;
                case 10: detail::criterion_oscillation(o, tables); break;
                case 11: detail::criterion_a_nu(o); break;
                case 12: detail::criterion_expansion(o); break;
                case 13: detail::criterion_determinism(o, scratch); break;
            }
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        CriterionResult r;
        r.id = spec.id;
        r.name = spec.name;
        r.group = spec.group;
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (limit > 0 && r.seconds > limit)
            o.fail("took " + std::to_string(r.seconds) + " s, limit " + std::to_string(limit) + " s");
        r.pass = o.pass;
        r.detail = o.detail.str();
        if (on_result) on_result(r);
        out.push_back(std::move(r));
    }
    std::error_code ec;
    if (options.scratch_dir.empty()) std::filesystem::remove_all(scratch, ec);
    return out;
}

inline nlohmann::json to_json(const CriterionResult& r) {
    return {{"id", r.id}, {"name", r.name}, {"group", r.group}, {"pass", r.pass}, {"detail", r.detail},
            {"seconds", r.seconds}};
}

inline std::string format_line(const CriterionResult& r) {
    std::ostringstream s;
    s << (r.pass ? "PASS" : "FAIL") << "  " << r.id << ' ' << r.name << ": " << r.detail;
    s.precision(3);
    s << std::fixed << " (" << r.seconds << " s)";
    return s.str();
}

} // namespace syracuse
