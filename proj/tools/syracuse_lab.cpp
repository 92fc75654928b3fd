// syracuse-lab: command-line front end over the header library.
//
// Exit codes: 0 success, 1 check failed, 2 trajectory capped, 64 usage,
// 65 checkpoint config mismatch, 70 internal (inconclusive precision, broken
// invariant), 74 i/o.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "syracuse/syracuse.hpp"

using namespace syracuse;

namespace {

constexpr int kExitCapped = 2;
constexpr int kExitUsage = 64;
constexpr int kExitConfig = 65;
constexpr int kExitSoftware = 70;
constexpr int kExitIo = 74;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigMismatch: return kExitConfig;
        case ErrorCode::Io: return kExitIo;
        case ErrorCode::InconclusivePrecision:
        case ErrorCode::RelationViolation:
        case ErrorCode::NotACycle: return kExitSoftware;
        default: return kExitUsage;
    }
}

/// Caps from SYRACUSE_MAX_STEPS / SYRACUSE_MAX_VALUE, else the library defaults.
Caps default_caps() {
    Caps caps;
    if (const char* s = std::getenv("SYRACUSE_MAX_STEPS")) caps.max_steps = std::stoull(s);
    if (const char* v = std::getenv("SYRACUSE_MAX_VALUE")) caps.max_value = parse_integer(v);
    return caps;
}

struct CapFlags {
    std::string max_steps, max_value;

    void attach(CLI::App* cmd) {
        cmd->add_option("--max-steps", max_steps, "Step cap (default 10^6 or $SYRACUSE_MAX_STEPS)");
        cmd->add_option("--max-value", max_value, "Value cap, e.g. 2^256 (default 2^128 or $SYRACUSE_MAX_VALUE)");
    }
    Caps resolve() const {
        Caps caps = default_caps();
        if (!max_steps.empty()) {
            const Integer s = parse_integer(max_steps);
            if (sgn(s) < 0 || !fits_u64(s)) throw Error(ErrorCode::BadArgument, "bad --max-steps");
            caps.max_steps = to_u64(s);
        }
        if (!max_value.empty()) caps.max_value = parse_integer(max_value);
        return caps;
    }
};

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        std::cout.flush();
        if (!std::cout) throw Error(ErrorCode::Io, "stdout write failed");
    } else {
        write_file_atomically(out_path, text);
    }
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::BadArgument, path + " is not valid JSON");
    return j;
}

ReportFormat parse_format(const std::string& f) {
    if (f == "json") return ReportFormat::Json;
    if (f == "csv") return ReportFormat::Csv;
    throw Error(ErrorCode::BadArgument, "--format must be json or csv");
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    for (std::string part; std::getline(in, part, ',');)
        if (!part.empty()) out.push_back(part);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Laboratory for the generalized Syracuse map T(n) = n/2, (a n + b)/2"};
    app.require_subcommand(1);
    std::string a_text = "3", b_text = "1";

    // trajectory
    auto* traj = app.add_subcommand("trajectory", "Print the orbit of n and how it ended");
    std::string traj_n;
    bool traj_json = false;
    CapFlags traj_caps;
    traj->add_option("--a", a_text, "Multiplier (odd, >= 1)")->required();
    traj->add_option("--b", b_text, "Offset (odd, a + b > 0)")->required();
    traj->add_option("--n", traj_n, "Starting value")->required();
    traj->add_flag("--json", traj_json, "Emit JSON");
    traj_caps.attach(traj);

    // census
    auto* cens = app.add_subcommand("census", "Classify every n in [1, N] by the cycle it reaches");
    SweepConfig cfg;
    std::string cens_N, cens_format = "json", cens_out;
    CapFlags cens_caps;
    cens->add_option("--a", a_text)->required();
    cens->add_option("--b", b_text)->required();
    cens->add_option("--N", cens_N, "Upper end of the range")->required();
    cens->add_option("--workers", cfg.workers, "Worker threads")->check(CLI::Range(1u, 1024u));
    cens->add_option("--shard-size", cfg.shard_size, "Numbers per shard")->check(CLI::PositiveNumber);
    cens->add_option("--checkpoint", cfg.checkpoint_path, "JSON-lines checkpoint to create or resume");
    cens->add_option("--format", cens_format, "json or csv");
    cens->add_option("--out", cens_out, "Report file (default stdout)");
    cens_caps.attach(cens);

    // convergents
    auto* conv = app.add_subcommand("convergents", "Continued fraction of log2(a) as CSV n,a_n,p_n,q_n");
    std::size_t conv_count = 25;
    conv->add_option("--a", a_text)->required();
    conv->add_option("--count", conv_count, "Number of convergents")->check(CLI::Range(1, 10000));

    // bound
    auto* bound = app.add_subcommand("bound", "Certified lower bound on the length of a nontrivial cycle");
    std::string bound_N0 = "5*2^60", bound_floor = "min_omega", bound_mu, bound_check, bound_target = "length";
    std::size_t bound_nmax = 25;
    bound->add_option("--a", a_text);
    bound->add_option("--b", b_text);
    bound->add_option("--N0", bound_N0, "Assumed lower bound on the cycle minimum");
    bound->add_option("--nmax", bound_nmax, "Largest convergent index used")->check(CLI::Range(1, 2000));
    bound->add_option("--floor", bound_floor, "min_omega or min_omega_odd");
    bound->add_option("--mu", bound_mu, "Irrationality-measure mode with this mu (e.g. 14)");
    bound->add_option("--target", bound_target, "length (K) or oscillations (m)");
    bound->add_option("--check", bound_check, "Verify a certificate file instead of computing one");

    // circuit-check
    auto* circ = app.add_subcommand("circuit-check", "One-oscillation exclusion for b = a - 2");
    unsigned circ_nu = 0;
    std::string circ_mu = "14";
    circ->add_option("--a", a_text);
    circ->add_option("--b", b_text);
    circ->add_option("--nu", circ_nu, "Use the (2^nu+1, 2^nu-1) member instead of --a/--b");
    circ->add_option("--mu", circ_mu, "Irrationality measure (>= 2)");

    // family
    auto* fam = app.add_subcommand("family", "Power-of-two family members and their checks");
    std::string fam_kind = "PlusPlus";
    unsigned fam_nu = 1;
    bool fam_verify = false;
    std::uint64_t fam_N = 2000;
    fam->add_option("--kind", fam_kind, "PlusPlus, MinusPlus, PlusMinus or MinusOne")->required();
    fam->add_option("--nu", fam_nu, "Family parameter")->required();
    fam->add_flag("--verify", fam_verify, "Run the check suite");
    fam->add_option("--N", fam_N, "Census range used by --verify");

    // verify-paper
    auto* ver = app.add_subcommand("verify-paper", "Run the acceptance criteria");
    std::string ver_only, ver_tables, ver_dump;
    bool ver_json = false;
    ver->add_option("--only", ver_only, "Comma-separated groups: map,census,diophantine,bounds,oscillations,families");
    ver->add_option("--tables", ver_tables, "Cycle tables JSON to use instead of the built-in ones");
    ver->add_option("--dump-tables", ver_dump, "Write the built-in cycle tables to this file and exit");
    ver->add_flag("--json", ver_json, "Emit one JSON object per criterion");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Checkpointed census over a range of family members");
    std::string sweep_kind = "MinusOne", sweep_dir = "sweep-out";
    unsigned nu_from = 2, nu_to = 4;
    std::uint64_t sweep_N = 100000;
    SweepConfig sweep_cfg;
    CapFlags sweep_caps;
    sweep->add_option("--kind", sweep_kind)->required();
    sweep->add_option("--nu-from", nu_from);
    sweep->add_option("--nu-to", nu_to);
    sweep->add_option("--N", sweep_N);
    sweep->add_option("--dir", sweep_dir, "Output directory (reports, checkpoints, summary.csv)");
    sweep->add_option("--workers", sweep_cfg.workers)->check(CLI::Range(1u, 1024u));
    sweep->add_option("--shard-size", sweep_cfg.shard_size)->check(CLI::PositiveNumber);
    sweep_caps.attach(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*traj) {
            const MapParams map = new_map(parse_integer(a_text), parse_integer(b_text));
            const Trajectory t = trajectory(map, parse_integer(traj_n), traj_caps.resolve());
            nlohmann::json steps = nlohmann::json::array();
            std::string line;
            for (const auto& v : t.steps) {
                steps.push_back(integer_json(v));
                line += (line.empty() ? "" : ",") + to_string(v);
            }
            std::string terminal;
            nlohmann::json j{{"map", {{"a", integer_json(map.a())}, {"b", integer_json(map.b())}}},
                             {"start", integer_json(t.start)},
                             {"steps", steps}};
            if (t.entered_cycle()) {
                const auto idx = std::get<EnteredCycle>(t.terminal).index;
                const std::size_t length = t.steps.size() - 1 - idx;
                terminal = "EnteredCycle at step " + std::to_string(idx) + " (cycle length " + std::to_string(length) + ")";
                j["terminal"] = {{"kind", "EnteredCycle"}, {"index", idx}, {"cycle_length", length}};
            } else {
                const auto kind = std::get<CapExceeded>(t.terminal).kind;
                terminal = "CapExceeded " + std::string(to_string(kind));
                j["terminal"] = {{"kind", "CapExceeded"}, {"cap", std::string(to_string(kind))}};
            }
            if (traj_json) std::cout << j.dump(2) << "\n";
            else std::cout << line << "\n" << terminal << "\n";
            return t.entered_cycle() ? 0 : kExitCapped;
        }

        if (*cens) {
            cfg.a = parse_integer(a_text);
            cfg.b = parse_integer(b_text);
            const Integer N = parse_integer(cens_N);
            if (N < 1 || !fits_u64(N) || N > Integer("1000000000"))
                throw Error(ErrorCode::BadArgument, "--N must be in [1, 10^9]");
            cfg.N = to_u64(N);
            cfg.caps = cens_caps.resolve();
            cfg.format = parse_format(cens_format);
            const SweepOutcome out = run_sweep(cfg);
            emit(render(*out.report, cfg.format), cens_out);
            if (!cens_out.empty())
                std::cerr << "wrote " << cens_out << " (" << out.shards_run << " shards run, " << out.shards_reused
                          << " resumed)\n";
            return 0;
        }

        if (*conv) {
            const auto cs = convergents(parse_integer(a_text), conv_count);
            std::cout << "n,a_n,p_n,q_n\n";
            for (const auto& c : cs)
                std::cout << c.index << ',' << c.partial_quotient << ',' << c.p << ',' << c.q << '\n';
            return 0;
        }

        if (*bound) {
            if (!bound_check.empty()) {
                const auto cert = certificate_from_json(read_json_file(bound_check));
                const auto check = verify_certificate(cert);
                std::cout << nlohmann::json{{"accepted", check.accepted}, {"problems", check.problems}}.dump(2) << "\n";
                return check.accepted ? 0 : 1;
            }
            const MapParams map = new_map(parse_integer(a_text), parse_integer(b_text));
            const Integer N0 = parse_integer(bound_N0);
            FloorKind floor_kind;
            if (bound_floor == "min_omega") floor_kind = FloorKind::MinOmega;
            else if (bound_floor == "min_omega_odd") floor_kind = FloorKind::MinOmegaOdd;
            else throw Error(ErrorCode::BadArgument, "--floor must be min_omega or min_omega_odd");
            BoundCertificate cert;
            if (bound_target == "oscillations") cert = oscillation_bound(map, N0, bound_nmax);
            else if (bound_target != "length") throw Error(ErrorCode::BadArgument, "--target must be length or oscillations");
            else if (!bound_mu.empty()) cert = mu_length_bound(map, N0, parse_rational(bound_mu), bound_nmax, floor_kind);
            else cert = min_length_bound(map, N0, bound_nmax, floor_kind);
            std::cout << to_json(cert).dump(2) << "\n";
            return 0;
        }

        if (*circ) {
            const MapParams map = circ_nu > 0 ? family_map(FamilyKind::PlusPlus, circ_nu)
                                              : new_map(parse_integer(a_text), parse_integer(b_text));
            const auto report = one_oscillation_search(map, parse_rational(circ_mu));
            std::cout << to_json(report).dump(2) << "\n";
            return 0;
        }

        if (*fam) {
            const FamilyKind kind = family_from_string(fam_kind);
            if (fam_verify) {
                const auto j = family_check(kind, fam_nu, fam_N);
                std::cout << j.dump(2) << "\n";
                return j.at("pass").get<bool>() ? 0 : 1;
            }
            const MapParams map = family_map(kind, fam_nu);
            nlohmann::json cycles = nlohmann::json::array();
            for (const auto& c : trivial_cycles(map).cycles) {
                nlohmann::json elements = nlohmann::json::array();
                for (const auto& v : c.elements) elements.push_back(integer_json(v));
                cycles.push_back({{"omega", integer_json(c.omega)}, {"length", c.length}, {"elements", elements}});
            }
            std::cout << nlohmann::json{{"family", to_string(kind)},
                                        {"nu", fam_nu},
                                        {"map", {{"a", integer_json(map.a())}, {"b", integer_json(map.b())}}},
                                        {"trivial_cycles", cycles}}
                             .dump(2)
                      << "\n";
            return 0;
        }

        if (*ver) {
            if (!ver_dump.empty()) {
                write_file_atomically(ver_dump, tables_to_json(conjecture_tables()).dump(2) + "\n");
                return 0;
            }
            AcceptanceOptions options;
            for (const auto& g : split_csv(ver_only)) options.groups.insert(g);
            for (const auto& g : options.groups) {
                bool known = false;
                for (const auto& s : criterion_specs()) known = known || g == s.group;
                if (!known) throw Error(ErrorCode::BadArgument, "unknown group '" + g + "'");
            }
            if (!ver_tables.empty()) options.tables = tables_from_json(read_json_file(ver_tables));
            std::vector<std::string> failed;
            run_acceptance(options, [&](const CriterionResult& r) {
                if (ver_json) std::cout << to_json(r).dump() << "\n";
                else std::cout << format_line(r) << "\n";
                std::cout.flush();
                if (!r.pass) failed.push_back(std::to_string(r.id) + " " + r.name);
            });
            if (failed.empty()) return 0;
            std::cerr << "failed:";
            for (const auto& f : failed) std::cerr << ' ' << f << ';';
            std::cerr << "\n";
            return 1;
        }

        if (*sweep) {
            const FamilyKind kind = family_from_string(sweep_kind);
            std::filesystem::create_directories(sweep_dir);
            std::string summary = "nu,a,b,omega,length,K,L,basin_count,unresolved_count\n";
            for (unsigned nu = nu_from; nu <= nu_to; ++nu) {
                const MapParams map = family_map(kind, nu);
                SweepConfig c = sweep_cfg;
                c.a = map.a();
                c.b = map.b();
                c.N = sweep_N;
                c.caps = sweep_caps.resolve();
                const std::string stem = sweep_dir + "/" + std::string(to_string(kind)) + "_nu" + std::to_string(nu);
                c.checkpoint_path = stem + ".ckpt";
                const SweepOutcome out = run_sweep(c);
                write_file_atomically(stem + ".json", render_json(*out.report));
                for (const auto& [w, cyc] : out.report->cycles) {
                    const auto it = out.report->basin_counts.find(w);
                    summary += std::to_string(nu) + ',' + to_string(map.a()) + ',' + to_string(map.b()) + ',' +
                               to_string(w) + ',' + std::to_string(cyc.length()) + ',' + std::to_string(cyc.K) + ',' +
                               std::to_string(cyc.L) + ',' +
                               std::to_string(it == out.report->basin_counts.end() ? 0 : it->second) + ',' +
                               std::to_string(out.report->unresolved_count) + '\n';
                }
                std::cerr << map.label() << ": " << out.report->cycles.size() << " cycles, "
                          << out.report->unresolved_count << " unresolved\n";
            }
            write_file_atomically(sweep_dir + "/summary.csv", summary);
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSoftware;
    }
    return kExitUsage;
}
