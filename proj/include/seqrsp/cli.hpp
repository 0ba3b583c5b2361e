#pragma once

// Command-line surface: reproduces the sharpness/bound tables, the resource
// dataset, per-configuration cascade reports and the trajectory oracle, as
// CSV or JSON.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cascade.hpp"
#include "classical.hpp"
#include "measurement.hpp"
#include "montecarlo.hpp"
#include "resources.hpp"
#include "solver.hpp"

namespace seqrsp::cli {

inline constexpr const char* kToolName = "seqrsp";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

using json = nlohmann::ordered_json;

// Locale-independent, 6 significant digits.
inline std::string fmt6(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

inline std::string fmt3(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return buf;
}

// --- parsing -----------------------------------------------------------------

inline InitialFamily parse_family(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    const auto need_arg = [&](const char* what) {
        if (arg.empty())
            throw std::invalid_argument(std::string("family ") + head + " needs " + what);
    };

    if (head == "singlet") return Singlet{};
    if (head == "bell") {
        need_arg("a kind (psi-, psi+, phi+, phi-)");
        if (arg == "psi-") return BellState{BellKind::PsiMinus};
        if (arg == "psi+") return BellState{BellKind::PsiPlus};
        if (arg == "phi+") return BellState{BellKind::PhiPlus};
        if (arg == "phi-") return BellState{BellKind::PhiMinus};
        throw std::invalid_argument("unknown Bell kind '" + arg + "'");
    }
    if (head == "nonmax") {
        need_arg("xi in radians");
        return NonMaximal{std::stod(arg)};
    }
    if (head == "werner") {
        need_arg("a visibility c");
        return Werner{std::stod(arg)};
    }
    if (head == "belldiag") {
        need_arg("c1,c2,c3");
        std::stringstream ss(arg);
        std::string tok;
        std::vector<double> c;
        while (std::getline(ss, tok, ',')) c.push_back(std::stod(tok));
        if (c.size() != 3) throw std::invalid_argument("belldiag needs exactly c1,c2,c3");
        return BellDiagonal{{c[0], c[1], c[2]}};
    }
    throw std::invalid_argument("unknown family '" + head +
                                "' (singlet | bell:K | nonmax:XI | werner:C | belldiag:C1,C2,C3)");
}

inline std::string family_to_string(const InitialFamily& f) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Singlet>) {
                return "singlet";
            } else if constexpr (std::is_same_v<T, BellState>) {
                switch (v.kind) {
                    case BellKind::PsiMinus: return "bell:psi-";
                    case BellKind::PsiPlus: return "bell:psi+";
                    case BellKind::PhiPlus: return "bell:phi+";
                    case BellKind::PhiMinus: return "bell:phi-";
                }
                return "bell:?";
            } else if constexpr (std::is_same_v<T, NonMaximal>) {
                return "nonmax:" + fmt6(v.xi);
            } else if constexpr (std::is_same_v<T, Werner>) {
                return "werner:" + fmt6(v.c);
            } else {
                return "belldiag:" + fmt6(v.c.c1) + "," + fmt6(v.c.c2) + "," + fmt6(v.c.c3);
            }
        },
        f);
}

inline std::vector<double> parse_lambdas(const std::string& spec) {
    std::vector<double> out;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (out.empty()) throw std::invalid_argument("--lambdas: at least one value required");
    return out;
}

struct Sweep {
    double start = 0.0, stop = kPi, step = 0.01;
};

inline Sweep parse_sweep(const std::string& spec) {
    Sweep s;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &s.start, &s.stop, &s.step) != 3)
        throw std::invalid_argument("--sweep expects start:stop:step");
    if (!(s.step > 0.0) || s.stop < s.start)
        throw std::invalid_argument("--sweep: need step > 0 and stop >= start");
    return s;
}

inline std::vector<double> sweep_values(const Sweep& s) {
    std::vector<double> v;
    // The stop value is included up to a small fraction of the step so that
    // ranges specified with rounded endpoints keep their last sample.
    for (double x = s.start; x <= s.stop + 1e-4 * s.step; x += s.step) v.push_back(x);
    return v;
}

inline int quad_nodes_from_env() {
    const char* env = std::getenv("RSP_QUAD_NODES");
    if (env == nullptr || *env == '\0') return kDefaultQuadratureNodes;
    const int n = std::atoi(env);
    if (n < 16) throw std::invalid_argument("RSP_QUAD_NODES must be an integer >= 16");
    return n;
}

inline json tool_header(const std::string& command) {
    json j;
    j["schema"] = kSchemaVersion;
    j["tool"] = std::string(kToolName) + " " + kToolVersion;
    j["command"] = command;
    return j;
}

// --- classical bound ------------------------------------------------------

inline std::string classical_bound_csv(const std::vector<double>& thetas) {
    std::string out = "theta,f_cl_max\n";
    for (double th : thetas) out += fmt6(th) + "," + fmt6(classical_bound(th)) + "\n";
    return out;
}

inline json classical_bound_json(const std::vector<double>& thetas) {
    json j = tool_header("classical-bound");
    json rows = json::array();
    for (double th : thetas) rows.push_back({{"theta", th}, {"f_cl_max", classical_bound(th)}});
    j["rows"] = rows;
    return j;
}

// --- cascade ---------------------------------------------------------------

inline json cascade_json(const ProtocolConfig& cfg, const SharpnessChain& chain, int nodes) {
    const CascadeReport rep = run_cascade(cfg, chain);
    json j = tool_header("cascade");
    j["parameters"] = {{"family", family_to_string(cfg.family)},
                       {"theta", cfg.theta},
                       {"target", cfg.target == Target::Psi ? "psi" : "psi-perp"},
                       {"lambdas", chain},
                       {"quad_nodes", nodes}};
    json steps = json::array();
    for (const auto& st : rep.steps) {
        steps.push_back({{"bob", st.bob},
                         {"lambda", st.lambda},
                         {"f_av", st.f_av},
                         {"f_numeric", numeric_average_fidelity(cfg, chain, st.bob, nodes)},
                         {"f_classical", st.f_classical},
                         {"beats_classical", st.beats_classical},
                         {"p_plus", st.p_plus},
                         {"p_minus", st.p_minus},
                         {"state_coeffs", {{"c1", st.coeffs.c1},
                                           {"c2", st.coeffs.c2},
                                           {"c3", st.coeffs.c3}}}});
    }
    j["steps"] = steps;
    return j;
}

inline std::string cascade_csv(const ProtocolConfig& cfg, const SharpnessChain& chain,
                               int nodes) {
    const CascadeReport rep = run_cascade(cfg, chain);
    std::string out =
        "bob,lambda,f_av,f_numeric,f_classical,beats_classical,c1,c2,c3,p_plus,p_minus\n";
    for (const auto& st : rep.steps) {
        out += std::to_string(st.bob) + "," + fmt6(st.lambda) + "," + fmt6(st.f_av) + "," +
               fmt6(numeric_average_fidelity(cfg, chain, st.bob, nodes)) + "," +
               fmt6(st.f_classical) + "," + (st.beats_classical ? "1" : "0") + "," +
               fmt6(st.coeffs.c1) + "," + fmt6(st.coeffs.c2) + "," + fmt6(st.coeffs.c3) + "," +
               fmt6(st.p_plus) + "," + fmt6(st.p_minus) + "\n";
    }
    return out;
}

// --- tables ------------------------------------------------------------------

inline std::string interval_text(const BoundaryInterval& iv) {
    return std::string(iv.lo_closed ? "[" : "(") + fmt3(iv.lo) + ", " + fmt3(iv.hi) +
           (iv.hi_closed ? "]" : ")");
}

// Sharpness-range tables: one row per observer with its feasible interval.
inline FeasibilityResult table_chain(const std::string& which) {
    if (which == "I") return min_chain({Singlet{}, kPi / 2.0, Target::Psi}, 7);
    if (which == "B")
        return min_chain({Singlet{}, std::atan(std::sqrt(2.0)), Target::Psi}, 7);
    throw std::invalid_argument("table_chain: selector must be I or B");
}

inline BoundaryAxis table_axis(const std::string& which) {
    if (which == "II") return BoundaryAxis::Theta;
    if (which == "III") return BoundaryAxis::Xi;
    if (which == "IV") return BoundaryAxis::WernerC;
    throw std::invalid_argument("table_axis: selector must be II, III or IV");
}

inline std::string table_csv(const std::string& which) {
    if (which == "I" || which == "B") {
        const FeasibilityResult fr = table_chain(which);
        std::string out = "bob,lambda_min,lambda_max\n";
        for (int i = 0; i < fr.n_max; ++i)
            out += std::to_string(i + 1) + "," + fmt6(fr.lambda_mins[i]) + ",1\n";
        return out;
    }
    const auto rows = boundary_table(table_axis(which));
    std::string out = "n,range_1,range_2\n";
    for (const auto& row : rows) {
        out += std::to_string(row.n) + "," + interval_text(row.intervals[0]) + ",";
        if (row.intervals.size() > 1) out += interval_text(row.intervals[1]);
        out += "\n";
    }
    return out;
}

inline json table_json(const std::string& which) {
    json j = tool_header("table");
    j["parameters"] = {{"which", which}};
    json rows = json::array();
    if (which == "I" || which == "B") {
        const FeasibilityResult fr = table_chain(which);
        for (int i = 0; i < fr.n_max; ++i)
            rows.push_back(
                {{"bob", i + 1}, {"lambda_min", fr.lambda_mins[i]}, {"lambda_max", 1.0}});
    } else {
        for (const auto& row : boundary_table(table_axis(which))) {
            json ivs = json::array();
            for (const auto& iv : row.intervals)
                ivs.push_back({{"lo", iv.lo},
                               {"hi", iv.hi},
                               {"lo_closed", iv.lo_closed},
                               {"hi_closed", iv.hi_closed}});
            rows.push_back({{"n", row.n}, {"intervals", ivs}});
        }
    }
    j["rows"] = rows;
    return j;
}

// --- resources ---------------------------------------------------------------

struct ResourceRow {
    int bob = 0;
    double discord_available = 0.0;
    double concurrence_available = 0.0;
    double discord_after = 0.0;
    double concurrence_after = 0.0;
    bool after_feasible = true;
};

// Row b: resource in the state observer b measures ("available") and in the
// state left for observer b+1 when b takes its own minimal sharpness, clamped
// to a sharp measurement where no feasible value exists ("after").
inline std::vector<ResourceRow> resource_rows(int max_bob) {
    if (max_bob < 1 || max_bob > 8)
        throw std::invalid_argument("resources: --max-bob outside [1, 8]");
    std::vector<ResourceRow> rows;
    for (int b = 1; b <= max_bob; ++b) {
        const ResourceReport avail = max_remaining_resource(b, ResourceMeasure::Discord);
        const ResourceReport after = max_remaining_resource(b + 1, ResourceMeasure::Discord);
        rows.push_back({b, avail.max_discord, avail.max_concurrence, after.max_discord,
                        after.max_concurrence, after.predecessors_feasible});
    }
    return rows;
}

inline std::string resources_csv(int max_bob) {
    std::string out =
        "bob,discord_available,concurrence_available,discord_after,concurrence_after,"
        "after_feasible\n";
    for (const auto& r : resource_rows(max_bob))
        out += std::to_string(r.bob) + "," + fmt6(r.discord_available) + "," +
               fmt6(r.concurrence_available) + "," + fmt6(r.discord_after) + "," +
               fmt6(r.concurrence_after) + "," + (r.after_feasible ? "1" : "0") + "\n";
    return out;
}

inline json resources_json(int max_bob) {
    json j = tool_header("resources");
    j["parameters"] = {{"max_bob", max_bob}};
    json rows = json::array();
    for (const auto& r : resource_rows(max_bob))
        rows.push_back({{"bob", r.bob},
                        {"discord_available", r.discord_available},
                        {"concurrence_available", r.concurrence_available},
                        {"discord_after", r.discord_after},
                        {"concurrence_after", r.concurrence_after},
                        {"after_feasible", r.after_feasible}});
    j["rows"] = rows;
    return j;
}

// --- monte carlo ---------------------------------------------------------------

inline json montecarlo_json(const ProtocolConfig& cfg, const SharpnessChain& chain, long trials,
                            std::uint64_t seed) {
    const TrajectoryRun run = simulate(cfg, chain, trials, seed);
    json j = tool_header("montecarlo");
    j["parameters"] = {{"family", family_to_string(cfg.family)},
                       {"theta", cfg.theta},
                       {"target", cfg.target == Target::Psi ? "psi" : "psi-perp"},
                       {"lambdas", chain},
                       {"trials", trials},
                       {"seed", seed}};
    json rows = json::array();
    for (const auto& st : run.per_bob) {
        const double analytic = average_fidelity(cfg, chain, st.bob);
        const double z = st.std_error > 0.0 ? (st.mean - analytic) / st.std_error : 0.0;
        rows.push_back({{"bob", st.bob},
                        {"mean", st.mean},
                        {"std_error", st.std_error},
                        {"plus_fraction", st.plus_fraction},
                        {"analytic", analytic},
                        {"z", z}});
    }
    j["results"] = rows;
    return j;
}

inline json montecarlo_panel_json(long trials, std::uint64_t seed) {
    json j = tool_header("montecarlo");
    j["parameters"] = {{"panel", true}, {"trials", trials}, {"seed", seed}};
    json rows = json::array();
    int idx = 0;
    for (const auto& [cfg, chain] : regression_panel()) {
        const TrajectoryRun run = simulate(cfg, chain, trials, splitmix64(seed) + idx);
        double worst_z = 0.0;
        for (const auto& st : run.per_bob) {
            const double analytic = average_fidelity(cfg, chain, st.bob);
            const double z = st.std_error > 0.0 ? (st.mean - analytic) / st.std_error : 0.0;
            if (std::abs(z) > std::abs(worst_z)) worst_z = z;
        }
        rows.push_back({{"config", family_to_string(cfg.family)},
                        {"theta", cfg.theta},
                        {"lambdas", chain},
                        {"worst_z", worst_z}});
        ++idx;
    }
    j["results"] = rows;
    return j;
}

// --- driver --------------------------------------------------------------------

inline void write_output(const std::string& data, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << data;
        if (!data.empty() && data.back() != '\n') std::cout << '\n';
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(out_path);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open output file " + tmp.string());
        f << data;
        if (!data.empty() && data.back() != '\n') f << '\n';
    }
    fs::rename(tmp, target);
}

inline int run_cli(int argc, const char* const* argv) {
    CLI::App app{"sequential remote state preparation calculator"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    app.require_subcommand(1);

    std::string format;
    std::string out_path;
    bool degrees = false;
    app.add_option("--format", format, "output format: csv or json");
    app.add_option("--out", out_path, "write output to a file (atomically)");
    app.add_flag("--deg", degrees, "interpret angle arguments as degrees");

    // classical-bound
    auto* cmd_bound = app.add_subcommand("classical-bound", "classical fidelity ceiling");
    std::optional<double> cb_theta;
    std::string cb_sweep;
    cmd_bound->add_option("--theta", cb_theta, "single polar angle");
    cmd_bound->add_option("--sweep", cb_sweep, "start:stop:step sweep (default 0:pi:0.01)");

    // cascade
    auto* cmd_cascade = app.add_subcommand("cascade", "per-observer fidelity report");
    std::string ca_family = "singlet", ca_lambdas, ca_target = "psi";
    double ca_theta = kPi / 2.0;
    cmd_cascade->add_option("--family", ca_family, "singlet | bell:K | nonmax:XI | werner:C | belldiag:C1,C2,C3");
    cmd_cascade->add_option("--theta", ca_theta, "polar angle of the target circle");
    cmd_cascade->add_option("--lambdas", ca_lambdas, "comma-separated sharpness chain")->required();
    cmd_cascade->add_option("--target", ca_target, "psi | psi-perp");

    // table
    auto* cmd_table = app.add_subcommand("table", "feasibility tables");
    std::string tb_which;
    cmd_table->add_option("--which", tb_which, "I | II | III | IV | B")->required();

    // resources
    auto* cmd_res = app.add_subcommand("resources", "per-observer maximal discord/concurrence");
    int re_max_bob = 7;
    cmd_res->add_option("--max-bob", re_max_bob, "number of observers (1..8)");

    // montecarlo
    auto* cmd_mc = app.add_subcommand("montecarlo", "trajectory-sampling estimate");
    std::string mc_family = "singlet", mc_lambdas, mc_target = "psi";
    double mc_theta = kPi / 2.0;
    long mc_trials = 100000;
    std::optional<std::uint64_t> mc_seed;
    bool mc_panel = false;
    cmd_mc->add_option("--family", mc_family, "initial family");
    cmd_mc->add_option("--theta", mc_theta, "polar angle of the target circle");
    cmd_mc->add_option("--lambdas", mc_lambdas, "comma-separated sharpness chain");
    cmd_mc->add_option("--target", mc_target, "psi | psi-perp");
    cmd_mc->add_option("--trials", mc_trials, "trials per configuration (>= 1000)");
    cmd_mc->add_option("--seed", mc_seed, "64-bit seed; generated and echoed when absent");
    cmd_mc->add_flag("--panel", mc_panel, "run the 20-config regression panel");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    const auto rad = [&](double x) { return degrees ? x * kPi / 180.0 : x; };
    const auto parse_target = [](const std::string& t) {
        if (t == "psi") return Target::Psi;
        if (t == "psi-perp" || t == "psi_perp") return Target::PsiPerp;
        throw std::invalid_argument("--target must be psi or psi-perp");
    };

    try {
        const int nodes = quad_nodes_from_env();
        const bool want_json_default_csv = (format == "json");
        if (!format.empty() && format != "csv" && format != "json")
            throw std::invalid_argument("--format must be csv or json");

        if (*cmd_bound) {
            std::vector<double> thetas;
            if (cb_theta && !cb_sweep.empty())
                throw std::invalid_argument("classical-bound: give --theta or --sweep, not both");
            if (cb_theta) {
                thetas.push_back(rad(*cb_theta));
            } else {
                Sweep s = cb_sweep.empty() ? Sweep{} : parse_sweep(cb_sweep);
                if (degrees && !cb_sweep.empty()) {
                    s.start = rad(s.start);
                    s.stop = rad(s.stop);
                    s.step = rad(s.step);
                }
                thetas = sweep_values(s);
            }
            write_output(want_json_default_csv ? classical_bound_json(thetas).dump(2)
                                               : classical_bound_csv(thetas),
                         out_path);
        } else if (*cmd_cascade) {
            const ProtocolConfig cfg{parse_family(ca_family), rad(ca_theta),
                                     parse_target(ca_target)};
            const SharpnessChain chain = parse_lambdas(ca_lambdas);
            const bool csv = (format == "csv");
            write_output(csv ? cascade_csv(cfg, chain, nodes)
                             : cascade_json(cfg, chain, nodes).dump(2),
                         out_path);
        } else if (*cmd_table) {
            write_output(want_json_default_csv ? table_json(tb_which).dump(2)
                                               : table_csv(tb_which),
                         out_path);
        } else if (*cmd_res) {
            write_output(want_json_default_csv ? resources_json(re_max_bob).dump(2)
                                               : resources_csv(re_max_bob),
                         out_path);
        } else if (*cmd_mc) {
            if (format == "csv")
                throw std::invalid_argument("montecarlo: JSON output only");
            std::uint64_t seed;
            if (mc_seed) {
                seed = *mc_seed;
            } else {
                std::random_device rd;
                seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
                std::cerr << "note: no --seed given, using " << seed << "\n";
            }
            json j;
            if (mc_panel) {
                j = montecarlo_panel_json(mc_trials, seed);
            } else {
                if (mc_lambdas.empty())
                    throw std::invalid_argument("montecarlo: --lambdas required without --panel");
                const ProtocolConfig cfg{parse_family(mc_family), rad(mc_theta),
                                         parse_target(mc_target)};
                j = montecarlo_json(cfg, parse_lambdas(mc_lambdas), mc_trials, seed);
            }
            write_output(j.dump(2), out_path);
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace seqrsp::cli
