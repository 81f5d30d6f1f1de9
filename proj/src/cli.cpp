#include "qspan/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qspan/circuit.hpp"
#include "qspan/common.hpp"
#include "qspan/dense.hpp"
#include "qspan/examples.hpp"
#include "qspan/group.hpp"
#include "qspan/pauli.hpp"
#include "qspan/povm.hpp"
#include "qspan/search.hpp"

namespace qspan {

namespace {

using json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const RunConfig& cfg, const std::string& payload) {
    if (cfg.out.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(cfg.out, std::ios::binary);
    if (!out) throw error("cannot write " + cfg.out);
    out << payload;
}

// Full resolved config, embedded in every output for reproducibility.
json config_json(const RunConfig& cfg) {
    json j;
    j["command"] = cfg.command;
    j["input"] = cfg.input;
    j["split"] = cfg.split;
    j["ancilla"] = cfg.ancilla;
    j["out"] = cfg.out;
    j["format"] = cfg.format;
    j["oracle"] = cfg.oracle;
    j["seed"] = cfg.seed;
    j["dense_cap"] = cfg.dense_cap;
    j["shard"] = cfg.shard;
    j["filter"] = cfg.filter;
    return j;
}

PauliSubgroup computational_basis(int n) {
    std::vector<PauliString> gens;
    for (int q = 0; q < n; ++q) gens.push_back(PauliString(n, 0, std::uint64_t(1) << q, 0));
    return canonicalize(gens, n, true);
}

// Circuit files start with a `qubits n m` header; group files are Pauli lines.
bool looks_like_circuit(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string tok;
        if (ls >> tok) return tok == "qubits";
    }
    return false;
}

// Dense state file: {"n": w, "amp": [[re, im], ...]} with 2^w rows.
DenseState load_state_json(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw parse_error(path + ": " + e.what(), 0);
    }
    if (!j.is_object() || !j.contains("n") || !j.contains("amp"))
        throw parse_error(path + ": state file needs keys \"n\" and \"amp\"", 0);
    int w = j["n"].get<int>();
    if (w < 0 || w > 20) throw parse_error(path + ": state width out of range", 0);
    const auto& rows = j["amp"];
    DenseState psi(w);
    if (!rows.is_array() || rows.size() != psi.amp.size())
        throw parse_error(path + ": amp needs exactly 2^n [re, im] rows", 0);
    for (std::size_t i = 0; i < psi.amp.size(); ++i) {
        const auto& row = rows[i];
        if (!row.is_array() || row.size() != 2)
            throw parse_error(path + ": amp rows are [re, im] pairs", 0);
        psi.amp[i] = cplx(row[0].get<double>(), row[1].get<double>());
    }
    return psi;
}

// Mini-language: stab:<file>, T^<k>, dense:<file>, generic. `auto` gives the
// all-|0> stabilizer ancilla for circuit inputs and is rejected for group
// inputs with m > 0 (the ancilla state is not implied by a group file).
AncillaSpec parse_ancilla(const std::string& token, int m, bool circuit_input) {
    if (token == "auto") {
        if (circuit_input || m == 0)
            return AncillaSpec::stabilizer(computational_basis(m));
        throw error("group inputs need an explicit --ancilla (stab:<file>, T^<k>, dense:<file>, "
                    "or generic)");
    }
    if (token.rfind("stab:", 0) == 0) {
        auto loaded = load_group_text(read_file(token.substr(5)), true);
        if (loaded.group.n_qubits != m)
            throw dimension_error("ancilla group is on " +
                                  std::to_string(loaded.group.n_qubits) + " qubits, expected " +
                                  std::to_string(m));
        return AncillaSpec::stabilizer(loaded.group);
    }
    if (token.rfind("T^", 0) == 0) {
        int k = 0;
        try {
            k = std::stoi(token.substr(2));
        } catch (const std::exception&) {
            throw parse_error("bad ancilla spec '" + token + "'", 0);
        }
        if (k != m)
            throw dimension_error("T^" + std::to_string(k) + " ancilla needs an m=" +
                                  std::to_string(k) + " register, configuration has m=" +
                                  std::to_string(m));
        return AncillaSpec::magic_t_power(k);
    }
    if (token.rfind("dense:", 0) == 0) {
        DenseState psi = load_state_json(token.substr(6));
        if (psi.n_qubits != m)
            throw dimension_error("ancilla state is on " + std::to_string(psi.n_qubits) +
                                  " qubits, expected " + std::to_string(m));
        return AncillaSpec::dense_state(std::move(psi));
    }
    if (token == "generic") return AncillaSpec::generic(m);
    throw parse_error("unknown ancilla spec '" + token +
                      "' (want stab:<file>, T^<k>, dense:<file>, or generic)", 0);
}

DenseState ancilla_dense_state(const AncillaSpec& spec, std::uint64_t seed) {
    switch (spec.kind) {
        case AncillaKind::stabilizer:
            return spec.size ? stabilizer_state(spec.group, 0) : basis_state(0, 0);
        case AncillaKind::magic_t_power:
            return t_power_state(spec.size);
        case AncillaKind::dense:
            return spec.psi;
        case AncillaKind::generic: {
            Rng rng(seed);
            return random_haar_state(spec.size, rng);
        }
    }
    throw error("unreachable ancilla kind");
}

std::string render_report(const RunConfig& cfg, const EffectivePovmReport& rep) {
    if (cfg.format == "json") {
        json j;
        j["config"] = config_json(cfg);
        j["report"] = json::parse(report_to_json(rep));
        return j.dump(2) + "\n";
    }
    if (cfg.format == "csv") {
        std::ostringstream os;
        os << "# config " << config_json(cfg).dump() << "\n"
           << report_csv_header() << "\n"
           << report_csv_row(rep) << "\n";
        return os.str();
    }
    std::ostringstream os;
    os << "config: " << config_json(cfg).dump() << "\n";
    os << "s_mu: " << rep.s_mu << "\n";
    os << "ic: " << (rep.ic ? "true" : "false") << "\n";
    os << "p: " << rep.p << "\n";
    if (rep.k) os << "k: " << *rep.k << "\n";
    if (rep.free_generators) os << "free_generators: " << *rep.free_generators << "\n";
    if (!rep.pinned_generators.empty()) {
        os << "pinned:";
        for (const auto& pg : rep.pinned_generators)
            os << ' ' << (pg.sign < 0 ? '-' : '+') << pg.generator;
        os << "\n";
    }
    os << "surviving_cosets: " << rep.surviving_cosets << "\n";
    os << "killed_cosets: " << rep.killed_cosets << "\n";
    os << "bounds: lower " << rep.bounds.lower << ", upper " << rep.bounds.upper
       << ", necessary_t " << rep.bounds.necessary_t;
    if (rep.bounds.best_known) os << ", best_known " << rep.bounds.best_known;
    os << "\n";
    if (rep.oracle_checked)
        os << "oracle_checked: " << (*rep.oracle_checked ? "true" : "false") << "\n";
    for (const auto& w : rep.warnings) os << "warning: " << w << "\n";
    return os.str();
}

int cmd_analyze(const RunConfig& cfg) {
    std::string text = read_file(cfg.input);
    EffectivePovmReport rep;
    int n = 0, m = 0;
    bool circuit_input = looks_like_circuit(text);

    std::optional<DopedCircuit> circuit;
    PauliSubgroup basis;
    AncillaSpec spec;

    if (circuit_input) {
        circuit = load_circuit_text(text);
        n = circuit->n_data;
        m = circuit->n_ancilla;
        spec = parse_ancilla(cfg.ancilla, m, true);
        if (spec.kind != AncillaKind::stabilizer)
            throw error("doped circuit analysis needs a stabilizer ancilla (stab:<file> or the "
                        "default all-|0> register)");
        basis = computational_basis(n + m);
        rep = analyze_doped(*circuit, basis, spec);
    } else {
        auto loaded = load_group_text(text, true);
        basis = loaded.group;
        if (cfg.split < 0)
            throw error("group inputs need --split <n> (data-register width)");
        n = cfg.split;
        m = basis.n_qubits - n;
        if (n < 1 || m < 0) throw dimension_error("--split out of range for this group");
        spec = parse_ancilla(cfg.ancilla, m, false);
        rep = span_dimension(basis, n, spec);
    }

    int rc = 0;
    if (cfg.oracle) {
        if (n + m > cfg.dense_cap) {
            std::cerr << "error: refusing dense cross-check at 2^" << (n + m)
                      << " dimensions (over --dense-cap " << cfg.dense_cap << ")\n";
            return 1;
        }
        std::uint64_t oracle_val = 0;
        if (circuit_input) {
            oracle_val = dense_s_mu_for_doped(*circuit, basis, spec);
        } else {
            Rng rng(cfg.seed);
            oracle_val = dense_s_mu_for_group(basis, n, spec, &rng);
        }
        rep.oracle_checked = (oracle_val == rep.s_mu);
        if (!*rep.oracle_checked) {
            std::cerr << "error: oracle mismatch, engine " << rep.s_mu << " vs dense "
                      << oracle_val << "\n";
            rc = 1;
        }
    }

    write_output(cfg, render_report(cfg, rep));
    return rc;
}

int cmd_examples(const RunConfig& cfg) {
    auto results = run_examples(cfg.filter);
    int failed = 0;
    for (const auto& r : results)
        if (!r.pass) ++failed;

    if (cfg.format == "json") {
        json j;
        j["config"] = config_json(cfg);
        j["results"] = json::array();
        for (const auto& r : results) {
            json e;
            e["name"] = r.name;
            e["pass"] = r.pass;
            e["expected"] = r.expected;
            e["observed"] = r.observed;
            j["results"].push_back(e);
        }
        j["passed"] = results.size() - std::size_t(failed);
        j["failed"] = failed;
        write_output(cfg, j.dump(2) + "\n");
    } else {
        std::ostringstream os;
        for (const auto& r : results) {
            os << (r.pass ? "pass  " : "FAIL  ") << r.name << "\n";
            if (!r.pass) {
                os << "      expected: " << r.expected << "\n";
                os << "      observed: " << r.observed << "\n";
            }
        }
        os << (results.size() - std::size_t(failed)) << " passed, " << failed << " failed\n";
        write_output(cfg, os.str());
    }
    if (results.empty()) {
        std::cerr << "error: no example matches filter '" << cfg.filter << "'\n";
        return 1;
    }
    return failed == 0 ? 0 : 1;
}

ShardSpec parse_shard(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos)
        throw parse_error("--shard wants k/K, e.g. 0/4", 0);
    ShardSpec s;
    try {
        s.index = std::stoul(text.substr(0, slash));
        s.count = std::stoul(text.substr(slash + 1));
    } catch (const std::exception&) {
        throw parse_error("--shard wants k/K, e.g. 0/4", 0);
    }
    if (s.count == 0 || s.index >= s.count)
        throw parse_error("--shard index must satisfy k < K", 0);
    return s;
}

int cmd_search(const RunConfig& cfg, bool seed_given) {
    SearchTask task = task_from_json(read_file(cfg.input));
    if (!cfg.shard.empty()) task.shard = parse_shard(cfg.shard);
    if (seed_given) task.seed = cfg.seed;

    SearchReport rep = run_task(task);

    if (cfg.format == "json") {
        json j;
        j["config"] = config_json(cfg);
        j["report"] = json::parse(search_report_to_json(rep));
        write_output(cfg, j.dump(2) + "\n");
    } else if (cfg.format == "csv") {
        std::ostringstream os;
        os << "# config " << config_json(cfg).dump() << "\n" << search_histogram_csv(rep);
        write_output(cfg, os.str());
    } else {
        std::ostringstream os;
        os << "config: " << config_json(cfg).dump() << "\n";
        os << "verdict: "
           << (rep.verdict == SearchVerdict::consistent
                   ? "consistent"
                   : rep.verdict == SearchVerdict::falsified ? "falsified" : "incomplete")
           << "\n";
        os << "examined: " << rep.examined << "\n";
        os << "complete: " << (rep.complete ? "true" : "false") << "\n";
        for (const auto& bin : rep.histogram)
            os << "s_mu " << bin.s_mu << ": " << bin.count << "\n";
        for (const auto& note : rep.notes) os << "note: " << note << "\n";
        os << "witnesses: " << rep.witnesses.size() << "\n";
        write_output(cfg, os.str());
    }
    std::cerr << "search finished in " << rep.seconds << "s\n";
    return verdict_exit_code(rep);
}

int cmd_bounds(const RunConfig& cfg) {
    int n = cfg.n;
    int need = necessary_t(n);
    int sufficient = 2 * n;

    std::optional<std::uint64_t> bound;
    std::string bound_kind;
    std::string ic;
    if (cfg.t >= 0) {
        int t = cfg.t;
        if (t == 0) {
            bound = std::uint64_t(1) << n;
            bound_kind = "stabilizer ancillas";
        } else if (t <= n) {
            bound = bound_t_le_n(n, t);
            bound_kind = "ceiling for maximally entangled bases";
        } else {
            bound = bound_t_gt_n(n, t);
            bound_kind = "best known construction";
        }
        if (t < need)
            ic = "impossible at t=" + std::to_string(t) + " (3^t < 4^n)";
        else if (t < sufficient)
            ic = "unknown below 2n, conjectured impossible";
        else
            ic = "sufficient at t=" + std::to_string(sufficient);
    } else {
        ic = "sufficient at t=" + std::to_string(sufficient);
    }

    if (cfg.format == "json") {
        json j;
        j["config"] = config_json(cfg);
        j["n"] = n;
        if (cfg.t >= 0) j["t"] = cfg.t;
        j["necessary_t"] = need;
        j["sufficient_t"] = sufficient;
        if (bound) {
            j["bound"] = *bound;
            j["bound_kind"] = bound_kind;
        }
        j["ic"] = ic;
        write_output(cfg, j.dump(2) + "\n");
    } else {
        std::ostringstream os;
        os << "config: " << config_json(cfg).dump() << "\n";
        os << "n: " << n << "\n";
        if (cfg.t >= 0) os << "t: " << cfg.t << "\n";
        os << "necessary_t: " << need << "\n";
        os << "sufficient_t: " << sufficient << "\n";
        if (bound) os << "bound: " << *bound << " (" << bound_kind << ")\n";
        os << "ic: " << ic << "\n";
        write_output(cfg, os.str());
    }
    return 0;
}

json matrix_json(const DenseOperator& op) {
    json j;
    j["dim"] = op.dim();
    json rows = json::array();
    for (const auto& v : op.m) rows.push_back(json::array({v.real(), v.imag()}));
    j["entries"] = std::move(rows);
    return j;
}

int cmd_oracle_dump(const RunConfig& cfg) {
    if (cfg.format != "json") throw error("oracle-dump emits json only");
    std::string text = read_file(cfg.input);

    int n = 0, m = 0;
    std::vector<DenseOperator> ops;
    if (looks_like_circuit(text)) {
        DopedCircuit c = load_circuit_text(text);
        n = c.n_data;
        m = c.n_ancilla;
        if (n + m > cfg.dense_cap)
            throw size_limit_error("refusing dense dump at 2^" + std::to_string(n + m) +
                                   " dimensions (over --dense-cap " +
                                   std::to_string(cfg.dense_cap) + ")");
        AncillaSpec spec = parse_ancilla(cfg.ancilla, m, true);
        ops = effective_povm(c.gates, n, m, ancilla_dense_state(spec, cfg.seed));
    } else {
        auto loaded = load_group_text(text, true);
        if (cfg.split < 0) throw error("group inputs need --split <n> (data-register width)");
        n = cfg.split;
        m = loaded.group.n_qubits - n;
        if (n < 1 || m < 0) throw dimension_error("--split out of range for this group");
        if (n + m > cfg.dense_cap)
            throw size_limit_error("refusing dense dump at 2^" + std::to_string(n + m) +
                                   " dimensions (over --dense-cap " +
                                   std::to_string(cfg.dense_cap) + ")");
        AncillaSpec spec = parse_ancilla(cfg.ancilla, m, false);
        std::vector<DenseState> basis;
        for (std::uint64_t b = 0; b < (std::uint64_t(1) << (n + m)); ++b)
            basis.push_back(stabilizer_state(loaded.group, b));
        ops = effective_povm({}, n, m, ancilla_dense_state(spec, cfg.seed), basis);
    }

    json j;
    j["version"] = 1;
    j["config"] = config_json(cfg);
    j["n"] = n;
    j["m"] = m;
    j["elements"] = json::array();
    for (const auto& op : ops) j["elements"].push_back(matrix_json(op));
    j["frame"] = matrix_json(frame_operator_pauli_basis(ops));
    j["completeness_error"] = completeness_error(ops);
    write_output(cfg, j.dump(2) + "\n");
    return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"operator-span analysis of Clifford+T measurement schemes"};
    app.require_subcommand(1);

    auto add_io = [&](CLI::App* sub) {
        sub->add_option("--out", cfg.out, "write output to this file instead of stdout");
        return sub->add_option("--format", cfg.format, "output format: json, csv, or text")
            ->check(CLI::IsMember({"json", "csv", "text"}));
    };

    auto* analyze = app.add_subcommand("analyze", "span analysis of a circuit or group file");
    analyze->add_option("input", cfg.input, "circuit or group file")->required();
    analyze->add_option("--split", cfg.split, "data-register width n for group inputs");
    analyze->add_option("--ancilla", cfg.ancilla,
                        "ancilla spec: stab:<file>, T^<k>, dense:<file>, generic");
    analyze->add_flag("--oracle", cfg.oracle, "cross-check against the dense brute-force path");
    analyze->add_option("--dense-cap", cfg.dense_cap, "max total qubits for dense work");
    analyze->add_option("--seed", cfg.seed, "RNG seed for generic-ancilla draws");
    add_io(analyze);

    auto* examples = app.add_subcommand("examples", "run the worked-example catalog");
    examples->add_option("filter", cfg.filter, "only run cases whose name contains this");
    auto* examples_fmt = add_io(examples);

    auto* search = app.add_subcommand("search", "run a search task file");
    search->add_option("task", cfg.input, "task JSON file")->required();
    auto* seed_opt =
        search->add_option("--seed", cfg.seed, "override the seed from the task file");
    search->add_option("--shard", cfg.shard, "take shard k of K, written k/K");
    add_io(search);

    auto* bounds = app.add_subcommand("bounds", "rank bounds and IC feasibility for (n, t)");
    bounds->add_option("n", cfg.n, "data-register width")->required()->check(CLI::PositiveNumber);
    bounds->add_option("t", cfg.t, "T-gate count (omit for the t-independent rows)");
    auto* bounds_fmt = add_io(bounds);

    auto* dump = app.add_subcommand("oracle-dump", "dump dense POVM elements and frame operator");
    dump->add_option("input", cfg.input, "circuit or group file")->required();
    dump->add_option("--split", cfg.split, "data-register width n for group inputs");
    dump->add_option("--ancilla", cfg.ancilla,
                     "ancilla spec: stab:<file>, T^<k>, dense:<file>, generic");
    dump->add_option("--dense-cap", cfg.dense_cap, "max total qubits for dense work");
    dump->add_option("--seed", cfg.seed, "RNG seed for generic-ancilla draws");
    add_io(dump);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (app.got_subcommand(analyze)) {
            cfg.command = "analyze";
            return cmd_analyze(cfg);
        }
        if (app.got_subcommand(examples)) {
            cfg.command = "examples";
            if (examples_fmt->count() == 0) cfg.format = "text";
            return cmd_examples(cfg);
        }
        if (app.got_subcommand(search)) {
            cfg.command = "search";
            return cmd_search(cfg, seed_opt->count() > 0);
        }
        if (app.got_subcommand(bounds)) {
            cfg.command = "bounds";
            if (bounds_fmt->count() == 0) cfg.format = "text";
            return cmd_bounds(cfg);
        }
        if (app.got_subcommand(dump)) {
            cfg.command = "oracle-dump";
            return cmd_oracle_dump(cfg);
        }
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace qspan
