#include "qspan/circuit.hpp"

#include <algorithm>
#include <istream>
#include <sstream>

#include "qspan/common.hpp"

namespace qspan {

int DopedCircuit::t_count() const {
    return static_cast<int>(std::count_if(gates.begin(), gates.end(),
                                          [](const Gate& g) { return g.kind == GateKind::T; }));
}

namespace {

void check_gate(const Gate& g, int n) {
    if (g.q0 < 0 || g.q0 >= n) throw dimension_error("gate qubit out of range");
    if (g.kind == GateKind::CNOT) {
        if (g.q1 < 0 || g.q1 >= n) throw dimension_error("gate qubit out of range");
        if (g.q0 == g.q1) throw dimension_error("CNOT control equals target");
    }
}

}  // namespace

PauliString conjugate(const Gate& gate, const PauliString& p) {
    check_gate(gate, p.n_qubits);
    std::uint64_t x = p.x, z = p.z;
    int e = p.phase;
    switch (gate.kind) {
        case GateKind::H: {
            // Swap X and Z on the qubit; Y picks up a sign.
            std::uint64_t m = 1ull << gate.q0;
            std::uint64_t xb = x & m, zb = z & m;
            if (xb && zb) e += 2;
            x = (x & ~m) | zb;
            z = (z & ~m) | xb;
            break;
        }
        case GateKind::S: {
            // X -> Y, Y -> -X, Z -> Z. In i^e X^x Z^z form: z ^= x, e += x.
            std::uint64_t m = 1ull << gate.q0;
            if (x & m) {
                z ^= m;
                e += 1;
            }
            break;
        }
        case GateKind::CNOT: {
            // X_c -> X_c X_t, Z_t -> Z_c Z_t; no phase term in this encoding.
            std::uint64_t mc = 1ull << gate.q0, mt = 1ull << gate.q1;
            if (x & mc) x ^= mt;
            if (z & mt) z ^= mc;
            break;
        }
        case GateKind::T:
            throw non_clifford_error("cannot conjugate a Pauli through a T gate");
    }
    return PauliString(p.n_qubits, x, z, e & 3);
}

PauliString evolve_string(const std::vector<Gate>& gates, const PauliString& p,
                          EvolveDirection dir) {
    PauliString r = p;
    if (dir == EvolveDirection::forward) {
        for (const Gate& g : gates) r = conjugate(g, r);
    } else {
        for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
            switch (it->kind) {
                case GateKind::H:
                case GateKind::CNOT:
                    r = conjugate(*it, r);  // self-inverse
                    break;
                case GateKind::S:
                    // S^-1 = S S S
                    r = conjugate(*it, conjugate(*it, conjugate(*it, r)));
                    break;
                case GateKind::T:
                    throw non_clifford_error("cannot conjugate a Pauli through a T gate");
            }
        }
    }
    return r;
}

PauliSubgroup heisenberg_evolve(const std::vector<Gate>& gates, const PauliSubgroup& S,
                                EvolveDirection dir) {
    std::vector<PauliString> out;
    out.reserve(S.gens.size());
    for (const auto& g : S.gens) out.push_back(evolve_string(gates, g, dir));
    return canonicalize(out, S.n_qubits, S.with_signs);
}

GadgetizedCircuit gadgetize(const DopedCircuit& c) {
    GadgetizedCircuit out;
    out.n_data = c.n_data;
    out.n_ancilla = c.n_ancilla;
    out.t = c.t_count();
    int base = c.total_qubits();
    int next = 0;
    for (const Gate& g : c.gates) {
        if (g.kind == GateKind::T) {
            int gadget = base + next;
            out.clifford_gates.push_back(Gate::cnot(g.q0, gadget));
            out.gadget_register.push_back(gadget);
            // In the physical measurement group the gadget qubit's Z generator
            // sits after the n+m data/ancilla generators, in gadget order.
            out.fixed_syndromes.push_back({base + next, +1});
            ++next;
        } else {
            out.clifford_gates.push_back(g);
        }
    }
    return out;
}

DopedCircuit ungadgetize(const GadgetizedCircuit& g) {
    DopedCircuit out;
    out.n_data = g.n_data;
    out.n_ancilla = g.n_ancilla;
    int base = out.total_qubits();
    for (const Gate& gate : g.clifford_gates) {
        if (gate.kind == GateKind::CNOT && gate.q1 >= base) {
            out.gates.push_back(Gate::t(gate.q0));
        } else {
            out.gates.push_back(gate);
        }
    }
    return out;
}

std::vector<Gate> random_clifford(int n, std::uint64_t seed) {
    if (n < 1) throw dimension_error("random_clifford: need at least one qubit");
    Rng rng(seed);
    std::vector<Gate> gates;
    int count = 3 * n * n + 2 * n;
    gates.reserve(count);
    for (int i = 0; i < count; ++i) {
        std::uint64_t pick = rng_below(rng, n >= 2 ? 3 : 2);
        switch (pick) {
            case 0:
                gates.push_back(Gate::h(static_cast<int>(rng_below(rng, n))));
                break;
            case 1:
                gates.push_back(Gate::s(static_cast<int>(rng_below(rng, n))));
                break;
            default: {
                int c = static_cast<int>(rng_below(rng, n));
                int t = static_cast<int>(rng_below(rng, n - 1));
                if (t >= c) ++t;
                gates.push_back(Gate::cnot(c, t));
            }
        }
    }
    return gates;
}

DopedCircuit universal_2n_circuit(int n) {
    if (n < 1) throw dimension_error("universal_2n_circuit: need at least one qubit");
    DopedCircuit c;
    c.n_data = n;
    c.n_ancilla = n;
    for (int i = 0; i < n; ++i) {
        int a = n + i;
        c.gates.push_back(Gate::cnot(i, a));
        c.gates.push_back(Gate::h(a));
        c.gates.push_back(Gate::t(a));
        c.gates.push_back(Gate::h(a));
        c.gates.push_back(Gate::cnot(a, i));
        c.gates.push_back(Gate::t(i));
        c.gates.push_back(Gate::h(i));
    }
    return c;
}

DopedCircuit load_circuit(std::istream& in) {
    DopedCircuit c;
    bool have_header = false;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        auto fail = [&](const std::string& msg) {
            throw parse_error("line " + std::to_string(line_no) + ": " + msg, 0);
        };
        if (tok == "qubits") {
            if (have_header) fail("duplicate qubits header");
            if (!(ls >> c.n_data >> c.n_ancilla) || c.n_data < 0 || c.n_ancilla < 0)
                fail("qubits header needs two nonnegative integers");
            have_header = true;
            continue;
        }
        if (!have_header) fail("expected 'qubits n m' header before gates");
        int q0 = -1, q1 = -1;
        if (tok == "H" || tok == "S" || tok == "T") {
            if (!(ls >> q0)) fail("gate " + tok + " needs one qubit index");
        } else if (tok == "CNOT") {
            if (!(ls >> q0 >> q1)) fail("CNOT needs control and target");
        } else {
            fail("unknown gate '" + tok + "'");
        }
        std::string extra;
        if (ls >> extra) fail("trailing token '" + extra + "'");
        Gate g;
        if (tok == "H") g = Gate::h(q0);
        else if (tok == "S") g = Gate::s(q0);
        else if (tok == "T") g = Gate::t(q0);
        else g = Gate::cnot(q0, q1);
        try {
            check_gate(g, c.total_qubits());
        } catch (const dimension_error& e) {
            fail(e.what());
        }
        c.gates.push_back(g);
    }
    if (!have_header) throw parse_error("circuit file has no 'qubits n m' header", 0);
    return c;
}

DopedCircuit load_circuit_text(const std::string& text) {
    std::istringstream in(text);
    return load_circuit(in);
}

std::string save_circuit(const DopedCircuit& c) {
    std::ostringstream out;
    out << "qubits " << c.n_data << " " << c.n_ancilla << "\n";
    for (const Gate& g : c.gates) {
        switch (g.kind) {
            case GateKind::H: out << "H " << g.q0 << "\n"; break;
            case GateKind::S: out << "S " << g.q0 << "\n"; break;
            case GateKind::T: out << "T " << g.q0 << "\n"; break;
            case GateKind::CNOT: out << "CNOT " << g.q0 << " " << g.q1 << "\n"; break;
        }
    }
    return out.str();
}

}  // namespace qspan
