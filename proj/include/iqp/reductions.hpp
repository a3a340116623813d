#pragma once

#include <complex>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "iqp/errors.hpp"
#include "iqp/gf2.hpp"
#include "iqp/simulator.hpp"
#include "iqp/xprogram.hpp"

namespace iqp {

// The §5-style architecture reductions: Z-networks (CNOT + X + Z-rotations
// with Hadamard-basis input/output) and Graph-programs (graph state plus
// fixed single-qubit measurements), with the transformations between them
// and X-programs, certified by a dense statevector oracle.

struct CNotGate {
    std::size_t control = 0;
    std::size_t target = 0;
};

struct XGate {
    std::size_t qubit = 0;
};

struct ZRotationGate {
    Action theta;
    std::size_t qubit = 0;
};

using ZNetworkGate = std::variant<CNotGate, XGate, ZRotationGate>;

struct ZNetwork {
    std::size_t n = 0;
    std::vector<ZNetworkGate> gates;
};

/// Measurement label for one graph vertex: Hadamard (primal qubits) or an
/// X-rotation by theta (ancilla qubits).
struct VertexLabel {
    bool hadamard = true;
    Action theta;
};

struct GraphProgram {
    std::size_t vertex_count = 0;
    std::size_t primal_count = 0;  // vertices [0, primal_count) are primal
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::vector<VertexLabel> labels;
};

/// Classical post-processing: y = map·xᵀ, then keep the listed coordinates.
/// The map is invertible, so it loses nothing before the projection.
struct PostProcess {
    BitMatrix map;
    std::vector<std::size_t> keep;

    BitVector apply(const BitVector& x) const {
        if (x.size() != map.col_count()) {
            throw std::invalid_argument("postprocess: sample width mismatch");
        }
        BitVector mapped = map.mul_vec(x);
        BitVector out(keep.size());
        for (std::size_t i = 0; i < keep.size(); i++) {
            out.set(i, mapped.get(keep[i]));
        }
        return out;
    }
};

inline BitVector apply_postprocess(const PostProcess& pp, const BitVector& x) {
    return pp.apply(x);
}

inline SampleSet apply_postprocess(const PostProcess& pp, const SampleSet& samples) {
    SampleSet out;
    out.n = pp.keep.size();
    out.samples.reserve(samples.samples.size());
    for (const BitVector& x : samples.samples) {
        out.samples.push_back(pp.apply(x));
    }
    return out;
}

/// Exact distribution pushforward through a post-process map.
inline OutputDistribution pushforward(const PostProcess& pp, const OutputDistribution& dist) {
    std::size_t out_n = pp.keep.size();
    std::vector<double> probs(std::size_t{1} << out_n, 0.0);
    for (std::uint64_t x = 0; x < dist.size(); x++) {
        BitVector mapped = pp.apply(index_to_bits(x, dist.qubits()));
        probs[bits_to_index(mapped)] += dist.prob(x);
    }
    return OutputDistribution::from_probs(out_n, std::move(probs));
}

/// One phase gadget per program element: cascade CNOTs from the row support
/// onto a pivot, rotate, uncompute. Empty rows contribute only global phase
/// and are skipped. Gate count per row is 2·wt(p) - 1.
inline ZNetwork xprogram_to_znetwork(const XProgram& prog) {
    ZNetwork net;
    net.n = prog.n;
    for (const XProgramElement& el : prog.elements) {
        std::vector<std::size_t> support;
        for (std::size_t j = 0; j < prog.n; j++) {
            if (el.row.get(j)) {
                support.push_back(j);
            }
        }
        if (support.empty()) {
            continue;
        }
        std::size_t pivot = support[0];
        for (std::size_t i = 1; i < support.size(); i++) {
            net.gates.push_back(CNotGate{support[i], pivot});
        }
        net.gates.push_back(ZRotationGate{el.theta, pivot});
        for (std::size_t i = support.size(); i > 1; i--) {
            net.gates.push_back(CNotGate{support[i - 1], pivot});
        }
    }
    return net;
}

/// Sweeps the gate list keeping two linear frames: each Z-rotation at qubit j
/// becomes the element (θ, z_frame row j); each X gate is a Z-type phase in
/// the measured frame, which commutes to the input state by negating θ on
/// every earlier element whose row meets the gate's x_frame row oddly. The
/// leftover CNOT layer becomes the classical post-map (same CNOTs, directions
/// reversed, original order).
inline std::pair<XProgram, PostProcess> znetwork_to_xprogram(const ZNetwork& net) {
    std::size_t n = net.n;
    BitMatrix z_frame = BitMatrix::identity(n);
    BitMatrix x_frame = BitMatrix::identity(n);
    BitMatrix post_map = BitMatrix::identity(n);
    XProgram prog;
    prog.n = n;
    for (const ZNetworkGate& gate : net.gates) {
        if (const auto* cnot = std::get_if<CNotGate>(&gate)) {
            if (cnot->control >= n || cnot->target >= n || cnot->control == cnot->target) {
                throw std::invalid_argument("znetwork: bad CNOT operands");
            }
            z_frame.row(cnot->target) ^= z_frame.row(cnot->control);
            x_frame.row(cnot->control) ^= x_frame.row(cnot->target);
            // Hadamard conjugation reverses the direction on classical bits.
            post_map.row(cnot->control) ^= post_map.row(cnot->target);
        } else if (const auto* rot = std::get_if<ZRotationGate>(&gate)) {
            if (rot->qubit >= n) {
                throw std::invalid_argument("znetwork: bad rotation qubit");
            }
            prog.elements.push_back({rot->theta, z_frame.row(rot->qubit)});
        } else if (const auto* x = std::get_if<XGate>(&gate)) {
            if (x->qubit >= n) {
                throw std::invalid_argument("znetwork: bad X qubit");
            }
            const BitVector& w = x_frame.row(x->qubit);
            for (XProgramElement& el : prog.elements) {
                if (el.row.dot(w)) {
                    el.theta = el.theta.negated();
                }
            }
        }
    }
    PostProcess pp;
    pp.map = post_map;
    pp.keep.resize(n);
    for (std::size_t i = 0; i < n; i++) {
        pp.keep[i] = i;
    }
    return {std::move(prog), std::move(pp)};
}

/// Bipartite graph construction: one primal vertex per qubit (Hadamard
/// label), one ancilla per program element (X-rotation label), an edge
/// wherever the element's row has a 1. Post-process: classical CNOT from each
/// ancilla into its neighbouring primal bits, then drop the ancillas.
inline std::pair<GraphProgram, PostProcess> xprogram_to_graphprogram(const XProgram& prog) {
    std::size_t n = prog.n;
    std::size_t k = prog.elements.size();
    GraphProgram gp;
    gp.vertex_count = n + k;
    gp.primal_count = n;
    gp.labels.assign(n + k, VertexLabel{true, Action()});
    for (std::size_t i = 0; i < k; i++) {
        gp.labels[n + i] = VertexLabel{false, prog.elements[i].theta};
        for (std::size_t j = 0; j < n; j++) {
            if (prog.elements[i].row.get(j)) {
                gp.edges.emplace_back(j, n + i);
            }
        }
    }
    PostProcess pp;
    pp.map = BitMatrix::identity(n + k);
    for (const auto& [u, v] : gp.edges) {
        pp.map.row(u) ^= pp.map.row(v);
    }
    pp.keep.resize(n);
    for (std::size_t j = 0; j < n; j++) {
        pp.keep[j] = j;
    }
    return {std::move(gp), std::move(pp)};
}

namespace detail {

class StateVector {
  public:
    StateVector(std::size_t qubits, std::size_t cap) : qubits_(qubits) {
        if (qubits > cap) {
            throw InfeasibleError("statevector infeasible: " + std::to_string(qubits) +
                                  " qubits exceeds cap " + std::to_string(cap));
        }
        amps_.assign(std::size_t{1} << qubits, {0.0, 0.0});
        amps_[0] = {1.0, 0.0};
    }

    std::size_t qubits() const { return qubits_; }

    void hadamard(std::size_t q) {
        const double inv_sqrt2 = 0.7071067811865475244;
        std::uint64_t bit = std::uint64_t{1} << q;
        for (std::uint64_t i = 0; i < amps_.size(); i++) {
            if ((i & bit) == 0) {
                std::complex<double> a = amps_[i];
                std::complex<double> b = amps_[i | bit];
                amps_[i] = (a + b) * inv_sqrt2;
                amps_[i | bit] = (a - b) * inv_sqrt2;
            }
        }
    }

    void hadamard_all() {
        for (std::size_t q = 0; q < qubits_; q++) {
            hadamard(q);
        }
    }

    void x(std::size_t q) {
        std::uint64_t bit = std::uint64_t{1} << q;
        for (std::uint64_t i = 0; i < amps_.size(); i++) {
            if ((i & bit) == 0) {
                std::swap(amps_[i], amps_[i | bit]);
            }
        }
    }

    void cnot(std::size_t control, std::size_t target) {
        std::uint64_t cbit = std::uint64_t{1} << control;
        std::uint64_t tbit = std::uint64_t{1} << target;
        for (std::uint64_t i = 0; i < amps_.size(); i++) {
            if ((i & cbit) != 0 && (i & tbit) == 0) {
                std::swap(amps_[i], amps_[i | tbit]);
            }
        }
    }

    void cz(std::size_t a, std::size_t b) {
        std::uint64_t mask = (std::uint64_t{1} << a) | (std::uint64_t{1} << b);
        for (std::uint64_t i = 0; i < amps_.size(); i++) {
            if ((i & mask) == mask) {
                amps_[i] = -amps_[i];
            }
        }
    }

    /// e^{iθZ}: phase e^{iθ} on |0⟩, e^{-iθ} on |1⟩.
    void rz(const Action& theta, std::size_t q) {
        std::complex<double> plus = unit_phase(theta, 1);
        std::complex<double> minus = unit_phase(theta, -1);
        std::uint64_t bit = std::uint64_t{1} << q;
        for (std::uint64_t i = 0; i < amps_.size(); i++) {
            amps_[i] *= (i & bit) ? minus : plus;
        }
    }

    /// e^{iθX} = cos θ · I + i sin θ · X.
    void rx(const Action& theta, std::size_t q) {
        std::complex<double> u = unit_phase(theta, 1);
        double c = u.real();
        std::complex<double> is{0.0, u.imag()};
        std::uint64_t bit = std::uint64_t{1} << q;
        for (std::uint64_t i = 0; i < amps_.size(); i++) {
            if ((i & bit) == 0) {
                std::complex<double> a = amps_[i];
                std::complex<double> b = amps_[i | bit];
                amps_[i] = c * a + is * b;
                amps_[i | bit] = is * a + c * b;
            }
        }
    }

    OutputDistribution measure_all() const {
        std::vector<double> probs(amps_.size());
        for (std::size_t i = 0; i < amps_.size(); i++) {
            probs[i] = std::norm(amps_[i]);
        }
        return OutputDistribution::from_probs(qubits_, std::move(probs));
    }

  private:
    std::size_t qubits_;
    std::vector<std::complex<double>> amps_;
};

}  // namespace detail

/// Dense statevector oracle for Z-networks: Hadamard-basis input and output.
inline OutputDistribution simulate_znetwork(const ZNetwork& net, std::size_t cap = 20) {
    detail::StateVector sv(net.n, cap);
    sv.hadamard_all();
    for (const ZNetworkGate& gate : net.gates) {
        if (const auto* cnot = std::get_if<CNotGate>(&gate)) {
            sv.cnot(cnot->control, cnot->target);
        } else if (const auto* rot = std::get_if<ZRotationGate>(&gate)) {
            sv.rz(rot->theta, rot->qubit);
        } else if (const auto* x = std::get_if<XGate>(&gate)) {
            sv.x(x->qubit);
        }
    }
    sv.hadamard_all();
    return sv.measure_all();
}

/// Dense statevector oracle for Graph-programs: |+...+⟩, CZ per edge, one
/// labelled rotation per vertex, computational-basis readout.
inline OutputDistribution simulate_graphprogram(const GraphProgram& gp, std::size_t cap = 20) {
    detail::StateVector sv(gp.vertex_count, cap);
    sv.hadamard_all();
    for (const auto& [u, v] : gp.edges) {
        if (u >= gp.vertex_count || v >= gp.vertex_count || u == v) {
            throw std::invalid_argument("graph program: bad edge");
        }
        sv.cz(u, v);
    }
    if (gp.labels.size() != gp.vertex_count) {
        throw std::invalid_argument("graph program: label count mismatch");
    }
    for (std::size_t v = 0; v < gp.vertex_count; v++) {
        if (gp.labels[v].hadamard) {
            sv.hadamard(v);
        } else {
            sv.rx(gp.labels[v].theta, v);
        }
    }
    return sv.measure_all();
}

// --- text formats ---

inline void write_znetwork(std::ostream& out, const ZNetwork& net) {
    out << "qubits " << net.n << "\n";
    for (const ZNetworkGate& gate : net.gates) {
        if (const auto* cnot = std::get_if<CNotGate>(&gate)) {
            out << "CNOT " << cnot->control << " " << cnot->target << "\n";
        } else if (const auto* rot = std::get_if<ZRotationGate>(&gate)) {
            out << "RZ " << rot->theta.to_string() << " " << rot->qubit << "\n";
        } else if (const auto* x = std::get_if<XGate>(&gate)) {
            out << "X " << x->qubit << "\n";
        }
    }
}

inline ZNetwork read_znetwork(std::istream& in) {
    ZNetwork net;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line.starts_with("#")) {
            continue;
        }
        std::istringstream fields(line);
        std::string kind;
        fields >> kind;
        if (kind == "qubits") {
            fields >> net.n;
            have_header = true;
        } else if (kind == "CNOT") {
            CNotGate g;
            fields >> g.control >> g.target;
            net.gates.push_back(g);
        } else if (kind == "RZ") {
            std::string angle;
            std::size_t q = 0;
            fields >> angle >> q;
            net.gates.push_back(ZRotationGate{Action::parse(angle), q});
        } else if (kind == "X") {
            XGate g;
            fields >> g.qubit;
            net.gates.push_back(g);
        } else {
            throw ParseError("znetwork: unknown gate kind '" + kind + "'");
        }
        if (fields.fail()) {
            throw ParseError("znetwork: malformed line '" + line + "'");
        }
    }
    if (!have_header) {
        throw ParseError("znetwork: missing qubits line");
    }
    return net;
}

inline void write_graphprogram(std::ostream& out, const GraphProgram& gp) {
    out << "vertices " << gp.vertex_count << " primal " << gp.primal_count << "\n";
    for (const auto& [u, v] : gp.edges) {
        out << "edge " << u << " " << v << "\n";
    }
    for (std::size_t v = 0; v < gp.vertex_count; v++) {
        if (gp.labels[v].hadamard) {
            out << "label " << v << " H\n";
        } else {
            out << "label " << v << " RX " << gp.labels[v].theta.to_string() << "\n";
        }
    }
}

inline GraphProgram read_graphprogram(std::istream& in) {
    GraphProgram gp;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line.starts_with("#")) {
            continue;
        }
        std::istringstream fields(line);
        std::string kind;
        fields >> kind;
        if (kind == "vertices") {
            std::string primal_kw;
            fields >> gp.vertex_count >> primal_kw >> gp.primal_count;
            if (primal_kw != "primal") {
                throw ParseError("graph program: malformed vertices line");
            }
            gp.labels.assign(gp.vertex_count, VertexLabel{true, Action()});
            have_header = true;
        } else if (kind == "edge") {
            std::size_t u = 0;
            std::size_t v = 0;
            fields >> u >> v;
            gp.edges.emplace_back(u, v);
        } else if (kind == "label") {
            std::size_t v = 0;
            std::string label_kind;
            fields >> v >> label_kind;
            if (v >= gp.labels.size()) {
                throw ParseError("graph program: label for unknown vertex");
            }
            if (label_kind == "H") {
                gp.labels[v] = VertexLabel{true, Action()};
            } else if (label_kind == "RX") {
                std::string angle;
                fields >> angle;
                gp.labels[v] = VertexLabel{false, Action::parse(angle)};
            } else {
                throw ParseError("graph program: unknown label kind");
            }
        } else {
            throw ParseError("graph program: unknown line kind '" + kind + "'");
        }
        if (fields.fail()) {
            throw ParseError("graph program: malformed line '" + line + "'");
        }
    }
    if (!have_header) {
        throw ParseError("graph program: missing vertices line");
    }
    return gp;
}

}  // namespace iqp
