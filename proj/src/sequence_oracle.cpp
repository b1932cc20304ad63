#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "gridsentinel/fault.hpp"

namespace gridsentinel {

namespace {

enum class Seq { Zero, Positive, Negative };

// Sequence-network nodal matrix with `spec.line` split at `spec.d`; the extra node is last.
Eigen::MatrixXcd sequence_network(const NetworkModel& net, const PowerFlowSolution& pf,
                                  const FaultSpec& spec, Seq seq) {
    const int n = net.bus_count();
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n + 1, n + 1);
    auto series = [&](int i, int k, Complex ys) {
        y(i, i) += ys;
        y(k, k) += ys;
        y(i, k) -= ys;
        y(k, i) -= ys;
    };
    for (const Line& l : net.lines) {
        if (!l.in_service) continue;
        const Complex z = seq == Seq::Zero ? l.z0() : l.z1();
        const Complex half = seq == Seq::Zero ? Complex(0.0, 0.0) : Complex(0.0, 0.5 * l.b1);
        if (l.id == spec.line) {
            series(l.from, n, 1.0 / (spec.d * z));
            series(n, l.to, 1.0 / ((1.0 - spec.d) * z));
            y(l.from, l.from) += spec.d * half;
            y(n, n) += spec.d * half + (1.0 - spec.d) * half;
            y(l.to, l.to) += (1.0 - spec.d) * half;
        } else {
            series(l.from, l.to, 1.0 / z);
            y(l.from, l.from) += half;
            y(l.to, l.to) += half;
        }
    }
    for (const Bus& b : net.buses) y(b.id, b.id) += std::conj(b.load) / std::norm(pf.v[b.id]);
    for (const GeneratorDynamic& g : net.gens) {
        switch (seq) {
            case Seq::Positive: y(g.bus, g.bus) += 1.0 / Complex(0.0, g.x1s); break;
            case Seq::Negative: y(g.bus, g.bus) += 1.0 / Complex(0.0, g.x2); break;
            case Seq::Zero:
                if (g.grounded) y(g.bus, g.bus) += 1.0 / Complex(0.0, g.x0);
                break;
        }
    }
    return y;
}

// Which phase plays the role of "a" in the textbook closed forms, and the canonical type.
struct Canonical {
    FaultType type;
    int rotation;
};

Canonical canonicalize(FaultType t) {
    switch (t) {
        case FaultType::AG: return {FaultType::AG, 0};
        case FaultType::BG: return {FaultType::AG, 1};
        case FaultType::CG: return {FaultType::AG, 2};
        case FaultType::BC: return {FaultType::BC, 0};
        case FaultType::AC: return {FaultType::BC, 1};
        case FaultType::AB: return {FaultType::BC, 2};
        case FaultType::BCG: return {FaultType::BCG, 0};
        case FaultType::ACG: return {FaultType::BCG, 1};
        case FaultType::ABG: return {FaultType::BCG, 2};
        case FaultType::ABCG: return {FaultType::ABCG, 0};
    }
    return {t, 0};
}

}  // namespace

Phasor3 sequence_fault_currents(FaultType canonical, Complex v_pre, Complex z1, Complex z2,
                                Complex z0, double zf, Phasor3* i_seq) {
    Complex i0 = 0.0, i1 = 0.0, i2 = 0.0;
    switch (canonical) {
        case FaultType::AG:
            i1 = v_pre / (z1 + z2 + z0 + 3.0 * zf);
            i2 = i0 = i1;
            break;
        case FaultType::BC:
            i1 = v_pre / (z1 + z2 + zf);
            i2 = -i1;
            break;
        case FaultType::BCG: {
            // Each faulted phase grounded through its own zf: zf adds to every sequence path.
            const Complex a1 = z1 + zf, a2 = z2 + zf, a0 = z0 + zf;
            i1 = v_pre / (a1 + a2 * a0 / (a2 + a0));
            i2 = -i1 * a0 / (a2 + a0);
            i0 = -i1 * a2 / (a2 + a0);
            break;
        }
        case FaultType::ABCG:
            i1 = v_pre / (z1 + zf);
            break;
        default:
            throw ValidationError("sequence_fault_currents expects a canonical fault type");
    }
    if (i_seq) *i_seq = {i0, i1, i2};
    const Eigen::Vector3cd abc = sequence_matrix() * Eigen::Vector3cd(i0, i1, i2);
    return {abc[0], abc[1], abc[2]};
}

SequenceOracleResult sequence_oracle(const NetworkModel& net, const PowerFlowSolution& pf,
                                     const FaultSpec& spec) {
    const int n = net.bus_count();
    const Eigen::MatrixXcd y1 = sequence_network(net, pf, spec, Seq::Positive);
    const Eigen::MatrixXcd y2 = sequence_network(net, pf, spec, Seq::Negative);
    const Eigen::MatrixXcd y0 = sequence_network(net, pf, spec, Seq::Zero);

    // Norton sources: machine current at the operating point plus V/(j x1s).
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v[i] = pf.v[i];
    const Eigen::VectorXcd through_lines = build_ybus(net, SequenceDomain::Positive) * v;
    Eigen::VectorXcd src = Eigen::VectorXcd::Zero(n + 1);
    for (const GeneratorDynamic& g : net.gens) {
        const Bus& b = net.buses[g.bus];
        const Complex load_current = std::conj(b.load) / std::norm(pf.v[g.bus]) * v[g.bus];
        src[g.bus] += through_lines[g.bus] + load_current + v[g.bus] / Complex(0.0, g.x1s);
    }

    Eigen::VectorXcd unit = Eigen::VectorXcd::Zero(n + 1);
    unit[n] = 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu1(y1), lu2(y2), lu0(y0);

    SequenceOracleResult r;
    r.v_pre = lu1.solve(src)[n];
    r.z1 = lu1.solve(unit)[n];
    r.z2 = lu2.solve(unit)[n];
    r.z0 = lu0.solve(unit)[n];

    const double zf = std::max(spec.zf, kMinFaultImpedance);
    const Canonical c = canonicalize(spec.type);
    // Relabel phases so the special phase sits in position a; positive-sequence
    // quantities referenced to phase k are rotated by a^-k.
    const Complex shift = std::polar(1.0, -2.0 * std::numbers::pi / 3.0 * c.rotation);
    const Complex v_ref = r.v_pre * shift;
    Phasor3 i_seq{};
    const Phasor3 rotated = sequence_fault_currents(c.type, v_ref, r.z1, r.z2, r.z0, zf, &i_seq);
    r.i_seq = i_seq;
    r.v_seq = {-r.z0 * i_seq[0], v_ref - r.z1 * i_seq[1], -r.z2 * i_seq[2]};
    for (int p = 0; p < 3; ++p) r.i_phase[(p + c.rotation) % 3] = rotated[p];
    return r;
}

}  // namespace gridsentinel
