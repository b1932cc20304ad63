#include "gridsentinel/fault.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/LU>

namespace gridsentinel {

namespace {

const Complex kA = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);

Matrix3c make_sequence_matrix() {
    Matrix3c a;
    const Complex a2 = kA * kA;
    a << 1.0, 1.0, 1.0,
         1.0, a2, kA,
         1.0, kA, a2;
    return a;
}

}  // namespace

FaultType fault_type_from_class(int index) {
    if (index < 1 || index > 10) throw ValidationError("fault class index out of range: " + std::to_string(index));
    return static_cast<FaultType>(index);
}

const char* to_string(FaultType t) {
    static constexpr const char* names[] = {"AG", "BG", "CG", "ABG", "BCG", "ACG", "AB", "BC", "AC", "ABCG"};
    return names[class_index(t) - 1];
}

FaultType parse_fault_type(const std::string& s) {
    for (FaultType t : kAllFaultTypes)
        if (s == to_string(t)) return t;
    throw ValidationError("unknown fault type '" + s + "'");
}

std::array<bool, 3> faulted_phases(FaultType t) {
    switch (t) {
        case FaultType::AG: return {true, false, false};
        case FaultType::BG: return {false, true, false};
        case FaultType::CG: return {false, false, true};
        case FaultType::ABG:
        case FaultType::AB: return {true, true, false};
        case FaultType::BCG:
        case FaultType::BC: return {false, true, true};
        case FaultType::ACG:
        case FaultType::AC: return {true, false, true};
        case FaultType::ABCG: return {true, true, true};
    }
    return {false, false, false};
}

bool involves_ground(FaultType t) {
    return t != FaultType::AB && t != FaultType::BC && t != FaultType::AC;
}

const Matrix3c& sequence_matrix() {
    static const Matrix3c a = make_sequence_matrix();
    return a;
}

const Matrix3c& sequence_matrix_inverse() {
    static const Matrix3c inv = sequence_matrix().inverse();
    return inv;
}

Matrix3c sequence_to_phase(Complex y0, Complex y1, Complex y2) {
    // Closed form of A diag(y0, y1, y2) A^-1; exactly symmetric when y1 == y2.
    if (y1 == y2) {
        const Complex self = (y0 + 2.0 * y1) / 3.0;
        const Complex mutual = (y0 - y1) / 3.0;
        Matrix3c m;
        m << self, mutual, mutual,
             mutual, self, mutual,
             mutual, mutual, self;
        return m;
    }
    Eigen::Vector3cd diag(y0, y1, y2);
    return sequence_matrix() * diag.asDiagonal() * sequence_matrix_inverse();
}

Matrix3c phase_to_sequence(const Matrix3c& y_abc) {
    return sequence_matrix_inverse() * y_abc * sequence_matrix();
}

void stamp_block(Eigen::MatrixXcd& y, int row_node, int col_node, const Matrix3c& block) {
    y.block<3, 3>(3 * row_node, 3 * col_node) += block;
}

void stamp_branch(Eigen::MatrixXcd& y, const Branch& br, double sign) {
    stamp_block(y, br.from_node, br.from_node, sign * (br.y_series + br.y_shunt_from));
    stamp_block(y, br.to_node, br.to_node, sign * (br.y_series + br.y_shunt_to));
    stamp_block(y, br.from_node, br.to_node, -sign * br.y_series);
    stamp_block(y, br.to_node, br.from_node, -sign * br.y_series);
}

LinearGridModel to_phase_domain(const NetworkModel& net, const PowerFlowSolution& pf) {
    const int n = net.bus_count();
    if (static_cast<int>(pf.v.size()) != n) throw ValidationError("power-flow solution does not match network");

    LinearGridModel m;
    m.bus_count = n;
    m.y_abc = Eigen::MatrixXcd::Zero(3 * n, 3 * n);
    m.i_src = Eigen::VectorXcd::Zero(3 * n);

    for (const Line& l : net.lines) {
        if (!l.in_service) continue;
        Branch br;
        br.line = l.id;
        br.from_node = l.from;
        br.to_node = l.to;
        const Complex y1 = 1.0 / l.z1();
        br.y_series = sequence_to_phase(1.0 / l.z0(), y1, y1);
        const Complex half(0.0, 0.5 * l.b1);
        br.y_shunt_from = sequence_to_phase(0.0, half, half);
        br.y_shunt_to = br.y_shunt_from;
        stamp_branch(m.y_abc, br, 1.0);
        m.branches.push_back(br);
    }

    // Positive-sequence network current leaving each bus into the lines.
    const Eigen::MatrixXcd ybus = build_ybus(net, SequenceDomain::Positive);
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v[i] = pf.v[i];
    const Eigen::VectorXcd line_current = ybus * v;

    std::vector<Complex> y_load(n, 0.0);
    for (const Bus& b : net.buses) {
        const double vm2 = std::norm(pf.v[b.id]);
        y_load[b.id] = std::conj(b.load) / vm2;
        if (y_load[b.id] != Complex(0.0, 0.0))
            stamp_block(m.y_abc, b.id, b.id, y_load[b.id] * Matrix3c::Identity());
    }

    const Complex a2 = kA * kA;
    for (const GeneratorDynamic& g : net.gens) {
        SourceStamp s;
        s.bus = g.bus;
        const Complex y1 = 1.0 / Complex(0.0, g.x1s);
        const Complex y2 = 1.0 / Complex(0.0, g.x2);
        const Complex y0 = g.grounded ? 1.0 / Complex(0.0, g.x0) : Complex(0.0, 0.0);
        s.y = sequence_to_phase(y0, y1, y2);
        const Complex i_gen = line_current[g.bus] + y_load[g.bus] * v[g.bus];
        const Complex i_norton = i_gen + y1 * v[g.bus];
        s.i = Eigen::Vector3cd(i_norton, a2 * i_norton, kA * i_norton);
        stamp_block(m.y_abc, g.bus, g.bus, s.y);
        m.i_src.segment<3>(3 * g.bus) += s.i;
        m.sources.push_back(s);
    }
    return m;
}

SplitResult split_line(const LinearGridModel& model, int line, double d) {
    if (!(d > 0.0 && d < 1.0)) throw ValidationError("fault location must lie strictly inside (0, 1)");
    auto it = std::find_if(model.branches.begin(), model.branches.end(),
                           [&](const Branch& b) { return b.active && b.line == line; });
    if (it == model.branches.end())
        throw ValidationError("line " + std::to_string(line) + " is not in service (or already split)");

    SplitResult out{model, model.node_count()};
    LinearGridModel& m = out.model;
    Branch& original = m.branches[static_cast<size_t>(it - model.branches.begin())];
    stamp_branch(m.y_abc, original, -1.0);
    original.active = false;

    const int node = out.fault_node;
    const int old = 3 * node;
    m.y_abc.conservativeResize(old + 3, old + 3);
    m.y_abc.bottomRows(3).setZero();
    m.y_abc.rightCols(3).setZero();
    m.i_src.conservativeResize(old + 3);
    m.i_src.tail(3).setZero();
    m.fault_nodes.push_back({node, line, d});

    Branch near = original, far = original;
    near.active = far.active = true;
    near.to_node = node;
    near.y_series = original.y_series / d;
    near.y_shunt_from = original.y_shunt_from * d;
    near.y_shunt_to = original.y_shunt_from * d;
    far.from_node = node;
    far.y_series = original.y_series / (1.0 - d);
    far.y_shunt_from = original.y_shunt_to * (1.0 - d);
    far.y_shunt_to = original.y_shunt_to * (1.0 - d);
    stamp_branch(m.y_abc, near, 1.0);
    stamp_branch(m.y_abc, far, 1.0);
    m.branches.push_back(near);
    m.branches.push_back(far);
    return out;
}

LinearGridModel stamp_fault(const LinearGridModel& model, int node, FaultType type, double zf) {
    if (node < 0 || node >= model.node_count()) throw ValidationError("fault node does not exist");
    if (zf < 0.0 || !std::isfinite(zf)) throw ValidationError("fault impedance must be finite and non-negative");
    const double g = 1.0 / std::max(zf, kMinFaultImpedance);

    LinearGridModel m = model;
    auto to_ground = [&](int p) {
        m.y_abc(3 * node + p, 3 * node + p) += g;
        m.fault_elements.push_back({node, p, -1, g});
    };
    auto between = [&](int p, int q) {
        const int i = 3 * node + p, k = 3 * node + q;
        m.y_abc(i, i) += g;
        m.y_abc(k, k) += g;
        m.y_abc(i, k) -= g;
        m.y_abc(k, i) -= g;
        m.fault_elements.push_back({node, p, q, g});
    };
    switch (type) {
        case FaultType::AB: between(0, 1); break;
        case FaultType::BC: between(1, 2); break;
        case FaultType::AC: between(0, 2); break;
        default: {
            const auto phases = faulted_phases(type);
            for (int p = 0; p < 3; ++p)
                if (phases[p]) to_ground(p);
        }
    }
    return m;
}

FaultSolution solve_fault(const LinearGridModel& model) {
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(model.y_abc);
    if (!lu.isInvertible()) throw NumericalError("phase-domain admittance matrix is singular");
    FaultSolution sol;
    sol.v_abc = lu.solve(model.i_src);
    if (!sol.v_abc.allFinite()) throw NumericalError("phase-domain solve produced non-finite voltages");

    for (const FaultElement& e : model.fault_elements) {
        const Complex va = sol.v_abc[3 * e.node + e.phase];
        const Complex vb = e.other_phase < 0 ? Complex(0.0, 0.0) : sol.v_abc[3 * e.node + e.other_phase];
        sol.i_fault.push_back(e.g * (va - vb));
    }

    sol.i_inj.assign(model.bus_count, Phasor3{});
    for (const Branch& br : model.branches) {
        if (!br.active) continue;
        const Eigen::Vector3cd vf = sol.v_abc.segment<3>(3 * br.from_node);
        const Eigen::Vector3cd vt = sol.v_abc.segment<3>(3 * br.to_node);
        if (br.from_node < model.bus_count) {
            const Eigen::Vector3cd i = br.y_series * (vf - vt) + br.y_shunt_from * vf;
            for (int p = 0; p < 3; ++p) sol.i_inj[br.from_node][p] += i[p];
        }
        if (br.to_node < model.bus_count) {
            const Eigen::Vector3cd i = br.y_series * (vt - vf) + br.y_shunt_to * vt;
            for (int p = 0; p < 3; ++p) sol.i_inj[br.to_node][p] += i[p];
        }
    }
    return sol;
}

Phasor3 fault_phase_currents(const LinearGridModel& model, const FaultSolution& sol, int node) {
    Phasor3 out{};
    for (size_t k = 0; k < model.fault_elements.size(); ++k) {
        const FaultElement& e = model.fault_elements[k];
        if (e.node != node) continue;
        out[e.phase] += sol.i_fault[k];
        if (e.other_phase >= 0) out[e.other_phase] -= sol.i_fault[k];
    }
    return out;
}

FaultStudy run_fault_study(const NetworkModel& net, const PowerFlowSolution& pf,
                           std::span<const FaultSpec> faults) {
    FaultStudy study;
    study.model = to_phase_domain(net, pf);
    for (const FaultSpec& f : faults) {
        SplitResult split = split_line(study.model, f.line, f.d);
        study.model = stamp_fault(split.model, split.fault_node, f.type, f.zf);
        study.fault_nodes.push_back(split.fault_node);
    }
    study.solution = solve_fault(study.model);
    return study;
}

FaultSolution prefault_solution(const NetworkModel& net, const PowerFlowSolution& pf) {
    return solve_fault(to_phase_domain(net, pf));
}

}  // namespace gridsentinel
