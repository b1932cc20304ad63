#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridsentinel/network.hpp"
#include "gridsentinel/powerflow.hpp"

namespace gridsentinel {

/// Fault types; the underlying value is the event class index (1..10).
enum class FaultType : int { AG = 1, BG, CG, ABG, BCG, ACG, AB, BC, AC, ABCG };

inline constexpr std::array<FaultType, 10> kAllFaultTypes = {
    FaultType::AG,  FaultType::BG,  FaultType::CG, FaultType::ABG, FaultType::BCG,
    FaultType::ACG, FaultType::AB,  FaultType::BC, FaultType::AC,  FaultType::ABCG};

inline int class_index(FaultType t) { return static_cast<int>(t); }
FaultType fault_type_from_class(int index);
const char* to_string(FaultType t);
FaultType parse_fault_type(const std::string& s);

/// Phases touched by the fault, as a mask over {a, b, c}.
std::array<bool, 3> faulted_phases(FaultType t);
bool involves_ground(FaultType t);

inline constexpr double kMinFaultImpedance = 1e-6;

struct FaultSpec {
    int line = 0;
    double d = 0.5;  // fraction of the line length from the from-bus
    FaultType type = FaultType::AG;
    double zf = 0.0;  // resistive fault impedance, p.u.

    bool operator==(const FaultSpec&) const = default;
};

using Matrix3c = Eigen::Matrix3cd;
using Phasor3 = std::array<Complex, 3>;

/// A = [[1,1,1],[1,a^2,a],[1,a,a^2]]; v_abc = A v_012.
const Matrix3c& sequence_matrix();
const Matrix3c& sequence_matrix_inverse();
Matrix3c sequence_to_phase(Complex y0, Complex y1, Complex y2);
Matrix3c phase_to_sequence(const Matrix3c& y_abc);

struct Branch {
    int line = -1;
    int from_node = 0;
    int to_node = 0;
    Matrix3c y_series;
    Matrix3c y_shunt_from;
    Matrix3c y_shunt_to;
    bool active = true;
};

struct SourceStamp {
    int bus = 0;
    Matrix3c y;
    Eigen::Vector3cd i;
};

struct FaultElement {
    int node = 0;
    int phase = 0;
    int other_phase = -1;  // -1: element to ground
    double g = 0.0;
};

struct FaultNode {
    int node = 0;
    int line = 0;
    double d = 0.0;
};

/// Phase-domain network: 3 rows per node, grid buses first, then internal fault nodes.
struct LinearGridModel {
    Eigen::MatrixXcd y_abc;
    Eigen::VectorXcd i_src;
    int bus_count = 0;
    std::vector<FaultNode> fault_nodes;
    std::vector<Branch> branches;
    std::vector<SourceStamp> sources;
    std::vector<FaultElement> fault_elements;

    int node_count() const { return bus_count + static_cast<int>(fault_nodes.size()); }
};

struct FaultSolution {
    Eigen::VectorXcd v_abc;           // 3 entries per node
    std::vector<Complex> i_fault;     // one per fault element, phase -> other_phase/ground
    std::vector<Phasor3> i_inj;       // per grid bus: sum of currents leaving into branches

    Phasor3 voltage(int node) const { return {v_abc[3 * node], v_abc[3 * node + 1], v_abc[3 * node + 2]}; }
};

void stamp_block(Eigen::MatrixXcd& y, int row_node, int col_node, const Matrix3c& block);
void stamp_branch(Eigen::MatrixXcd& y, const Branch& br, double sign);

/// Lines from sequence admittances, loads as constant grounded admittances at the
/// power-flow operating point, machines as Norton sources behind subtransient
/// reactance. Solving the result without faults reproduces pf.v.
LinearGridModel to_phase_domain(const NetworkModel& net, const PowerFlowSolution& pf);

struct SplitResult {
    LinearGridModel model;
    int fault_node = 0;
};

/// Replaces `line` with segments d*z and (1-d)*z around a new internal node.
SplitResult split_line(const LinearGridModel& model, int line, double d);

LinearGridModel stamp_fault(const LinearGridModel& model, int node, FaultType type, double zf);

FaultSolution solve_fault(const LinearGridModel& model);

/// Net current leaving the network into the fault elements at `node`, per phase.
Phasor3 fault_phase_currents(const LinearGridModel& model, const FaultSolution& sol, int node);

struct FaultStudy {
    LinearGridModel model;
    FaultSolution solution;
    std::vector<int> fault_nodes;  // one per requested fault, same order
};

/// Builds, splits, stamps and solves in one call. Faults must be on distinct lines.
FaultStudy run_fault_study(const NetworkModel& net, const PowerFlowSolution& pf,
                           std::span<const FaultSpec> faults);

/// Unfaulted phase-domain solution at the power-flow operating point.
FaultSolution prefault_solution(const NetworkModel& net, const PowerFlowSolution& pf);

/// Closed-form symmetrical-component solution for a single fault; independent of
/// the phase-domain path above (builds its own sequence networks).
struct SequenceOracleResult {
    Complex z1, z2, z0;        // Thevenin impedances at the fault point
    Complex v_pre;             // pre-fault positive-sequence voltage at the fault point
    Phasor3 i_seq;             // I0, I1, I2 in the faulted-phase frame of reference phase a
    Phasor3 v_seq;             // V0, V1, V2 at the fault point (same frame)
    Phasor3 i_phase;           // phase currents into the fault (a, b, c), network frame
};

SequenceOracleResult sequence_oracle(const NetworkModel& net, const PowerFlowSolution& pf,
                                     const FaultSpec& spec);

/// Closed forms on given Thevenin data with the fault referenced to phase a
/// (SLG on a, LL/LLG on b-c). Returns phase currents a, b, c.
Phasor3 sequence_fault_currents(FaultType canonical, Complex v_pre, Complex z1, Complex z2,
                                Complex z0, double zf, Phasor3* i_seq = nullptr);

}  // namespace gridsentinel
