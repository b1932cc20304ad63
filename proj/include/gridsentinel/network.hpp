#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gridsentinel/error.hpp"

namespace gridsentinel {

using Complex = std::complex<double>;

enum class BusKind { Slack, PV, PQ };

struct Bus {
    int id = 0;
    BusKind kind = BusKind::PQ;
    Complex load{0.0, 0.0};  // p.u. demand
    double p_gen = 0.0;      // real-power setpoint (PV); ignored for the slack
    double v_set = 1.0;      // voltage magnitude setpoint (slack, PV)

    bool operator==(const Bus&) const = default;
};

struct Line {
    int id = 0;
    int from = 0;
    int to = 0;
    double r1 = 0.0;
    double x1 = 0.0;
    double b1 = 0.0;  // total charging susceptance, split half per end
    double r0 = 0.0;
    double x0 = 0.0;
    bool in_service = true;

    Complex z1() const { return {r1, x1}; }
    Complex z0() const { return {r0, x0}; }
    bool operator==(const Line&) const = default;
};

/// Short-circuit data for a synchronous source; reactances in p.u. on the system base.
struct GeneratorDynamic {
    int bus = 0;
    double x1s = 0.0;
    double x2 = 0.0;
    double x0 = 0.0;
    bool grounded = true;

    bool operator==(const GeneratorDynamic&) const = default;
};

struct NetworkModel {
    double base_mva = 100.0;
    double nominal_hz = 60.0;
    std::vector<Bus> buses;
    std::vector<Line> lines;
    std::vector<GeneratorDynamic> gens;

    int bus_count() const { return static_cast<int>(buses.size()); }
    int line_count() const { return static_cast<int>(lines.size()); }
    int in_service_line_count() const;
    int slack_bus() const;
    const GeneratorDynamic* generator_at(int bus) const;

    bool operator==(const NetworkModel&) const = default;
};

/// Kinds of case-file rejection, reported through CaseError::kind().
enum class CaseErrorKind {
    Syntax,
    Schema,
    DuplicateId,
    MissingSlack,
    MultipleSlack,
    Disconnected,
    BadValue,
};

class CaseError : public ValidationError {
public:
    CaseError(CaseErrorKind kind, const std::string& what) : ValidationError(what), kind_(kind) {}
    CaseErrorKind kind() const { return kind_; }

private:
    CaseErrorKind kind_;
};

enum class OutageErrorKind { UnknownLine, AlreadyOut, Disconnects };

class OutageError : public ValidationError {
public:
    OutageError(OutageErrorKind kind, const std::string& what) : ValidationError(what), kind_(kind) {}
    OutageErrorKind kind() const { return kind_; }

private:
    OutageErrorKind kind_;
};

/// Parses and validates a JSON case document (keys base_mva, buses, lines, gens).
NetworkModel load_case(std::string_view text);

/// Inverse of load_case. Doubles are written with round-trip precision.
std::string serialize_case(const NetworkModel& net);

/// Standard IEEE 14-bus load-flow data plus sequence and machine parameters.
std::string_view ieee14_case_text();
const NetworkModel& ieee14();

/// Re-runs every structural check that load_case applies; throws CaseError.
void validate(const NetworkModel& net);

bool is_connected(const NetworkModel& net);

enum class SequenceDomain { Positive, Zero };

/// Nodal admittance matrix over in-service lines. Positive sequence includes line
/// charging; zero sequence uses r0/x0 without charging. With include_generators the
/// subtransient (positive) or zero-sequence Norton admittances of the machines are
/// added on the diagonal.
Eigen::MatrixXcd build_ybus(const NetworkModel& net, SequenceDomain domain,
                            bool include_generators = false);

/// Returns a copy with `line_id` out of service; throws OutageError.
NetworkModel apply_outage(const NetworkModel& net, int line_id);

const char* to_string(BusKind kind);

}  // namespace gridsentinel
