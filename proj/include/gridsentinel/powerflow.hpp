#pragma once

#include <span>
#include <vector>

#include "gridsentinel/network.hpp"

namespace gridsentinel {

struct PowerFlowSolution {
    std::vector<Complex> v;          // positive-sequence bus voltages, p.u.
    int iterations = 0;              // Newton updates applied
    double max_mismatch = 0.0;       // p.u. power residual at v
    std::vector<double> residual_history;  // max |mismatch| before each update, then final
};

struct PowerFlowOptions {
    double tol = 1e-10;
    int max_iter = 20;
};

class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, double final_mismatch)
        : NumericalError(what), final_mismatch_(final_mismatch) {}
    double final_mismatch() const { return final_mismatch_; }

private:
    double final_mismatch_;
};

/// Specified net injection (generation minus load) per bus.
std::vector<Complex> scheduled_injection(const NetworkModel& net);

/// Real residuals: dP for every non-slack bus (bus order), then dQ for every PQ bus.
/// Each entry is specified injection minus the computed V * conj(Y V) component.
std::vector<double> mismatch(const NetworkModel& net, std::span<const Complex> v);

/// Newton-Raphson in polar coordinates from a flat start, dense LU on the Jacobian.
PowerFlowSolution solve_nr(const NetworkModel& net, const PowerFlowOptions& options = {});

inline PowerFlowSolution solve_nr(const NetworkModel& net, double tol, int max_iter) {
    return solve_nr(net, PowerFlowOptions{tol, max_iter});
}

}  // namespace gridsentinel
