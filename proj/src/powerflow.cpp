#include "gridsentinel/powerflow.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

namespace gridsentinel {

namespace {

struct Indexing {
    std::vector<int> angle_buses;      // non-slack
    std::vector<int> magnitude_buses;  // PQ
};

Indexing make_indexing(const NetworkModel& net) {
    Indexing ix;
    for (const Bus& b : net.buses) {
        if (b.kind != BusKind::Slack) ix.angle_buses.push_back(b.id);
        if (b.kind == BusKind::PQ) ix.magnitude_buses.push_back(b.id);
    }
    return ix;
}

Eigen::VectorXcd computed_injection(const Eigen::MatrixXcd& y, const Eigen::VectorXcd& v) {
    Eigen::VectorXcd current = y * v;
    return v.cwiseProduct(current.conjugate());
}

std::vector<double> residual(const Indexing& ix, const std::vector<Complex>& spec,
                             const Eigen::VectorXcd& s) {
    std::vector<double> r;
    r.reserve(ix.angle_buses.size() + ix.magnitude_buses.size());
    for (int b : ix.angle_buses) r.push_back(spec[b].real() - s[b].real());
    for (int b : ix.magnitude_buses) r.push_back(spec[b].imag() - s[b].imag());
    return r;
}

double max_abs(const std::vector<double>& r) {
    double m = 0.0;
    for (double x : r) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

std::vector<Complex> scheduled_injection(const NetworkModel& net) {
    std::vector<Complex> s(net.bus_count());
    for (const Bus& b : net.buses) {
        const double pg = b.kind == BusKind::PV ? b.p_gen : 0.0;
        s[b.id] = Complex(pg, 0.0) - b.load;
    }
    return s;
}

std::vector<double> mismatch(const NetworkModel& net, std::span<const Complex> v) {
    if (static_cast<int>(v.size()) != net.bus_count())
        throw ValidationError("mismatch: voltage vector has wrong dimension");
    const Eigen::MatrixXcd y = build_ybus(net, SequenceDomain::Positive);
    Eigen::VectorXcd vv(v.size());
    for (size_t i = 0; i < v.size(); ++i) vv[i] = v[i];
    return residual(make_indexing(net), scheduled_injection(net), computed_injection(y, vv));
}

PowerFlowSolution solve_nr(const NetworkModel& net, const PowerFlowOptions& options) {
    if (!(options.tol > 0.0)) throw ValidationError("power flow tolerance must be positive");
    const int n = net.bus_count();
    const Indexing ix = make_indexing(net);
    const std::vector<Complex> spec = scheduled_injection(net);
    const Eigen::MatrixXcd y = build_ybus(net, SequenceDomain::Positive);

    std::vector<double> vm(n, 1.0), va(n, 0.0);
    for (const Bus& b : net.buses)
        if (b.kind != BusKind::PQ) vm[b.id] = b.v_set;

    const int na = static_cast<int>(ix.angle_buses.size());
    const int nm = static_cast<int>(ix.magnitude_buses.size());
    const int dim = na + nm;

    auto voltage = [&]() {
        Eigen::VectorXcd v(n);
        for (int i = 0; i < n; ++i) v[i] = std::polar(vm[i], va[i]);
        return v;
    };

    PowerFlowSolution sol;
    for (int iter = 0;; ++iter) {
        const Eigen::VectorXcd v = voltage();
        const Eigen::VectorXcd current = y * v;
        const std::vector<double> r = residual(ix, spec, v.cwiseProduct(current.conjugate()));
        const double worst = max_abs(r);
        sol.residual_history.push_back(worst);
        if (!std::isfinite(worst))
            throw ConvergenceError("power flow diverged (non-finite mismatch)", worst);
        if (worst <= options.tol || dim == 0) {
            sol.iterations = iter;
            sol.max_mismatch = worst;
            sol.v.assign(v.data(), v.data() + n);
            return sol;
        }
        if (iter >= options.max_iter)
            throw ConvergenceError("power flow did not converge in " + std::to_string(options.max_iter) +
                                       " iterations (max mismatch " + std::to_string(worst) + ")",
                                   worst);

        // dS/dtheta = j diag(V) conj(diag(I) - Y diag(V))
        // dS/d|V|   = diag(V) conj(Y diag(V/|V|)) + conj(diag(I)) diag(V/|V|)
        Eigen::MatrixXcd ds_dva(n, n), ds_dvm(n, n);
        const Complex j(0.0, 1.0);
        for (int r_ = 0; r_ < n; ++r_) {
            for (int c = 0; c < n; ++c) {
                const Complex yv = y(r_, c) * v[c];
                const Complex unit = v[c] / vm[c];
                Complex dva = -j * v[r_] * std::conj(yv);
                Complex dvm = v[r_] * std::conj(y(r_, c) * unit);
                if (r_ == c) {
                    dva += j * v[r_] * std::conj(current[r_]);
                    dvm += std::conj(current[r_]) * unit;
                }
                ds_dva(r_, c) = dva;
                ds_dvm(r_, c) = dvm;
            }
        }
        Eigen::MatrixXd jac(dim, dim);
        for (int a = 0; a < na; ++a) {
            const int row = ix.angle_buses[a];
            for (int b = 0; b < na; ++b) jac(a, b) = ds_dva(row, ix.angle_buses[b]).real();
            for (int b = 0; b < nm; ++b) jac(a, na + b) = ds_dvm(row, ix.magnitude_buses[b]).real();
        }
        for (int a = 0; a < nm; ++a) {
            const int row = ix.magnitude_buses[a];
            for (int b = 0; b < na; ++b) jac(na + a, b) = ds_dva(row, ix.angle_buses[b]).imag();
            for (int b = 0; b < nm; ++b) jac(na + a, na + b) = ds_dvm(row, ix.magnitude_buses[b]).imag();
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
        if (!lu.isInvertible()) throw NumericalError("power flow Jacobian is singular");
        const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(r.data(), dim);
        const Eigen::VectorXd dx = lu.solve(rhs);
        for (int a = 0; a < na; ++a) va[ix.angle_buses[a]] += dx[a];
        for (int a = 0; a < nm; ++a) vm[ix.magnitude_buses[a]] += dx[na + a];
    }
}

}  // namespace gridsentinel
