#include "gridsentinel/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "gridsentinel/kernels.hpp"

namespace gridsentinel {

void SvmConfig::validate() const {
    if (!(C > 0.0) || !std::isfinite(C)) throw ValidationError("SVM C must be positive");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("SVM gamma must be positive");
    if (!(tol > 0.0)) throw ValidationError("SVM tol must be positive");
    if (max_passes < 1) throw ValidationError("SVM max_passes must be >= 1");
}

namespace {

constexpr double kTau = 1e-12;

}  // namespace

BinarySvmSolution smo_solve(const Matrix& gram, std::span<const std::size_t> rows, std::span<const int> y, double C,
                            double tol, long max_iter) {
    const std::size_t n = rows.size();
    if (n != y.size() || n < 2) throw ValidationError("SMO: need at least two labelled rows");
    bool has_pos = false, has_neg = false;
    for (int v : y) {
        if (v != 1 && v != -1) throw ValidationError("SMO: labels must be +1 or -1");
        (v > 0 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) throw ValidationError("SMO: both labels must be present");

    auto k = [&](std::size_t a, std::size_t b) {
        return gram(static_cast<Eigen::Index>(rows[a]), static_cast<Eigen::Index>(rows[b]));
    };
    std::vector<double> alpha(n, 0.0), g(n, -1.0), qd(n);
    for (std::size_t t = 0; t < n; ++t) qd[t] = k(t, t);

    BinarySvmSolution sol;
    SmoStats& st = sol.stats;
    st.min_ascent = std::numeric_limits<double>::infinity();
    auto up = [&](std::size_t t) { return y[t] > 0 ? alpha[t] < C : alpha[t] > 0.0; };
    auto low = [&](std::size_t t) { return y[t] > 0 ? alpha[t] > 0.0 : alpha[t] < C; };

    // Working-set scan; fused into the gradient update after the first iteration.
    double gmax = -std::numeric_limits<double>::infinity(), gmax2 = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    auto scan = [&](std::size_t t) {
        if (up(t) && -y[t] * g[t] >= gmax) {
            gmax = -y[t] * g[t];
            i = t;
        }
        if (low(t)) gmax2 = std::max(gmax2, y[t] * g[t]);
    };
    for (std::size_t t = 0; t < n; ++t) scan(t);

    for (;;) {
        st.kkt_gap = gmax + gmax2;
        if (i == n || st.kkt_gap < tol) {
            st.converged = true;
            break;
        }
        if (st.iterations >= max_iter) break;

        std::size_t j = n;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            if (!low(t)) continue;
            const double b = gmax + y[t] * g[t];
            if (b <= 0.0) continue;
            double a = qd[i] + qd[t] - 2.0 * k(i, t);
            if (a <= 0.0) a = kTau;
            if (-(b * b) / a <= best) {
                best = -(b * b) / a;
                j = t;
            }
        }
        if (j == n) {
            st.converged = true;
            break;
        }

        const double ai = alpha[i], aj = alpha[j];
        const double kij = k(i, j);
        if (y[i] != y[j]) {
            double quad = qd[i] + qd[j] + 2.0 * (y[i] * y[j] * kij);
            if (quad <= 0.0) quad = kTau;
            const double delta = (-g[i] - g[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = C - diff;
                }
            } else if (alpha[j] > C) {
                alpha[j] = C;
                alpha[i] = C + diff;
            }
        } else {
            double quad = qd[i] + qd[j] - 2.0 * (y[i] * y[j] * kij);
            if (quad <= 0.0) quad = kTau;
            const double delta = (g[i] - g[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = sum - C;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > C) {
                if (alpha[j] > C) {
                    alpha[j] = C;
                    alpha[i] = sum - C;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        const double di = alpha[i] - ai, dj = alpha[j] - aj;
        const double qij = y[i] * y[j] * kij;
        const double ascent = -(di * g[i] + dj * g[j]) - 0.5 * (di * di * qd[i] + dj * dj * qd[j] + 2.0 * di * dj * qij);
        st.min_ascent = std::min(st.min_ascent, ascent);
        st.max_step_drift = std::max(st.max_step_drift, std::abs(y[i] * di + y[j] * dj));
        st.dual_objective += ascent;
        const double* row_i = &gram(static_cast<Eigen::Index>(rows[i]), 0);
        const double* row_j = &gram(static_cast<Eigen::Index>(rows[j]), 0);
        const double si = y[i], sj = y[j];
        gmax = gmax2 = -std::numeric_limits<double>::infinity();
        i = n;
        for (std::size_t t = 0; t < n; ++t) {
            g[t] += y[t] * (si * row_i[rows[t]] * di + sj * row_j[rows[t]] * dj);
            scan(t);
        }
        ++st.iterations;
    }
    if (!std::isfinite(st.min_ascent)) st.min_ascent = 0.0;

    // Offset from the free vectors, or the middle of the feasible interval when there are none.
    double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity(), sum = 0.0;
    long free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * g[t];
        if (alpha[t] >= C) {
            if (y[t] < 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (alpha[t] <= 0.0) {
            if (y[t] > 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            ++free;
            sum += yg;
        }
    }
    const double rho = free > 0 ? sum / static_cast<double>(free) : (ub + lb) / 2.0;
    sol.bias = -rho;
    sol.alpha = std::move(alpha);
    if (!st.converged)
        throw SvmNotConverged("SMO did not converge within " + std::to_string(max_iter) +
                                  " iterations; KKT gap " + std::to_string(st.kkt_gap),
                              st.kkt_gap);
    return sol;
}

double kkt_violation(const Matrix& gram, std::span<const std::size_t> rows, std::span<const int> y,
                     std::span<const double> alpha, double bias, double C) {
    double worst = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double f = bias;
        for (std::size_t j = 0; j < rows.size(); ++j)
            f += alpha[j] * y[j] * gram(static_cast<Eigen::Index>(rows[j]), static_cast<Eigen::Index>(rows[i]));
        const double m = y[i] * f;
        double v = 0.0;
        if (alpha[i] <= 0.0) v = std::max(0.0, 1.0 - m);
        else if (alpha[i] >= C) v = std::max(0.0, m - 1.0);
        else v = std::abs(m - 1.0);
        if (alpha[i] < 0.0 || alpha[i] > C) v = std::numeric_limits<double>::infinity();
        worst = std::max(worst, v);
    }
    return worst;
}

namespace {

// Class positions of each machine's two labels.
struct VoteIndex {
    std::vector<int> pos, neg;
    VoteIndex(const std::vector<int>& classes, const std::vector<SvmMachine>& machines) {
        auto at = [&](int label) {
            const auto it = std::lower_bound(classes.begin(), classes.end(), label);
            if (it == classes.end() || *it != label) throw ValidationError("SVM machine label not in class list");
            return static_cast<int>(it - classes.begin());
        };
        for (const SvmMachine& m : machines) {
            pos.push_back(at(m.positive));
            neg.push_back(at(m.negative));
        }
    }
};

int vote_row(const std::vector<int>& classes, const VoteIndex& idx, std::span<const double> dec,
             std::vector<int>& count, std::vector<double>& sum) {
    std::fill(count.begin(), count.end(), 0);
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::size_t m = 0; m < idx.pos.size(); ++m) {
        ++count[dec[m] > 0.0 ? idx.pos[m] : idx.neg[m]];
        sum[idx.pos[m]] += dec[m];
        sum[idx.neg[m]] -= dec[m];
    }
    std::size_t best = 0;  // ascending labels: strict improvement keeps the lowest id
    for (std::size_t c = 1; c < classes.size(); ++c)
        if (count[c] > count[best] || (count[c] == count[best] && sum[c] > sum[best])) best = c;
    return classes[best];
}

}  // namespace

int ovo_vote(const std::vector<int>& classes, const std::vector<SvmMachine>& machines, std::span<const double> dec) {
    if (dec.size() != machines.size()) throw ValidationError("SVM: one decision value per machine expected");
    std::vector<int> count(classes.size());
    std::vector<double> sum(classes.size());
    return vote_row(classes, VoteIndex(classes, machines), dec, count, sum);
}

namespace {

Matrix decisions(const SvmModel& model, const Matrix& kx, bool parallel) {
    Matrix dec(kx.rows(), static_cast<Eigen::Index>(model.machines.size()));
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
    for (Eigen::Index i = 0; i < kx.rows(); ++i)
        for (std::size_t m = 0; m < model.machines.size(); ++m) {
            const SvmMachine& mc = model.machines[m];
            double f = mc.bias;
            for (std::size_t t = 0; t < mc.sv.size(); ++t) f += mc.coef[t] * kx(i, mc.sv[t]);
            dec(i, static_cast<Eigen::Index>(m)) = f;
        }
    return dec;
}

LabelVector votes(const SvmModel& model, const Matrix& dec) {
    const VoteIndex idx(model.classes, model.machines);
    std::vector<int> count(model.classes.size());
    std::vector<double> sum(model.classes.size());
    LabelVector out(static_cast<std::size_t>(dec.rows()));
    for (Eigen::Index i = 0; i < dec.rows(); ++i)
        out[i] = vote_row(model.classes, idx, {dec.row(i).data(), static_cast<std::size_t>(dec.cols())}, count, sum);
    return out;
}

void check_width(const SvmModel& model, Eigen::Index cols) {
    if (cols != model.support.cols()) throw ValidationError("SVM: feature width mismatch");
}

}  // namespace

Matrix SvmModel::decision_values(const Matrix& x) const {
    check_width(*this, x.cols());
    return decisions(*this, rbf_from_sq_distances(pairwise_sq_euclidean(x, support), gamma), true);
}

int SvmModel::predict(std::span<const double> x) const {
    Matrix row(1, static_cast<Eigen::Index>(x.size()));
    std::copy(x.begin(), x.end(), row.data());
    return predict(row).front();
}

LabelVector SvmModel::predict(const Matrix& x) const { return votes(*this, decision_values(x)); }

LabelVector SvmModel::predict_serial(const Matrix& x) const {
    check_width(*this, x.cols());
    const Matrix sq = pairwise_sq_euclidean_serial(x, support);
    Matrix kx(sq.rows(), sq.cols());
    for (Eigen::Index i = 0; i < sq.rows(); ++i)
        for (Eigen::Index j = 0; j < sq.cols(); ++j) kx(i, j) = std::exp(-gamma * sq(i, j));
    return votes(*this, decisions(*this, kx, false));
}

SvmModel train_svm_from_distances(const Matrix& x, const LabelVector& y, const Matrix& sq_dist, const SvmConfig& cfg,
                                  std::vector<std::size_t>* support_rows) {
    cfg.validate();
    if (static_cast<std::size_t>(x.rows()) != y.size()) throw ValidationError("SVM: row/label count mismatch");
    if (sq_dist.rows() != x.rows() || sq_dist.cols() != x.rows()) throw ValidationError("SVM: distance matrix shape");
    SvmModel model;
    model.gamma = cfg.gamma;
    model.C = cfg.C;
    model.classes = distinct_labels(y);
    if (model.classes.size() < 2) throw ValidationError("SVM needs at least two classes");

    const Matrix gram = rbf_from_sq_distances(sq_dist, cfg.gamma);
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < y.size(); ++i) members[y[i]].push_back(i);

    struct Pair {
        int a, b;
    };
    std::vector<Pair> pairs;
    for (std::size_t p = 0; p < model.classes.size(); ++p)
        for (std::size_t q = p + 1; q < model.classes.size(); ++q) pairs.push_back({model.classes[p], model.classes[q]});

    std::vector<BinarySvmSolution> sols(pairs.size());
    std::vector<std::vector<std::size_t>> machine_rows(pairs.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t m = 0; m < pairs.size(); ++m) {
        try {
            const auto& ra = members.at(pairs[m].a);
            const auto& rb = members.at(pairs[m].b);
            std::vector<std::size_t> rows;
            std::vector<int> yy;
            std::merge(ra.begin(), ra.end(), rb.begin(), rb.end(), std::back_inserter(rows));
            for (std::size_t r : rows) yy.push_back(y[r] == pairs[m].a ? 1 : -1);
            const long cap = static_cast<long>(cfg.max_passes) * static_cast<long>(rows.size());
            sols[m] = smo_solve(gram, rows, yy, cfg.C, cfg.tol, cap);
            machine_rows[m] = std::move(rows);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    // Shared pool of support vectors, in training-row order.
    std::vector<int> pool_index(y.size(), -1);
    for (std::size_t m = 0; m < pairs.size(); ++m)
        for (std::size_t t = 0; t < machine_rows[m].size(); ++t)
            if (sols[m].alpha[t] > 0.0) pool_index[machine_rows[m][t]] = 0;
    std::vector<std::size_t> pool;
    for (std::size_t r = 0; r < y.size(); ++r)
        if (pool_index[r] == 0) {
            pool_index[r] = static_cast<int>(pool.size());
            pool.push_back(r);
        }
    model.support = take_rows(x, pool);
    if (support_rows) *support_rows = pool;
    model.machines.resize(pairs.size());
    for (std::size_t m = 0; m < pairs.size(); ++m) {
        SvmMachine& mc = model.machines[m];
        mc.positive = pairs[m].a;
        mc.negative = pairs[m].b;
        mc.bias = sols[m].bias;
        mc.stats = sols[m].stats;
        for (std::size_t t = 0; t < machine_rows[m].size(); ++t) {
            if (sols[m].alpha[t] <= 0.0) continue;
            const std::size_t r = machine_rows[m][t];
            mc.sv.push_back(pool_index[r]);
            mc.coef.push_back(y[r] == pairs[m].a ? sols[m].alpha[t] : -sols[m].alpha[t]);
        }
    }
    return model;
}

LabelVector predict_from_train_distances(const SvmModel& model, const Matrix& sq_to_train,
                                        std::span<const std::size_t> support_rows) {
    if (support_rows.size() != static_cast<std::size_t>(model.support.rows()))
        throw ValidationError("SVM: support row list does not match the model");
    Matrix kx(sq_to_train.rows(), static_cast<Eigen::Index>(support_rows.size()));
#pragma omp parallel for
    for (Eigen::Index i = 0; i < kx.rows(); ++i)
        for (std::size_t t = 0; t < support_rows.size(); ++t)
            kx(i, static_cast<Eigen::Index>(t)) = std::exp(-model.gamma * sq_to_train(i, static_cast<Eigen::Index>(support_rows[t])));
    return votes(model, decisions(model, kx, true));
}

SvmModel train_svm(const Matrix& x, const LabelVector& y, const SvmConfig& cfg) {
    return train_svm_from_distances(x, y, pairwise_sq_euclidean(x, x), cfg);
}

}  // namespace gridsentinel
