#include "gridsentinel/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "gridsentinel/rng.hpp"

namespace gridsentinel {

Matrix feature_matrix(const Dataset& data) {
    Matrix x(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(data.feature_count()));
    for (std::size_t i = 0; i < data.size(); ++i) {
        const std::vector<double>& f = data.samples[i].features;
        if (f.size() != data.feature_count()) throw ValidationError("sample " + std::to_string(i) + " has wrong length");
        std::copy(f.begin(), f.end(), x.row(static_cast<Eigen::Index>(i)).data());
    }
    return x;
}

Matrix take_rows(const Matrix& x, std::span<const std::size_t> rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
    return out;
}

LabelVector take(const LabelVector& y, std::span<const std::size_t> rows) {
    LabelVector out;
    out.reserve(rows.size());
    for (std::size_t r : rows) out.push_back(y.at(r));
    return out;
}

std::vector<int> distinct_labels(const LabelVector& y) {
    std::vector<int> c(y.begin(), y.end());
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return c;
}

Scaler Scaler::fit(const Matrix& x) {
    if (x.rows() == 0) throw ValidationError("cannot fit a scaler on zero rows");
    Scaler s;
    const auto n = static_cast<double>(x.rows());
    s.mean.assign(x.cols(), 0.0);
    s.std.assign(x.cols(), 0.0);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < x.rows(); ++i) sum += x(i, j);
        const double m = sum / n;
        double ss = 0.0;
        for (Eigen::Index i = 0; i < x.rows(); ++i) ss += (x(i, j) - m) * (x(i, j) - m);
        s.mean[j] = m;
        s.std[j] = std::max(std::sqrt(ss / n), kStdFloor);
    }
    return s;
}

void Scaler::apply_inplace(std::span<double> row) const {
    if (row.size() != mean.size()) throw ValidationError("scaler width does not match the feature vector");
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = (row[j] - mean[j]) / std[j];
}

Matrix Scaler::apply(const Matrix& x) const {
    if (static_cast<std::size_t>(x.cols()) != mean.size()) throw ValidationError("scaler width does not match the matrix");
    Matrix out = x;
    for (Eigen::Index i = 0; i < out.rows(); ++i) apply_inplace({out.row(i).data(), static_cast<std::size_t>(out.cols())});
    return out;
}

SplitIndices split_indices(const LabelVector& y, double train_fraction, std::uint64_t seed, bool stratified) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ValidationError("train fraction must lie in (0, 1)");
    if (y.empty()) throw ValidationError("cannot split an empty label vector");
    Rng rng(seed);
    auto shuffle = [&](std::vector<std::size_t>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
    };
    const std::size_t total = static_cast<std::size_t>(std::floor(static_cast<double>(y.size()) * train_fraction + 1e-9));

    SplitIndices out;
    if (!stratified) {
        std::vector<std::size_t> all(y.size());
        std::iota(all.begin(), all.end(), 0);
        shuffle(all);
        out.train.assign(all.begin(), all.begin() + static_cast<long>(total));
        out.validation.assign(all.begin() + static_cast<long>(total), all.end());
    } else {
        std::map<int, std::vector<std::size_t>> groups;
        for (std::size_t i = 0; i < y.size(); ++i) groups[y[i]].push_back(i);
        struct Quota {
            std::vector<std::size_t>* members;
            std::size_t take;
            double frac;
            std::uint64_t tiebreak;
        };
        std::vector<Quota> quotas;
        std::size_t assigned = 0;
        for (auto& [label, members] : groups) {
            if (members.size() < 2)
                throw ValidationError("class " + std::to_string(label) + " has fewer than 2 samples; cannot stratify");
            shuffle(members);
            const double exact = static_cast<double>(members.size()) * train_fraction;
            const auto base = static_cast<std::size_t>(std::floor(exact + 1e-9));
            quotas.push_back({&members, base, exact - static_cast<double>(base), rng.engine()()});
            assigned += base;
        }
        std::vector<std::size_t> order(quotas.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (quotas[a].frac != quotas[b].frac) return quotas[a].frac > quotas[b].frac;
            return quotas[a].tiebreak < quotas[b].tiebreak;
        });
        for (std::size_t k = 0; assigned < total && k < order.size(); ++k, ++assigned) ++quotas[order[k]].take;
        for (const Quota& q : quotas) {
            out.train.insert(out.train.end(), q.members->begin(), q.members->begin() + static_cast<long>(q.take));
            out.validation.insert(out.validation.end(), q.members->begin() + static_cast<long>(q.take), q.members->end());
        }
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.validation.begin(), out.validation.end());
    return out;
}

}  // namespace gridsentinel
