#include "gridsentinel/knn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "gridsentinel/kernels.hpp"

namespace gridsentinel {

void KnnConfig::validate() const {
    if (k < 1) throw ValidationError("KNN k must be >= 1");
    if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("KNN p must be a finite value >= 1");
}

int knn_vote(std::span<const double> distances, const LabelVector& labels, int k) {
    if (k < 1 || static_cast<std::size_t>(k) > distances.size()) throw ValidationError("KNN k out of range");
    std::vector<std::size_t> idx(distances.size());
    std::iota(idx.begin(), idx.end(), 0);
    auto nearer = [&](std::size_t a, std::size_t b) {
        return distances[a] < distances[b] || (distances[a] == distances[b] && a < b);
    };
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), nearer);
    std::map<int, std::pair<int, double>> tally;  // label -> (votes, summed distance)
    for (int i = 0; i < k; ++i) {
        auto& t = tally[labels[idx[i]]];
        ++t.first;
        t.second += distances[idx[i]];
    }
    auto best = tally.begin();
    for (auto it = tally.begin(); it != tally.end(); ++it)
        if (it->second.first > best->second.first ||
            (it->second.first == best->second.first && it->second.second < best->second.second))
            best = it;
    return best->first;
}

KnnModel train_knn(const Matrix& x, const LabelVector& y, const KnnConfig& cfg) {
    cfg.validate();
    if (static_cast<std::size_t>(x.rows()) != y.size()) throw ValidationError("KNN: row/label count mismatch");
    if (y.empty()) throw ValidationError("KNN: empty training set");
    if (static_cast<std::size_t>(cfg.k) > y.size()) throw ValidationError("KNN k exceeds the training-set size");
    return {cfg, x, y};
}

namespace {

LabelVector vote_rows(const KnnModel& m, const Matrix& d) {
    LabelVector out(static_cast<std::size_t>(d.rows()));
    for (Eigen::Index i = 0; i < d.rows(); ++i)
        out[i] = knn_vote({d.row(i).data(), static_cast<std::size_t>(d.cols())}, m.labels, m.cfg.k);
    return out;
}

}  // namespace

int KnnModel::predict(std::span<const double> x) const {
    if (static_cast<Eigen::Index>(x.size()) != train.cols()) throw ValidationError("KNN: feature width mismatch");
    std::vector<double> d(labels.size());
    for (std::size_t j = 0; j < labels.size(); ++j)
        d[j] = minkowski(x, {train.row(static_cast<Eigen::Index>(j)).data(), x.size()}, cfg.p);
    return knn_vote(d, labels, cfg.k);
}

LabelVector KnnModel::predict(const Matrix& x) const { return vote_rows(*this, pairwise_minkowski(x, train, cfg.p)); }

LabelVector KnnModel::predict_serial(const Matrix& x) const {
    return vote_rows(*this, pairwise_minkowski_serial(x, train, cfg.p));
}

}  // namespace gridsentinel
