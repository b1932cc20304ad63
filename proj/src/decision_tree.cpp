#include "gridsentinel/decision_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gridsentinel {

double gini(std::span<const long> counts) {
    long total = 0;
    for (long c : counts) {
        if (c < 0) throw ValidationError("gini: negative count");
        total += c;
    }
    if (total == 0) throw ValidationError("gini: all counts are zero");
    double s = 0.0;
    for (long c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        s += p * p;
    }
    return 1.0 - s;
}

void DtConfig::validate() const {
    if (max_depth < 0) throw ValidationError("max_depth must be >= 0");
    if (min_samples_split < 2) throw ValidationError("min_samples_split must be >= 2");
    if (!(min_impurity_decrease >= 0.0)) throw ValidationError("min_impurity_decrease must be >= 0");
}

int DecisionTree::depth() const {
    if (nodes.empty()) return 0;
    std::vector<int> d(nodes.size(), 0);
    int best = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        best = std::max(best, d[i]);
        if (!nodes[i].is_leaf()) {
            d[nodes[i].left] = d[i] + 1;
            d[nodes[i].right] = d[i] + 1;
        }
    }
    return best;
}

const DtNode& DecisionTree::leaf_for(std::span<const double> x) const {
    const DtNode* n = &nodes.at(0);
    while (!n->is_leaf()) n = &nodes[x[n->feature] <= n->threshold ? n->left : n->right];
    return *n;
}

int DecisionTree::predict(std::span<const double> x) const {
    const DtNode& leaf = leaf_for(x);
    const auto it = std::max_element(leaf.counts.begin(), leaf.counts.end());  // first maximum = lowest class
    return classes[it - leaf.counts.begin()];
}

namespace {

// Child score S_l / n_l + S_r / n_r with S = sum of squared class counts; the weighted child
// gini is 1 - score / n, so a higher score is a better split. Stored as an exact fraction.
struct Score {
    __int128 num = -1;
    __int128 den = 1;

    bool better_than(const Score& o) const { return num * o.den > o.num * den; }
};

struct Candidate {
    Score score;
    int feature = -1;
    double threshold = 0.0;
};

double midpoint(double a, double b) {
    const double m = 0.5 * (a + b);
    return m < b ? m : a;
}

// Scans one feature whose rows arrive sorted by value.
void scan_feature(const Matrix& x, std::span<const int> cls, int n_classes, std::span<const std::size_t> sorted,
                  int feature, long total_sq, std::vector<long>& left, std::vector<long>& right, Candidate& best) {
    const long n = static_cast<long>(sorted.size());
    std::fill(left.begin(), left.end(), 0);
    std::fill(right.begin(), right.end(), 0);
    for (std::size_t r : sorted) ++right[cls[r]];
    long sl = 0, sr = total_sq;
    (void)n_classes;
    for (long i = 0; i + 1 < n; ++i) {
        const int c = cls[sorted[i]];
        sl += 2 * left[c] + 1;
        sr -= 2 * right[c] - 1;
        ++left[c];
        --right[c];
        const double a = x(static_cast<Eigen::Index>(sorted[i]), feature);
        const double b = x(static_cast<Eigen::Index>(sorted[i + 1]), feature);
        if (!(a < b)) continue;
        const long nl = i + 1, nr = n - nl;
        const Score s{static_cast<__int128>(sl) * nr + static_cast<__int128>(sr) * nl, static_cast<__int128>(nl) * nr};
        if (s.better_than(best.score)) best = {s, feature, midpoint(a, b)};
    }
}

double decrease_of(const Score& s, long n, double parent_gini) {
    const double score = static_cast<double>(s.num) / static_cast<double>(s.den);
    return parent_gini - (1.0 - score / static_cast<double>(n));
}

long squared_counts(const std::vector<long>& counts) {
    long s = 0;
    for (long c : counts) s += c * c;
    return s;
}

}  // namespace

SplitChoice best_split(const Matrix& x, std::span<const int> cls, int n_classes, std::span<const std::size_t> rows) {
    if (rows.empty()) throw ValidationError("best_split: no rows");
    std::vector<long> counts(n_classes, 0);
    for (std::size_t r : rows) ++counts[cls[r]];
    const long total_sq = squared_counts(counts);
    std::vector<long> left(n_classes), right(n_classes);
    std::vector<std::size_t> sorted(rows.begin(), rows.end());
    Candidate best;
    for (int f = 0; f < x.cols(); ++f) {
        std::stable_sort(sorted.begin(), sorted.end(),
                         [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
        scan_feature(x, cls, n_classes, sorted, f, total_sq, left, right, best);
    }
    SplitChoice out;
    if (best.feature < 0) return out;
    out.found = true;
    out.feature = best.feature;
    out.threshold = best.threshold;
    out.decrease = decrease_of(best.score, static_cast<long>(rows.size()), gini(counts));
    return out;
}

namespace {

// Presorted CART: orders[f] holds every training row sorted by feature f; each node owns the
// same [lo, hi) slice in all of them, kept consistent by stable partitioning after a split.
class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, std::vector<int> cls, int n_classes, const DtConfig& cfg)
        : x_(x), cls_(std::move(cls)), k_(n_classes), cfg_(cfg), goes_left_(x.rows(), 0) {
        const auto n = static_cast<std::size_t>(x.rows());
        orders_.resize(static_cast<std::size_t>(x.cols()));
#pragma omp parallel for schedule(dynamic)
        for (Eigen::Index f = 0; f < x.cols(); ++f) {
            std::vector<std::size_t>& o = orders_[f];
            o.resize(n);
            std::iota(o.begin(), o.end(), 0);
            std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
        }
    }

    std::vector<DtNode> build() {
        grow(0, static_cast<std::size_t>(x_.rows()), 0);
        return std::move(nodes_);
    }

private:
    int grow(std::size_t lo, std::size_t hi, int depth) {
        const int id = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        std::vector<long> counts(k_, 0);
        for (std::size_t i = lo; i < hi; ++i) ++counts[cls_[orders_[0][i]]];
        nodes_[id].counts = counts;

        const long n = static_cast<long>(hi - lo);
        const long nonzero = std::count_if(counts.begin(), counts.end(), [](long c) { return c > 0; });
        if (depth >= cfg_.max_depth || n < cfg_.min_samples_split || nonzero <= 1) return id;

        const long total_sq = squared_counts(counts);
        std::vector<Candidate> per_feature(static_cast<std::size_t>(x_.cols()));
#pragma omp parallel
        {
            std::vector<long> left(k_), right(k_);
#pragma omp for schedule(dynamic, 16)
            for (Eigen::Index f = 0; f < x_.cols(); ++f)
                scan_feature(x_, cls_, k_, std::span(orders_[f]).subspan(lo, hi - lo), static_cast<int>(f), total_sq,
                             left, right, per_feature[f]);
        }
        Candidate best;
        for (const Candidate& c : per_feature)  // feature order: ties keep the lowest index
            if (c.feature >= 0 && c.score.better_than(best.score)) best = c;
        if (best.feature < 0) return id;
        if (decrease_of(best.score, n, gini(counts)) < cfg_.min_impurity_decrease) return id;

        std::size_t n_left = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            const std::size_t r = orders_[0][i];
            goes_left_[r] = x_(static_cast<Eigen::Index>(r), best.feature) <= best.threshold;
            n_left += goes_left_[r];
        }
#pragma omp parallel for schedule(dynamic, 16)
        for (Eigen::Index f = 0; f < x_.cols(); ++f) {
            auto& o = orders_[f];
            std::stable_partition(o.begin() + static_cast<long>(lo), o.begin() + static_cast<long>(hi),
                                  [&](std::size_t r) { return goes_left_[r] != 0; });
        }
        nodes_[id].feature = best.feature;
        nodes_[id].threshold = best.threshold;
        const int l = grow(lo, lo + n_left, depth + 1);
        const int r = grow(lo + n_left, hi, depth + 1);
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
    }

    const Matrix& x_;
    std::vector<int> cls_;
    int k_;
    DtConfig cfg_;
    std::vector<std::vector<std::size_t>> orders_;
    std::vector<char> goes_left_;
    std::vector<DtNode> nodes_;
};

}  // namespace

DecisionTree train_decision_tree(const Matrix& x, const LabelVector& y, const DtConfig& cfg) {
    cfg.validate();
    if (x.rows() == 0) throw ValidationError("decision tree: empty training set");
    if (static_cast<std::size_t>(x.rows()) != y.size()) throw ValidationError("decision tree: row/label count mismatch");
    if (x.cols() == 0) throw ValidationError("decision tree: no features");
    DecisionTree tree;
    tree.classes = distinct_labels(y);
    std::vector<int> cls(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        cls[i] = static_cast<int>(std::lower_bound(tree.classes.begin(), tree.classes.end(), y[i]) - tree.classes.begin());
    tree.nodes = TreeBuilder(x, std::move(cls), static_cast<int>(tree.classes.size()), cfg).build();
    return tree;
}

}  // namespace gridsentinel
