#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "naip/types.hpp"

namespace naip {

enum class TiePolicy { strict, half };

inline TiePolicy tie_policy_from_string(const std::string& s) {
    if (s == "strict") return TiePolicy::strict;
    if (s == "half") return TiePolicy::half;
    throw ValidationError("unknown tie policy: \"" + s + "\"");
}

struct MetricsReport {
    double auc = 0.0;
    double pair_acc = 0.0;
    double spearman = 0.0;
    double ndcg_at_k = 0.0;
    int k = 20;
    double best_f1 = 0.0;
    double best_threshold = 0.0;
    double acc_at_best_f1 = 0.0;
    int n_pos = 0;
    int n_neg = 0;
};

// Fraction of (positive, negative) pairs ranked correctly. `strict` requires a
// strict inequality (ties score 0); `half` credits ties 0.5 (Mann-Whitney).
inline double auc(const std::map<std::string, double>& scores,
                  const std::map<std::string, bool>& labels, TiePolicy tie_policy) {
    std::vector<double> pos, neg;
    for (const auto& [id, is_pos] : labels) {
        const auto it = scores.find(id);
        if (it == scores.end()) throw ValidationError("auc: no score for id \"" + id + "\"");
        (is_pos ? pos : neg).push_back(it->second);
    }
    if (pos.empty() || neg.empty())
        throw ValidationError("auc: needs at least one positive and one negative");
    // sort negatives once; count via binary search
    std::sort(neg.begin(), neg.end());
    double total = 0.0;
    for (double p : pos) {
        const auto lo = std::lower_bound(neg.begin(), neg.end(), p);
        const auto hi = std::upper_bound(lo, neg.end(), p);
        total += static_cast<double>(lo - neg.begin());
        if (tie_policy == TiePolicy::half) total += 0.5 * static_cast<double>(hi - lo);
    }
    return total / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

// Fraction of truth-distinct pairs whose predicted ordering matches; tied
// predictions fail the strict inequality and count as incorrect.
inline double pair_acc(const std::map<std::string, double>& pred,
                       const std::map<std::string, double>& truth) {
    std::vector<std::pair<double, double>> v;  // (truth, pred)
    for (const auto& [id, t] : truth) {
        const auto it = pred.find(id);
        if (it == pred.end()) throw ValidationError("pair_acc: no prediction for \"" + id + "\"");
        v.emplace_back(t, it->second);
    }
    // sort by truth, then count concordant pairs across truth-tie blocks with
    // a Fenwick tree over compressed prediction ranks: O(n log n)
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();

    std::vector<double> preds(n);
    for (std::size_t i = 0; i < n; ++i) preds[i] = v[i].second;
    std::vector<double> sorted_preds = preds;
    std::sort(sorted_preds.begin(), sorted_preds.end());
    sorted_preds.erase(std::unique(sorted_preds.begin(), sorted_preds.end()),
                       sorted_preds.end());
    auto rank_of = [&](double p) {
        return static_cast<std::size_t>(
            std::lower_bound(sorted_preds.begin(), sorted_preds.end(), p) -
            sorted_preds.begin());
    };

    std::vector<long long> tree(sorted_preds.size() + 1, 0);
    auto add = [&](std::size_t r) {
        for (std::size_t i = r + 1; i < tree.size(); i += i & (~i + 1)) ++tree[i];
    };
    auto count_below = [&](std::size_t r) {  // inserted elements with rank < r
        long long s = 0;
        for (std::size_t i = r; i > 0; i -= i & (~i + 1)) s += tree[i];
        return s;
    };

    long long comparable = 0, correct = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[j + 1].first == v[i].first) ++j;
        for (std::size_t k = i; k <= j; ++k) {
            comparable += static_cast<long long>(i);
            correct += count_below(rank_of(v[k].second));
        }
        for (std::size_t k = i; k <= j; ++k) add(rank_of(v[k].second));
        i = j + 1;
    }
    if (comparable == 0)
        throw ValidationError("pair_acc: no pairs with distinct truth values");
    return static_cast<double>(correct) / static_cast<double>(comparable);
}

namespace detail {
// average ranks (1-based), ties share the mean rank
inline std::vector<double> average_ranks(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) { ma += a[i]; mb += b[i]; }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0)
        throw ValidationError("spearman: undefined for a constant input vector");
    return sab / std::sqrt(saa * sbb);
}
}  // namespace detail

// Rank correlation with average ranks for ties.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ValidationError("spearman: length mismatch");
    if (x.size() < 2) throw ValidationError("spearman: needs at least 2 points");
    return detail::pearson(detail::average_ranks(x), detail::average_ranks(y));
}

// NDCG@k with gain (2^s - 1) and log2(i+1) discount; prediction ties broken
// by id ascending.
inline double ndcg_at_k(const std::map<std::string, double>& pred,
                        const std::map<std::string, double>& relevance, int k) {
    if (k < 1) throw ValidationError("ndcg: k must be >= 1");
    std::vector<std::pair<std::string, double>> items(relevance.begin(), relevance.end());
    bool any_pos = false;
    for (const auto& [id, rel] : items) {
        if (rel < 0.0) throw ValidationError("ndcg: negative relevance for \"" + id + "\"");
        if (rel > 0.0) any_pos = true;
        if (!pred.count(id)) throw ValidationError("ndcg: no prediction for \"" + id + "\"");
    }
    if (!any_pos) throw ValidationError("ndcg: all relevance zero");

    const std::size_t depth = std::min<std::size_t>(static_cast<std::size_t>(k), items.size());
    auto dcg = [&](auto cmp) {
        std::vector<std::pair<std::string, double>> sorted = items;
        std::sort(sorted.begin(), sorted.end(), cmp);
        double g = 0.0;
        for (std::size_t i = 0; i < depth; ++i)
            g += (std::exp2(sorted[i].second) - 1.0) / std::log2(static_cast<double>(i) + 2.0);
        return g;
    };
    const double actual = dcg([&](const auto& a, const auto& b) {
        const double pa = pred.at(a.first), pb = pred.at(b.first);
        if (pa != pb) return pa > pb;
        return a.first < b.first;
    });
    const double ideal = dcg([](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return actual / ideal;
}

struct ThresholdResult {
    double threshold = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
};

// Sweeps every distinct score as a threshold (predict positive when
// score >= t) and returns the F1-maximizing one, ties toward higher t.
inline ThresholdResult f1_best_threshold(const std::map<std::string, double>& scores,
                                         const std::map<std::string, bool>& labels) {
    std::vector<std::pair<double, bool>> v;
    int total_pos = 0;
    for (const auto& [id, is_pos] : labels) {
        const auto it = scores.find(id);
        if (it == scores.end())
            throw ValidationError("f1_best_threshold: no score for \"" + id + "\"");
        v.emplace_back(it->second, is_pos);
        total_pos += is_pos;
    }
    if (total_pos == 0 || total_pos == static_cast<int>(v.size()))
        throw ValidationError("f1_best_threshold: both classes must be present");
    std::sort(v.begin(), v.end());

    ThresholdResult best;
    bool have_best = false;
    const int n = static_cast<int>(v.size());
    std::vector<int> suffix_pos(n + 1, 0);
    for (int i = n - 1; i >= 0; --i) suffix_pos[i] = suffix_pos[i + 1] + v[i].second;
    // threshold at v[i].first predicts positive for all items with score >= it
    for (int i = 0; i < n; ++i) {
        if (i > 0 && v[i].first == v[i - 1].first) continue;
        const int tp = suffix_pos[i];
        const int fp = (n - i) - tp;
        const int fn = total_pos - tp;
        const double f1 =
            (2 * tp + fp + fn) > 0 ? 2.0 * tp / static_cast<double>(2 * tp + fp + fn) : 0.0;
        const int tn = n - total_pos - fp;
        const double acc = static_cast<double>(tp + tn) / static_cast<double>(n);
        if (!have_best || f1 > best.f1 || (f1 == best.f1 && v[i].first > best.threshold)) {
            best = {v[i].first, f1, acc};
            have_best = true;
        }
    }
    return best;
}

// Base-2 Jensen-Shannon divergence of two normalized histograms; in [0,1].
inline double js_divergence(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw ValidationError("js_divergence: bin count mismatch");
    double sp = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < 0.0 || q[i] < 0.0) throw ValidationError("js_divergence: negative mass");
        sp += p[i];
        sq += q[i];
    }
    if (sp == 0.0 || sq == 0.0) throw ValidationError("js_divergence: zero-mass histogram");
    auto klterm = [](double a, double m) { return a > 0.0 ? a * std::log2(a / m) : 0.0; };
    double js = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = p[i] / sp, qi = q[i] / sq;
        const double m = 0.5 * (pi + qi);
        js += 0.5 * klterm(pi, m) + 0.5 * klterm(qi, m);
    }
    return js;
}

// Mean predicted score per decision category, in the fixed order
// rejected < poster < spotlight < oral. Monotonicity is the caller's check.
inline std::vector<std::pair<Decision, double>> decision_trend(
    const std::map<std::string, double>& scores,
    const std::map<std::string, Decision>& decisions) {
    constexpr Decision order[] = {Decision::rejected, Decision::poster, Decision::spotlight,
                                  Decision::oral};
    std::vector<std::pair<Decision, double>> out;
    bool any = false;
    for (Decision d : order) {
        double sum = 0.0;
        int count = 0;
        for (const auto& [id, dec] : decisions) {
            if (dec != d) continue;
            const auto it = scores.find(id);
            if (it == scores.end())
                throw ValidationError("decision_trend: no score for \"" + id + "\"");
            sum += it->second;
            ++count;
        }
        if (count > 0) {
            out.emplace_back(d, sum / count);
            any = true;
        }
    }
    if (!any) throw ValidationError("decision_trend: no decided papers");
    return out;
}

}  // namespace naip
