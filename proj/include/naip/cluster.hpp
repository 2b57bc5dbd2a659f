#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "naip/types.hpp"

namespace naip {

enum class Linkage { average, single, complete };

inline Linkage linkage_from_string(const std::string& s) {
    if (s == "average") return Linkage::average;
    if (s == "single") return Linkage::single;
    if (s == "complete") return Linkage::complete;
    throw ValidationError("unknown linkage: \"" + s + "\"");
}

enum class DistanceMetric { cosine, euclidean };

inline DistanceMetric metric_from_string(const std::string& s) {
    if (s == "cosine") return DistanceMetric::cosine;
    if (s == "euclidean") return DistanceMetric::euclidean;
    throw ValidationError("unknown metric: \"" + s + "\"");
}

struct ClusterConfig {
    double max_distance = 1.0;
    Linkage linkage = Linkage::average;
    DistanceMetric metric = DistanceMetric::cosine;

    void validate() const {
        if (!(max_distance > 0.0)) throw ValidationError("cluster: max_distance must be > 0");
    }
};

inline double point_distance(const std::vector<double>& x, const std::vector<double>& y,
                             DistanceMetric metric) {
    if (x.size() != y.size()) throw ValidationError("distance: dimension mismatch");
    if (metric == DistanceMetric::euclidean) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - y[i];
            s += d * d;
        }
        return std::sqrt(s);
    }
    double dot = 0.0, nx = 0.0, ny = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        dot += x[i] * y[i];
        nx += x[i] * x[i];
        ny += y[i] * y[i];
    }
    if (nx == 0.0 || ny == 0.0)
        throw ValidationError("cosine distance undefined for zero vector");
    return 1.0 - dot / (std::sqrt(nx) * std::sqrt(ny));
}

// Agglomerative clustering with Lance-Williams updates. Merging stops when
// the minimum inter-cluster linkage distance exceeds max_distance. Labels are
// 0-based, ordered by each cluster's first member in input order. Ties on the
// merge distance break toward the lexicographically smallest pair of cluster
// representatives (smallest original member index), so results are
// deterministic for a fixed input order.
inline std::vector<int> hcluster(const std::vector<std::vector<double>>& features,
                                 const ClusterConfig& cfg) {
    cfg.validate();
    const std::size_t n = features.size();
    if (n == 0) throw ValidationError("hcluster: empty input");
    if (n == 1) return {0};

    // dense symmetric distance matrix
    std::vector<double> dist(n * n, 0.0);
    auto d = [&](std::size_t i, std::size_t j) -> double& { return dist[i * n + j]; };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            d(i, j) = d(j, i) = point_distance(features[i], features[j], cfg.metric);

    std::vector<bool> active(n, true);
    std::vector<std::size_t> size(n, 1);
    std::vector<std::size_t> rep(n);  // smallest original member index
    for (std::size_t i = 0; i < n; ++i) rep[i] = i;
    std::vector<std::vector<std::size_t>> members(n);
    for (std::size_t i = 0; i < n; ++i) members[i] = {i};

    const double inf = std::numeric_limits<double>::infinity();

    // Per-row nearest-active-neighbor cache so each merge costs O(n) in the
    // common case instead of an O(n^2) pair scan. Ordering (distance, then the
    // (min rep, max rep) key) is identical to a full scan, since every pair
    // appears in the row of each endpoint.
    struct Nearest {
        std::size_t j = 0;
        double d = 0.0;
        std::pair<std::size_t, std::size_t> key;
    };
    std::vector<Nearest> nn(n);
    auto recompute_row = [&](std::size_t i) {
        Nearest best{0, inf, {n, n}};
        for (std::size_t j = 0; j < n; ++j) {
            if (!active[j] || j == i) continue;
            const double dij = d(i, j);
            const std::pair<std::size_t, std::size_t> key = std::minmax(rep[i], rep[j]);
            if (dij < best.d || (dij == best.d && key < best.key)) best = {j, dij, key};
        }
        nn[i] = best;
    };
    for (std::size_t i = 0; i < n; ++i) recompute_row(i);

    for (std::size_t merges = 0; merges + 1 < n; ++merges) {
        double best = inf;
        std::pair<std::size_t, std::size_t> bkey{n, n};
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) continue;
            if (nn[i].d < best || (nn[i].d == best && nn[i].key < bkey)) {
                best = nn[i].d;
                bkey = nn[i].key;
                bi = i;
                bj = nn[i].j;
            }
        }
        if (best > cfg.max_distance) break;

        // merge bj into bi
        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == bi || k == bj) continue;
            double nd;
            switch (cfg.linkage) {
                case Linkage::single: nd = std::min(d(bi, k), d(bj, k)); break;
                case Linkage::complete: nd = std::max(d(bi, k), d(bj, k)); break;
                default:
                    nd = (static_cast<double>(size[bi]) * d(bi, k) +
                          static_cast<double>(size[bj]) * d(bj, k)) /
                         static_cast<double>(size[bi] + size[bj]);
            }
            d(bi, k) = d(k, bi) = nd;
        }
        size[bi] += size[bj];
        rep[bi] = std::min(rep[bi], rep[bj]);
        members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
        active[bj] = false;

        // refresh caches: only distances to bi changed and bj went inactive
        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == bi) continue;
            if (nn[k].j == bi || nn[k].j == bj) {
                recompute_row(k);
            } else {
                const double dk = d(k, bi);
                const std::pair<std::size_t, std::size_t> key = std::minmax(rep[k], rep[bi]);
                if (dk < nn[k].d || (dk == nn[k].d && key < nn[k].key))
                    nn[k] = {bi, dk, key};
            }
        }
        recompute_row(bi);
    }

    // label clusters by first member's input index
    std::vector<std::pair<std::size_t, std::size_t>> order;  // (rep, cluster slot)
    for (std::size_t i = 0; i < n; ++i)
        if (active[i]) order.emplace_back(rep[i], i);
    std::sort(order.begin(), order.end());

    std::vector<int> labels(n, -1);
    for (std::size_t lab = 0; lab < order.size(); ++lab)
        for (std::size_t m : members[order[lab].second])
            labels[m] = static_cast<int>(lab);
    return labels;
}

// Clusters the papers' features and builds the (year, cluster) group map.
inline std::map<GroupKey, std::vector<std::string>> assign_groups(
    std::vector<PaperRecord>& papers, const ClusterConfig& cfg) {
    std::vector<std::vector<double>> features;
    features.reserve(papers.size());
    for (const auto& p : papers) {
        if (p.features.empty())
            throw ValidationError("assign_groups: paper \"" + p.id + "\" has no features");
        features.push_back(p.features);
    }
    const std::vector<int> labels = hcluster(features, cfg);
    std::map<GroupKey, std::vector<std::string>> groups;
    for (std::size_t i = 0; i < papers.size(); ++i) {
        papers[i].cluster_id = labels[i];
        groups[GroupKey{papers[i].year, labels[i]}].push_back(papers[i].id);
    }
    return groups;
}

}  // namespace naip
