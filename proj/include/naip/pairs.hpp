#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "naip/math.hpp"
#include "naip/types.hpp"

namespace naip {

// Ordered training pair with binary label and its difficulty bucket.
struct PairSample {
    std::string id_a;
    std::string id_b;
    int label_z = 0;            // 1 iff delta_signed > 0
    double delta = 0.0;         // |rts_a - rts_b|
    double delta_signed = 0.0;  // rts_a - rts_b
    int bucket = 0;             // 0..8
    GroupKey group;
};

// Difficulty distribution over the 9 gap intervals with edges [0, 0.1, ..., 1.0].
struct BucketRatios {
    std::array<double, 9> ratios{};

    void validate() const {
        double sum = 0.0;
        for (double r : ratios) {
            if (r < 0.0) throw ValidationError("bucket ratios must be >= 0");
            sum += r;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw ValidationError("bucket ratios must sum to 1 (got " + std::to_string(sum) + ")");
    }
};

// Difficulty presets over gap buckets, easy-heavy to hard-heavy.
inline BucketRatios bucket_preset(const std::string& name) {
    if (name == "easiest")
        return {{0.03, 0.04, 0.06, 0.08, 0.10, 0.12, 0.14, 0.16, 0.27}};
    if (name == "easier")
        return {{0.05, 0.06, 0.07, 0.08, 0.10, 0.12, 0.15, 0.17, 0.20}};
    if (name == "moderate")
        return {{0.111, 0.111, 0.111, 0.111, 0.111, 0.111, 0.111, 0.111, 0.112}};
    if (name == "harder")
        return {{0.20, 0.17, 0.15, 0.13, 0.10, 0.08, 0.07, 0.06, 0.04}};
    if (name == "hardest")
        return {{0.27, 0.16, 0.14, 0.12, 0.10, 0.08, 0.06, 0.04, 0.03}};
    throw ValidationError("unknown bucket preset: \"" + name + "\"");
}

struct PairConfig {
    double min_gap = 0.05;
    std::optional<int> max_occurrence;  // unlimited when unset
    int target_pairs = 10000;
    std::uint64_t seed = 42;

    void validate() const {
        if (min_gap < 0.0 || min_gap >= 1.0)
            throw ValidationError("pairs: min_gap must be in [0,1)");
        if (max_occurrence && *max_occurrence < 1)
            throw ValidationError("pairs: max_occurrence must be >= 1");
    }
};

// Right-open intervals [0.1k, 0.1(k+1)) for k=0..7; bucket 8 is [0.8, 1.0].
inline int bucket_of(double delta) {
    if (delta < 0.0 || delta > 1.0)
        throw ValidationError("bucket_of: delta must be in [0,1]");
    const int k = static_cast<int>(std::floor(delta * 10.0));
    return k > 8 ? 8 : k;
}

// Enumerates within-group candidate pairs and greedily accepts them in
// seeded-shuffled order under the gap and occurrence constraints. Each
// accepted pair's (a, b) order is randomized with probability 0.5, the label
// adjusted to match. Exact RTS ties are dropped (label undefined).
inline std::vector<PairSample> build_pairs(const std::vector<PaperRecord>& papers,
                                           const PairConfig& cfg) {
    cfg.validate();
    std::map<GroupKey, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < papers.size(); ++i) {
        const auto& p = papers[i];
        if (!p.rts) throw ValidationError("build_pairs: paper \"" + p.id + "\" has no rts");
        if (!p.cluster_id)
            throw ValidationError("build_pairs: paper \"" + p.id + "\" has no cluster_id");
        groups[GroupKey{p.year, *p.cluster_id}].push_back(i);
    }

    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    for (const auto& [key, idx] : groups) {
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t b = a + 1; b < idx.size(); ++b) {
                const double gap = std::abs(*papers[idx[a]].rts - *papers[idx[b]].rts);
                if (gap < cfg.min_gap || gap == 0.0) continue;
                candidates.emplace_back(idx[a], idx[b]);
            }
    }

    Rng rng(cfg.seed);
    rng.shuffle(candidates);

    std::map<std::string, int> occurrence;
    std::vector<PairSample> out;
    out.reserve(candidates.size());
    for (const auto& [ia, ib] : candidates) {
        const auto& pa = papers[ia];
        const auto& pb = papers[ib];
        if (cfg.max_occurrence &&
            (occurrence[pa.id] >= *cfg.max_occurrence || occurrence[pb.id] >= *cfg.max_occurrence))
            continue;
        PairSample s;
        const bool flip = rng.uniform() < 0.5;
        const PaperRecord& first = flip ? pb : pa;
        const PaperRecord& second = flip ? pa : pb;
        s.id_a = first.id;
        s.id_b = second.id;
        s.delta_signed = *first.rts - *second.rts;
        s.delta = std::abs(s.delta_signed);
        s.label_z = s.delta_signed > 0.0 ? 1 : 0;
        s.bucket = bucket_of(s.delta);
        s.group = GroupKey{pa.year, *pa.cluster_id};
        out.push_back(std::move(s));
        ++occurrence[pa.id];
        ++occurrence[pb.id];
    }
    return out;
}

// Draws n pool indices with replacement. Per-bucket counts target n*ratios
// rounded by largest remainder; mass on empty buckets is redistributed
// proportionally across the nonempty ones.
inline std::vector<std::size_t> sample_pair_indices(const std::vector<PairSample>& pairs,
                                                    const BucketRatios& ratios, int n,
                                                    std::uint64_t seed) {
    ratios.validate();
    if (n < 1) throw ValidationError("sample_pairs: n must be >= 1");

    std::array<std::vector<std::size_t>, 9> by_bucket;
    for (std::size_t i = 0; i < pairs.size(); ++i) by_bucket[pairs[i].bucket].push_back(i);

    double nonempty_mass = 0.0;
    for (int k = 0; k < 9; ++k)
        if (!by_bucket[k].empty()) nonempty_mass += ratios.ratios[k];
    if (nonempty_mass == 0.0) {
        bool any = false;
        for (int k = 0; k < 9; ++k) any = any || !by_bucket[k].empty();
        if (!any) throw ValidationError("sample_pairs: all buckets empty");
        throw ValidationError("sample_pairs: target mass lies entirely on empty buckets");
    }

    // largest-remainder apportionment over feasible buckets
    std::array<int, 9> counts{};
    std::array<double, 9> exact{};
    int assigned = 0;
    for (int k = 0; k < 9; ++k) {
        exact[k] = by_bucket[k].empty() ? 0.0 : n * ratios.ratios[k] / nonempty_mass;
        counts[k] = static_cast<int>(std::floor(exact[k]));
        assigned += counts[k];
    }
    std::vector<int> order(9);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return exact[a] - std::floor(exact[a]) > exact[b] - std::floor(exact[b]);
    });
    for (int i = 0; assigned < n; ++i) {
        const int k = order[i % 9];
        if (by_bucket[k].empty()) continue;
        ++counts[k];
        ++assigned;
    }

    Rng rng(seed);
    std::vector<std::size_t> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < 9; ++k)
        for (int c = 0; c < counts[k]; ++c)
            out.push_back(by_bucket[k][rng.below(by_bucket[k].size())]);
    rng.shuffle(out);
    return out;
}

inline std::vector<PairSample> sample_pairs(const std::vector<PairSample>& pairs,
                                            const BucketRatios& ratios, int n,
                                            std::uint64_t seed) {
    std::vector<PairSample> out;
    out.reserve(static_cast<std::size_t>(n));
    for (std::size_t i : sample_pair_indices(pairs, ratios, n, seed)) out.push_back(pairs[i]);
    return out;
}

// Line-delimited pair file, one PairSample per line.
inline void write_pairs(const std::vector<PairSample>& pairs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write pair file: " + path);
    for (const auto& p : pairs) {
        nlohmann::json j{{"id_a", p.id_a},
                         {"id_b", p.id_b},
                         {"label_z", p.label_z},
                         {"delta", p.delta},
                         {"delta_signed", p.delta_signed},
                         {"bucket", p.bucket},
                         {"year", p.group.year},
                         {"cluster_id", p.group.cluster_id}};
        out << j.dump() << '\n';
    }
    if (!out) throw ValidationError("write failed: " + path);
}

inline std::vector<PairSample> load_pairs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open pair file: " + path);
    std::vector<PairSample> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            PairSample p;
            p.id_a = j.at("id_a").get<std::string>();
            p.id_b = j.at("id_b").get<std::string>();
            p.label_z = j.at("label_z").get<int>();
            p.delta = j.at("delta").get<double>();
            p.delta_signed = j.at("delta_signed").get<double>();
            p.bucket = j.at("bucket").get<int>();
            p.group = GroupKey{j.at("year").get<int>(), j.at("cluster_id").get<int>()};
            out.push_back(std::move(p));
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(path + ":" + std::to_string(lineno) +
                                  ": malformed pair record: " + e.what());
        }
    }
    return out;
}

// Linear interpolation between two difficulty distributions, renormalized.
inline BucketRatios curriculum_ratios(double t, const BucketRatios& start,
                                      const BucketRatios& end) {
    if (t < 0.0 || t > 1.0) throw ValidationError("curriculum_ratios: t must be in [0,1]");
    BucketRatios out;
    double sum = 0.0;
    for (int k = 0; k < 9; ++k) {
        out.ratios[k] = (1.0 - t) * start.ratios[k] + t * end.ratios[k];
        sum += out.ratios[k];
    }
    for (int k = 0; k < 9; ++k) out.ratios[k] /= sum;
    return out;
}

}  // namespace naip
