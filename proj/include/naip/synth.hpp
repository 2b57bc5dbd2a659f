#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "naip/math.hpp"
#include "naip/rts.hpp"
#include "naip/types.hpp"

namespace naip {

struct SynthConfig {
    int n_papers = 1000;
    int n_domains = 5;
    std::vector<int> years = {2022, 2023, 2024, 2025};
    double domain_bias_range = 0.2;  // each domain offset uniform in +-range
    double year_drift = 0.05;        // score offset per year since the first
    int reviewers_min = 3;
    int reviewers_max = 5;
    double accept_quantile = 0.3;  // top fraction accepted per (domain, year)
    int feature_dim = 8;           // dims carrying latent quality
    int nuisance_dim = 12;         // dims carrying domain/year bias
    std::uint64_t seed = 42;
    VenueScale scale;
    double alpha = 0.2;
    SigmaVariant sigma_variant = SigmaVariant::smooth;
    double signal_noise = 0.05;    // per-dim noise on quality features
    double nuisance_noise = 0.02;  // per-dim noise on bias features

    void validate() const {
        scale.validate();
        if (n_domains < 1 || years.empty()) throw ValidationError("synth: empty grid");
        if (n_papers < n_domains * static_cast<int>(years.size()))
            throw ValidationError("synth: n_papers must be >= n_domains * |years|");
        if (!(accept_quantile > 0.0 && accept_quantile < 1.0))
            throw ValidationError("synth: accept_quantile must be in (0,1)");
        if (reviewers_min < 1 || reviewers_max < reviewers_min)
            throw ValidationError("synth: bad reviewer bounds");
        if (feature_dim < 1) throw ValidationError("synth: feature_dim must be >= 1");
        if (nuisance_dim < 0) throw ValidationError("synth: nuisance_dim must be >= 0");
        if (domain_bias_range < 0.0) throw ValidationError("synth: bias range must be >= 0");
    }
};

// Ground truth behind a generated dataset.
struct SynthTruth {
    std::vector<double> domain_offsets;        // per domain
    std::map<int, double> year_offsets;        // per year
    std::map<std::string, int> domain_of;      // paper id -> domain
    int year0 = 0;
};

struct SynthDataset {
    std::vector<PaperRecord> papers;
    SynthTruth truth;
};

// Samples papers on a (domain, year) grid. Observed normalized scores are
// latent quality plus the domain offset, the year drift, and per-review
// Gaussian noise with std sigma(c); the sum is clamped to [0,1] and mapped
// back to the raw venue scale. Quality lives in the first feature_dim feature
// dims; domain identity and year live in the trailing nuisance dims, so a
// pointwise regressor on raw scores can (and will) absorb the bias.
inline SynthDataset generate(const SynthConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    SynthDataset out;

    const int n_years = static_cast<int>(cfg.years.size());
    out.truth.year0 = *std::min_element(cfg.years.begin(), cfg.years.end());
    for (int d = 0; d < cfg.n_domains; ++d)
        out.truth.domain_offsets.push_back(
            rng.uniform(-cfg.domain_bias_range, cfg.domain_bias_range));
    for (int y : cfg.years)
        out.truth.year_offsets[y] = cfg.year_drift * (y - out.truth.year0);

    // unit-norm domain signature over the nuisance dims (last dim tracks year)
    const int sig_dim = cfg.nuisance_dim > 1 ? cfg.nuisance_dim - 1 : cfg.nuisance_dim;
    std::vector<std::vector<double>> signatures(cfg.n_domains);
    for (auto& sig : signatures) {
        sig.resize(sig_dim);
        double norm = 0.0;
        for (double& v : sig) {
            v = rng.uniform(-1.0, 1.0);
            norm += v * v;
        }
        norm = std::sqrt(norm);
        if (norm > 0.0)
            for (double& v : sig) v *= 1.5 / norm;
    }

    const int conf_levels =
        static_cast<int>(std::floor(cfg.scale.conf_max - cfg.scale.conf_min)) + 1;

    for (int i = 0; i < cfg.n_papers; ++i) {
        const int cell = i % (cfg.n_domains * n_years);
        const int domain = cell % cfg.n_domains;
        const int year = cfg.years[cell / cfg.n_domains];

        PaperRecord r;
        r.id = "s" + std::to_string(i);
        r.year = year;
        const double x = rng.uniform();
        r.latent_quality = x;
        const double bias = out.truth.domain_offsets[domain] + out.truth.year_offsets[year];

        const int n_rev = cfg.reviewers_min +
                          static_cast<int>(rng.below(cfg.reviewers_max - cfg.reviewers_min + 1));
        for (int j = 0; j < n_rev; ++j) {
            const double c_raw =
                cfg.scale.conf_min + static_cast<double>(rng.below(conf_levels));
            const double c_tilde = normalize_confidence(c_raw, cfg.scale, cfg.alpha);
            const double sd = sigma(c_tilde, cfg.sigma_variant);
            double s_tilde = x + bias + sd * rng.normal();
            s_tilde = std::clamp(s_tilde, 0.0, 1.0);
            r.raw_scores.push_back(cfg.scale.score_min +
                                   s_tilde * (cfg.scale.score_max - cfg.scale.score_min));
            r.raw_confidences.push_back(c_raw);
        }

        // quality dims centered at 0 so cross-domain cosine similarity stays low
        r.features.reserve(cfg.feature_dim + cfg.nuisance_dim);
        for (int k = 0; k < cfg.feature_dim; ++k)
            r.features.push_back((x - 0.5) + cfg.signal_noise * rng.normal());
        for (int k = 0; k < sig_dim; ++k)
            r.features.push_back(signatures[domain][k] + cfg.nuisance_noise * rng.normal());
        if (cfg.nuisance_dim > 1)
            r.features.push_back(0.1 * (year - out.truth.year0) +
                                 cfg.nuisance_noise * rng.normal());

        out.truth.domain_of[r.id] = domain;
        out.papers.push_back(std::move(r));
    }

    // decisions: per (domain, year) cell, top accept_quantile by raw mean
    // score; of the cell, top 2% oral, next 8% spotlight, rest of quota poster
    std::map<std::pair<int, int>, std::vector<std::size_t>> cells;
    for (std::size_t i = 0; i < out.papers.size(); ++i)
        cells[{out.truth.domain_of[out.papers[i].id], out.papers[i].year}].push_back(i);
    for (auto& [key, idx] : cells) {
        auto mean_score = [&](std::size_t i) {
            const auto& s = out.papers[i].raw_scores;
            return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
        };
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            const double ma = mean_score(a), mb = mean_score(b);
            if (ma != mb) return ma > mb;
            return out.papers[a].id < out.papers[b].id;
        });
        const int n = static_cast<int>(idx.size());
        const int n_accept = static_cast<int>(std::lround(cfg.accept_quantile * n));
        const int n_oral = std::min(n_accept, static_cast<int>(std::lround(0.02 * n)));
        const int n_spot = std::min(n_accept - n_oral, static_cast<int>(std::lround(0.08 * n)));
        for (int rank = 0; rank < n; ++rank) {
            Decision dec = Decision::rejected;
            if (rank < n_oral) dec = Decision::oral;
            else if (rank < n_oral + n_spot) dec = Decision::spotlight;
            else if (rank < n_accept) dec = Decision::poster;
            out.papers[idx[rank]].decision = dec;
        }
    }
    return out;
}

// Empirical residual std per confidence level, against the generating sigma.
struct NoiseCalibrationEntry {
    double c_raw = 0.0;
    double c_tilde = 0.0;
    double expected_sigma = 0.0;
    double empirical_std = 0.0;
    std::size_t count = 0;
};

// Groups review residuals s_tilde - (latent + bias) by confidence level.
// Observations clamped at the [0,1] boundary are dropped, which leaves a
// truncated sample (each survivor's residual is confined to [-mu, 1-mu]);
// the naive std would therefore underestimate sigma for noisy levels. The
// reported std is the truncated-normal maximum-likelihood estimate of sigma
// given those per-observation bounds, which is consistent.
inline std::vector<NoiseCalibrationEntry> noise_calibration_check(const SynthDataset& data,
                                                                  const SynthConfig& cfg) {
    struct Obs {
        double r;   // residual s_tilde - mu
        double mu;  // latent + bias, the truncation anchor
    };
    std::map<double, std::vector<Obs>> by_level;
    for (const auto& p : data.papers) {
        if (!p.latent_quality)
            throw ValidationError("noise_calibration_check: latent_quality missing");
        if (p.raw_scores.empty())
            throw ValidationError("noise_calibration_check: paper with no reviews");
        const double bias = data.truth.domain_offsets[data.truth.domain_of.at(p.id)] +
                            data.truth.year_offsets.at(p.year);
        const double mu = *p.latent_quality + bias;
        for (std::size_t j = 0; j < p.raw_scores.size(); ++j) {
            const double s_tilde = (p.raw_scores[j] - cfg.scale.score_min) /
                                   (cfg.scale.score_max - cfg.scale.score_min);
            if (s_tilde <= 0.0 || s_tilde >= 1.0) continue;  // censored by clamping
            by_level[p.raw_confidences[j]].push_back({s_tilde - mu, mu});
        }
    }
    std::vector<NoiseCalibrationEntry> out;
    for (const auto& [c_raw, obs] : by_level) {
        NoiseCalibrationEntry e;
        e.c_raw = c_raw;
        e.c_tilde = normalize_confidence(c_raw, cfg.scale, cfg.alpha);
        e.expected_sigma = sigma(e.c_tilde, cfg.sigma_variant);
        e.count = obs.size();

        auto neg_loglik = [&](double s) {
            double nll = 0.0;
            for (const Obs& o : obs) {
                const double mass = norm_cdf((1.0 - o.mu) / s) - norm_cdf(-o.mu / s);
                nll += std::log(s) + 0.5 * (o.r / s) * (o.r / s) +
                       std::log(std::max(mass, 1e-300));
            }
            return nll;
        };
        // golden-section search over sigma; unimodal in s for this family
        double lo = 1e-3, hi = 1.0;
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
        double fa = neg_loglik(a), fb = neg_loglik(b);
        for (int it = 0; it < 80; ++it) {
            if (fa < fb) {
                hi = b;
                b = a;
                fb = fa;
                a = hi - gr * (hi - lo);
                fa = neg_loglik(a);
            } else {
                lo = a;
                a = b;
                fa = fb;
                b = lo + gr * (hi - lo);
                fb = neg_loglik(b);
            }
        }
        e.empirical_std = obs.size() > 1 ? 0.5 * (lo + hi) : 0.0;
        out.push_back(e);
    }
    return out;
}

// Truth sidecar file (JSON): offsets and the id -> domain map.
inline void write_truth(const SynthTruth& truth, const std::string& path) {
    nlohmann::json j;
    j["domain_offsets"] = truth.domain_offsets;
    j["year0"] = truth.year0;
    for (const auto& [year, off] : truth.year_offsets)
        j["year_offsets"][std::to_string(year)] = off;
    for (const auto& [id, d] : truth.domain_of) j["domain_of"][id] = d;
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write truth file: " + path);
    out << j.dump(2) << '\n';
}

inline SynthTruth load_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open truth file: " + path);
    nlohmann::json j;
    in >> j;
    SynthTruth t;
    t.domain_offsets = j.at("domain_offsets").get<std::vector<double>>();
    t.year0 = j.at("year0").get<int>();
    for (const auto& [k, v] : j.at("year_offsets").items())
        t.year_offsets[std::stoi(k)] = v.get<double>();
    for (const auto& [k, v] : j.at("domain_of").items()) t.domain_of[k] = v.get<int>();
    return t;
}

}  // namespace naip
