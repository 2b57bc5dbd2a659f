#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "naip/math.hpp"
#include "naip/types.hpp"

namespace naip {

// One reviewer's normalized (score, confidence, observation std) triple.
struct NormalizedReview {
    double s_tilde = 0.0;  // in [0,1]
    double c_tilde = 0.0;  // in [alpha,1]
    double sigma = 0.0;    // > 0
};

enum class SigmaVariant { smooth, aggressive };

inline SigmaVariant sigma_variant_from_string(const std::string& s) {
    if (s == "smooth") return SigmaVariant::smooth;
    if (s == "aggressive") return SigmaVariant::aggressive;
    throw ValidationError("unknown sigma variant: \"" + s + "\"");
}

enum class PosteriorMode { truncated, clamped };

inline PosteriorMode posterior_from_string(const std::string& s) {
    if (s == "truncated") return PosteriorMode::truncated;
    if (s == "clamped") return PosteriorMode::clamped;
    throw ValidationError("unknown posterior mode: \"" + s + "\"");
}

struct RtsConfig {
    double alpha = 0.2;
    SigmaVariant sigma_variant = SigmaVariant::smooth;
    PosteriorMode posterior = PosteriorMode::truncated;

    void validate() const {
        if (alpha < 0.0 || alpha > 1.0)
            throw ValidationError("rts: alpha must be in [0,1]");
    }
};

// Min-max map of a raw score onto [0,1].
inline double normalize_score(double s, const VenueScale& scale) {
    if (s < scale.score_min || s > scale.score_max)
        throw ValidationError("normalize_score: value " + std::to_string(s) + " out of bounds");
    return (s - scale.score_min) / (scale.score_max - scale.score_min);
}

// Maps a raw confidence onto [alpha, 1]; alpha sets where the lowest
// confidence level lands.
inline double normalize_confidence(double c, const VenueScale& scale, double alpha) {
    if (c < scale.conf_min || c > scale.conf_max)
        throw ValidationError("normalize_confidence: value " + std::to_string(c) +
                              " out of bounds");
    if (alpha < 0.0 || alpha > 1.0)
        throw ValidationError("normalize_confidence: alpha must be in [0,1]");
    return alpha + (1.0 - alpha) * (c - scale.conf_min) / (scale.conf_max - scale.conf_min);
}

// Observation std as a decreasing function of normalized confidence.
inline double sigma(double c_tilde, SigmaVariant variant) {
    if (variant == SigmaVariant::smooth) return 0.2 * (1.0 - c_tilde) + 0.05;
    return 0.1 + 0.4 * (1.0 - c_tilde);
}

inline std::vector<NormalizedReview> normalize_reviews(const PaperRecord& r,
                                                       const VenueScale& scale,
                                                       const RtsConfig& cfg) {
    cfg.validate();
    std::vector<NormalizedReview> out;
    out.reserve(r.raw_scores.size());
    for (std::size_t i = 0; i < r.raw_scores.size(); ++i) {
        NormalizedReview nr;
        nr.s_tilde = normalize_score(r.raw_scores[i], scale);
        nr.c_tilde = normalize_confidence(r.raw_confidences[i], scale, cfg.alpha);
        nr.sigma = sigma(nr.c_tilde, cfg.sigma_variant);
        out.push_back(nr);
    }
    return out;
}

// Posterior mean of latent quality given the reviews as Gaussian observations.
// Precision-weighted Gaussian product, then either the truncated-to-[0,1]
// mean (uniform prior on [0,1]) or a plain clamp of the unconstrained mean.
inline double rts(const std::vector<NormalizedReview>& reviews, const RtsConfig& cfg) {
    cfg.validate();
    if (reviews.empty()) throw ValidationError("rts: empty review list");
    // canonical summation order makes the result exactly permutation-invariant
    std::vector<NormalizedReview> sorted = reviews;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.s_tilde != b.s_tilde) return a.s_tilde < b.s_tilde;
        return a.sigma < b.sigma;
    });
    double precision_sum = 0.0;
    double weighted_sum = 0.0;
    for (const auto& r : sorted) {
        if (!(r.sigma > 0.0)) throw ValidationError("rts: sigma must be > 0");
        const double p = 1.0 / (r.sigma * r.sigma);
        precision_sum += p;
        weighted_sum += p * r.s_tilde;
    }
    const double mu = weighted_sum / precision_sum;
    if (cfg.posterior == PosteriorMode::clamped) {
        return mu < 0.0 ? 0.0 : (mu > 1.0 ? 1.0 : mu);
    }
    const double sd = std::sqrt(1.0 / precision_sum);
    return truncated_normal_mean(mu, sd, 0.0, 1.0);
}

// Convenience: normalize + aggregate in one step.
inline double rts_of(const PaperRecord& r, const VenueScale& scale, const RtsConfig& cfg) {
    return rts(normalize_reviews(r, scale, cfg), cfg);
}

}  // namespace naip
