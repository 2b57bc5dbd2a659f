#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace naip {

// Thrown for any input that violates a dataset or config contract.
class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Raw rating-scale bounds of a venue (e.g. ICLR: scores 1-10, confidences 1-5).
struct VenueScale {
    double score_min = 1.0;
    double score_max = 10.0;
    double conf_min = 1.0;
    double conf_max = 5.0;

    void validate() const {
        if (!(score_min < score_max))
            throw ValidationError("venue scale: score_min must be < score_max");
        if (!(conf_min < conf_max))
            throw ValidationError("venue scale: conf_min must be < conf_max");
    }
};

enum class Decision { rejected, accepted, poster, spotlight, oral, unknown };

inline const char* to_string(Decision d) {
    switch (d) {
        case Decision::rejected: return "rejected";
        case Decision::accepted: return "accepted";
        case Decision::poster: return "poster";
        case Decision::spotlight: return "spotlight";
        case Decision::oral: return "oral";
        default: return "unknown";
    }
}

inline Decision decision_from_string(const std::string& s) {
    if (s == "rejected") return Decision::rejected;
    if (s == "accepted") return Decision::accepted;
    if (s == "poster") return Decision::poster;
    if (s == "spotlight") return Decision::spotlight;
    if (s == "oral") return Decision::oral;
    if (s == "unknown") return Decision::unknown;
    throw ValidationError("unknown decision value: \"" + s + "\"");
}

// One submission: reviews, year, features, decision, derived RTS and cluster.
struct PaperRecord {
    std::string id;
    int year = 0;
    std::vector<double> raw_scores;
    std::vector<double> raw_confidences;
    Decision decision = Decision::unknown;
    std::vector<double> features;
    std::optional<int> cluster_id;
    std::optional<double> rts;
    std::optional<double> latent_quality;  // synthetic data only
};

// (year, cluster) cell within which training pairs are formed.
struct GroupKey {
    int year = 0;
    int cluster_id = 0;

    auto operator<=>(const GroupKey&) const = default;
};

}  // namespace naip
