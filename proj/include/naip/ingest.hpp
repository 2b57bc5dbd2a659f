#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "naip/types.hpp"

namespace naip {

namespace detail {

inline nlohmann::json record_to_json(const PaperRecord& r) {
    nlohmann::json j;
    j["id"] = r.id;
    j["year"] = r.year;
    j["raw_scores"] = r.raw_scores;
    j["raw_confidences"] = r.raw_confidences;
    j["decision"] = to_string(r.decision);
    j["features"] = r.features;
    if (r.cluster_id) j["cluster_id"] = *r.cluster_id;
    if (r.rts) j["rts"] = *r.rts;
    if (r.latent_quality) j["latent_quality"] = *r.latent_quality;
    return j;
}

inline PaperRecord record_from_json(const nlohmann::json& j) {
    PaperRecord r;
    r.id = j.at("id").get<std::string>();
    r.year = j.at("year").get<int>();
    r.raw_scores = j.at("raw_scores").get<std::vector<double>>();
    r.raw_confidences = j.at("raw_confidences").get<std::vector<double>>();
    r.decision = decision_from_string(j.value("decision", std::string("unknown")));
    if (j.contains("features")) r.features = j.at("features").get<std::vector<double>>();
    if (j.contains("cluster_id")) r.cluster_id = j.at("cluster_id").get<int>();
    if (j.contains("rts")) r.rts = j.at("rts").get<double>();
    if (j.contains("latent_quality")) r.latent_quality = j.at("latent_quality").get<double>();
    return r;
}

}  // namespace detail

// Validates one record against the venue scale. `where` names the record in
// error messages (id plus line number when loading from a file).
inline void validate_record(const PaperRecord& r, const VenueScale& scale,
                            const std::string& where) {
    if (r.raw_scores.empty())
        throw ValidationError(where + ": at least one review required");
    if (r.raw_scores.size() != r.raw_confidences.size())
        throw ValidationError(where + ": raw_scores and raw_confidences length mismatch (" +
                              std::to_string(r.raw_scores.size()) + " vs " +
                              std::to_string(r.raw_confidences.size()) + ")");
    for (double s : r.raw_scores)
        if (s < scale.score_min || s > scale.score_max)
            throw ValidationError(where + ": score " + std::to_string(s) +
                                  " outside venue scale [" + std::to_string(scale.score_min) +
                                  ", " + std::to_string(scale.score_max) + "]");
    for (double c : r.raw_confidences)
        if (c < scale.conf_min || c > scale.conf_max)
            throw ValidationError(where + ": confidence " + std::to_string(c) +
                                  " outside venue scale [" + std::to_string(scale.conf_min) +
                                  ", " + std::to_string(scale.conf_max) + "]");
}

// Loads a line-delimited dataset, validating every record against the scale.
// Errors name the offending record and line; nothing is silently dropped.
inline std::vector<PaperRecord> load_dataset(const std::string& path, const VenueScale& scale) {
    scale.validate();
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open dataset file: " + path);

    std::vector<PaperRecord> records;
    std::unordered_set<std::string> seen_ids;
    std::size_t feature_dim = 0;
    bool dim_set = false;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        PaperRecord r;
        try {
            r = detail::record_from_json(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(path + ":" + std::to_string(lineno) +
                                  ": malformed record: " + e.what());
        }
        const std::string where =
            "record \"" + r.id + "\" (" + path + ":" + std::to_string(lineno) + ")";
        validate_record(r, scale, where);
        if (!seen_ids.insert(r.id).second)
            throw ValidationError(where + ": duplicate id");
        if (!r.features.empty()) {
            if (dim_set && r.features.size() != feature_dim)
                throw ValidationError(where + ": feature dimension " +
                                      std::to_string(r.features.size()) +
                                      " differs from earlier records (" +
                                      std::to_string(feature_dim) + ")");
            feature_dim = r.features.size();
            dim_set = true;
        }
        records.push_back(std::move(r));
    }
    return records;
}

// Writes records one JSON object per line; load(write(R)) == R field-for-field.
inline void write_dataset(const std::vector<PaperRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write dataset file: " + path);
    for (const auto& r : records) out << detail::record_to_json(r).dump() << '\n';
    if (!out) throw ValidationError("write failed: " + path);
}

// Venue-scale config file: a single JSON object with the four bound fields.
inline VenueScale load_scale(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scale config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path + ": malformed scale config: " + std::string(e.what()));
    }
    VenueScale s;
    s.score_min = j.at("score_min").get<double>();
    s.score_max = j.at("score_max").get<double>();
    s.conf_min = j.at("conf_min").get<double>();
    s.conf_max = j.at("conf_max").get<double>();
    s.validate();
    return s;
}

// Dataset-wide min/max bounds, for venues whose rating scale is unknown.
inline VenueScale infer_scale(const std::vector<PaperRecord>& records) {
    if (records.empty()) throw ValidationError("cannot infer scale from empty dataset");
    VenueScale s{1e300, -1e300, 1e300, -1e300};
    for (const auto& r : records) {
        for (double v : r.raw_scores) {
            s.score_min = std::min(s.score_min, v);
            s.score_max = std::max(s.score_max, v);
        }
        for (double v : r.raw_confidences) {
            s.conf_min = std::min(s.conf_min, v);
            s.conf_max = std::max(s.conf_max, v);
        }
    }
    s.validate();
    return s;
}

}  // namespace naip
