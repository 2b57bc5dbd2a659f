#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <span>
#include <string>
#include <vector>

#include "naip/math.hpp"
#include "naip/types.hpp"

namespace naip {

enum class ScorerKind { linear, mlp1 };

inline ScorerKind scorer_kind_from_string(const std::string& s) {
    if (s == "linear") return ScorerKind::linear;
    if (s == "mlp1") return ScorerKind::mlp1;
    throw ValidationError("unknown scorer kind: \"" + s + "\"");
}

inline const char* to_string(ScorerKind k) {
    return k == ScorerKind::linear ? "linear" : "mlp1";
}

// Pointwise scoring function f(x; theta). Linear: w.x + b.
// mlp1: w2.tanh(W1 x + b1) + b2, one hidden layer of width `hidden`.
// Parameters are stored flat: linear [w | b]; mlp1 [W1 row-major | b1 | w2 | b2].
struct ScorerModel {
    ScorerKind kind = ScorerKind::linear;
    int feature_dim = 0;
    int hidden = 16;  // mlp1 only
    std::vector<double> params;

    std::size_t param_count() const {
        if (kind == ScorerKind::linear) return static_cast<std::size_t>(feature_dim) + 1;
        return static_cast<std::size_t>(hidden) * feature_dim + hidden + hidden + 1;
    }

    // Index of the output bias (b for linear, b2 for mlp1).
    std::size_t output_bias_index() const { return param_count() - 1; }
};

// Parameters uniform in [-init_scale, init_scale], biases zero.
inline ScorerModel init_model(ScorerKind kind, int d, std::uint64_t seed, double init_scale,
                              int hidden = 16) {
    if (d < 1) throw ValidationError("init_model: feature_dim must be >= 1");
    if (kind == ScorerKind::mlp1 && hidden < 1)
        throw ValidationError("init_model: hidden must be >= 1");
    ScorerModel m;
    m.kind = kind;
    m.feature_dim = d;
    m.hidden = hidden;
    m.params.assign(m.param_count(), 0.0);
    Rng rng(seed);
    if (kind == ScorerKind::linear) {
        for (int i = 0; i < d; ++i) m.params[i] = rng.uniform(-init_scale, init_scale);
    } else {
        for (int i = 0; i < hidden * d; ++i) m.params[i] = rng.uniform(-init_scale, init_scale);
        const std::size_t w2_off = static_cast<std::size_t>(hidden) * d + hidden;
        for (int i = 0; i < hidden; ++i)
            m.params[w2_off + i] = rng.uniform(-init_scale, init_scale);
    }
    return m;
}

inline double score(const ScorerModel& m, std::span<const double> x) {
    if (static_cast<int>(x.size()) != m.feature_dim)
        throw ValidationError("score: feature dimension mismatch");
    if (m.kind == ScorerKind::linear) {
        double s = m.params[m.feature_dim];
        for (int i = 0; i < m.feature_dim; ++i) s += m.params[i] * x[i];
        return s;
    }
    const int h = m.hidden, d = m.feature_dim;
    const double* w1 = m.params.data();
    const double* b1 = w1 + static_cast<std::size_t>(h) * d;
    const double* w2 = b1 + h;
    const double b2 = w2[h];
    double s = b2;
    for (int j = 0; j < h; ++j) {
        double a = b1[j];
        for (int i = 0; i < d; ++i) a += w1[static_cast<std::size_t>(j) * d + i] * x[i];
        s += w2[j] * std::tanh(a);
    }
    return s;
}

// Accumulates scale * d(score)/d(theta) into grad (same layout as params).
inline void accumulate_score_grad(const ScorerModel& m, std::span<const double> x, double scale,
                                  std::vector<double>& grad) {
    if (m.kind == ScorerKind::linear) {
        for (int i = 0; i < m.feature_dim; ++i) grad[i] += scale * x[i];
        grad[m.feature_dim] += scale;
        return;
    }
    const int h = m.hidden, d = m.feature_dim;
    const double* w1 = m.params.data();
    const double* b1 = w1 + static_cast<std::size_t>(h) * d;
    const double* w2 = b1 + h;
    const std::size_t b1_off = static_cast<std::size_t>(h) * d;
    const std::size_t w2_off = b1_off + h;
    for (int j = 0; j < h; ++j) {
        double a = b1[j];
        for (int i = 0; i < d; ++i) a += w1[static_cast<std::size_t>(j) * d + i] * x[i];
        const double t = std::tanh(a);
        const double dt = scale * w2[j] * (1.0 - t * t);
        for (int i = 0; i < d; ++i) grad[static_cast<std::size_t>(j) * d + i] += dt * x[i];
        grad[b1_off + j] += dt;
        grad[w2_off + j] += scale * t;
    }
    grad[w2_off + h] += scale;  // b2
}

// Model file: decimal text, one parameter per line after the header.
inline void save_model(const ScorerModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write model file: " + path);
    out << "naip-model 1\n";
    out << "kind " << to_string(m.kind) << '\n';
    out << "feature_dim " << m.feature_dim << '\n';
    out << "hidden " << m.hidden << '\n';
    out << std::setprecision(17);
    for (double p : m.params) out << p << '\n';
    if (!out) throw ValidationError("write failed: " + path);
}

inline ScorerModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open model file: " + path);
    std::string magic, version, key;
    in >> magic >> version;
    if (magic != "naip-model") throw ValidationError(path + ": not a model file");
    ScorerModel m;
    std::string kind;
    in >> key >> kind >> key >> m.feature_dim >> key >> m.hidden;
    m.kind = scorer_kind_from_string(kind);
    if (m.feature_dim < 1) throw ValidationError(path + ": bad feature_dim");
    m.params.resize(m.param_count());
    for (double& p : m.params) {
        if (!(in >> p)) throw ValidationError(path + ": truncated parameter list");
        if (!std::isfinite(p)) throw ValidationError(path + ": non-finite parameter");
    }
    return m;
}

}  // namespace naip
