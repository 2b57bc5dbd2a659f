#pragma once

#include <cmath>
#include <string>

#include "naip/math.hpp"
#include "naip/types.hpp"

namespace naip {

struct LossParams {
    double tau = 1.0;      // probit slope
    double m = 1.0;        // hinge margin
    double delta_h = 0.1;  // Huber threshold
    double kappa = 1.0;    // gap scale
    double lambda = 0.1;   // regression weight

    void validate() const {
        if (!(tau > 0.0)) throw ValidationError("loss: tau must be > 0");
        if (m < 0.0) throw ValidationError("loss: margin must be >= 0");
        if (!(delta_h > 0.0)) throw ValidationError("loss: delta_h must be > 0");
        if (lambda < 0.0) throw ValidationError("loss: lambda must be >= 0");
    }
};

// Loss value and its derivative with respect to the score difference d.
struct LossEval {
    double value = 0.0;
    double grad_d = 0.0;
};

namespace detail {
inline constexpr double kProbEps = 1e-12;  // keeps log(p) finite at extreme d

inline double clamp_prob(double p) {
    if (p < kProbEps) return kProbEps;
    if (p > 1.0 - kProbEps) return 1.0 - kProbEps;
    return p;
}

inline double sigmoid(double d) { return 1.0 / (1.0 + std::exp(-d)); }
}  // namespace detail

// RankNet cross-entropy on the sigmoid of the score difference. Both label
// branches evaluate the same expression at +-d, so the label-flip identity
// bce(d, z) == bce(-d, 1-z) holds bitwise.
inline LossEval bce(double d, int z) {
    const double dz = z == 1 ? d : -d;  // difference oriented toward the label
    const double value = -std::log(detail::clamp_prob(detail::sigmoid(dz)));
    const double grad = z == 1 ? -detail::sigmoid(-d) : detail::sigmoid(d);
    return {value, grad};
}

// Probit link: p = Phi(d / tau).
inline LossEval probit(double d, int z, double tau) {
    const double dz = z == 1 ? d : -d;
    const double p = detail::clamp_prob(norm_cdf(dz / tau));
    const double slope = norm_pdf(d / tau) / tau;  // pdf is even in d
    const double grad = (z == 1 ? -1.0 : 1.0) * slope / p;
    return {-std::log(p), grad};
}

// Squared error between preference probability and label.
inline LossEval brier(double d, int z) {
    const double r = z == 1 ? -detail::sigmoid(-d) : detail::sigmoid(d);  // p - z
    const double q = detail::sigmoid(d) * detail::sigmoid(-d);            // p(1-p)
    return {r * r, 2.0 * r * q};
}

// Margin loss on y*d with y = 2z-1; subgradient 0 at the kink.
inline LossEval hinge(double d, int z, double m) {
    const double y = 2.0 * z - 1.0;
    const double slack = m - y * d;
    if (slack > 0.0) return {slack, -y};
    return {0.0, 0.0};
}

// Huber penalty on the residual d - kappa*delta_signed.
inline LossEval huber_diff(double d, double delta_signed, double kappa, double delta_h) {
    const double r = d - kappa * delta_signed;
    if (std::abs(r) <= delta_h) return {0.5 * r * r, r};
    return {delta_h * (std::abs(r) - 0.5 * delta_h), r > 0.0 ? delta_h : -delta_h};
}

// Rank-then-regress: BCE plus lambda * (d - kappa*delta_signed)^2.
inline LossEval rtr(double d, int z, double delta_signed, double kappa, double lambda) {
    const LossEval base = bce(d, z);
    const double r = d - kappa * delta_signed;
    return {base.value + lambda * r * r, base.grad_d + 2.0 * lambda * r};
}

enum class LossKind { bce, probit, brier, hinge, huber, rtr };

inline LossKind loss_from_string(const std::string& s) {
    if (s == "bce") return LossKind::bce;
    if (s == "probit") return LossKind::probit;
    if (s == "brier") return LossKind::brier;
    if (s == "hinge") return LossKind::hinge;
    if (s == "huber") return LossKind::huber;
    if (s == "rtr") return LossKind::rtr;
    throw ValidationError("unknown loss: \"" + s + "\"");
}

inline const char* to_string(LossKind k) {
    switch (k) {
        case LossKind::bce: return "bce";
        case LossKind::probit: return "probit";
        case LossKind::brier: return "brier";
        case LossKind::hinge: return "hinge";
        case LossKind::huber: return "huber";
        default: return "rtr";
    }
}

// Uniform dispatcher; delta_signed is only consulted by huber/rtr.
inline LossEval eval_loss(LossKind kind, double d, int z, double delta_signed,
                          const LossParams& p) {
    switch (kind) {
        case LossKind::bce: return bce(d, z);
        case LossKind::probit: return probit(d, z, p.tau);
        case LossKind::brier: return brier(d, z);
        case LossKind::hinge: return hinge(d, z, p.m);
        case LossKind::huber: return huber_diff(d, delta_signed, p.kappa, p.delta_h);
        default: return rtr(d, z, delta_signed, p.kappa, p.lambda);
    }
}

}  // namespace naip
