#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace naip {

inline constexpr double kPi = 3.14159265358979323846;

// Standard normal density.
inline double norm_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
}

// Standard normal CDF via erfc; accurate to ~1e-15 over the double range.
inline double norm_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Mean of N(mu, sd^2) restricted to [lo, hi].
// Falls back to clamping when the interval mass underflows.
inline double truncated_normal_mean(double mu, double sd, double lo, double hi) {
    const double a = (lo - mu) / sd;
    const double b = (hi - mu) / sd;
    const double mass = norm_cdf(b) - norm_cdf(a);
    if (!(mass > 1e-300)) {
        return mu < lo ? lo : (mu > hi ? hi : mu);
    }
    return mu + sd * (norm_pdf(a) - norm_pdf(b)) / mass;
}

// Deterministic RNG: mt19937_64 bits with hand-rolled conversions so
// draws are identical on every platform (std distributions are not).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(splitmix(seed)) {}

    std::uint64_t next_u64() {
        // xorshift64* — small state, passes BigCrush for this use
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545F4914F6CDD1DULL;
    }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below(0)");
        // rejection sampling to avoid modulo bias
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do { x = next_u64(); } while (x >= limit);
        return x % n;
    }

    // Standard normal, Box–Muller (both draws consumed for determinism).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    // Derive an independent stream for a subcomponent.
    Rng fork(std::uint64_t stream_id) const {
        return Rng(splitmix(state_ ^ splitmix(stream_id + 0x9E3779B97F4A7C15ULL)));
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        x = x ^ (x >> 31);
        return x ? x : 0x4D595DF4D0F33173ULL;  // all-zero state is absorbing
    }

    std::uint64_t state_;
};

}  // namespace naip
