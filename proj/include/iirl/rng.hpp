#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include "iirl/errors.hpp"

namespace iirl {

/// Deterministic random generator (xoshiro256++ seeded via splitmix64).
/// Hand-rolled samplers keep output identical across standard libraries,
/// which the byte-identical CSV contract of the harness relies on.
class Rng {
  public:
    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto& s : state_) s = splitmix64(x);
    }

    /// Derives an independent stream for one component of a run,
    /// e.g. environment=0, follower=1, proposal=2, objective=3.
    static Rng stream(uint64_t seed, uint64_t stream_id) {
        uint64_t x = seed;
        uint64_t mixed = splitmix64(x) ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1));
        return Rng(mixed);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    int uniform_int(int n) {
        if (n <= 0) throw ContractError("uniform_int: n must be positive");
        return static_cast<int>(uniform() * n) % n;
    }

    double normal() {
        // Marsaglia polar method; the spare value is discarded so the
        // stream state never depends on call history.
        for (;;) {
            double u = 2.0 * uniform() - 1.0;
            double v = 2.0 * uniform() - 1.0;
            double s = u * u + v * v;
            if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }

    /// Gamma(shape, scale) via Marsaglia-Tsang, with the u^(1/a) boost
    /// for shape < 1.
    double gamma(double shape, double scale) {
        if (shape <= 0.0 || scale <= 0.0) throw ContractError("gamma: parameters must be positive");
        if (shape < 1.0) {
            double u = uniform();
            while (u <= 0.0) u = uniform();
            return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            double u = uniform();
            while (u <= 0.0) u = uniform();
            if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v * scale;
        }
    }

    double beta(double a, double b) {
        double x = gamma(a, 1.0);
        double y = gamma(b, 1.0);
        return x / (x + y);
    }

    void dirichlet(double alpha, std::span<double> out) {
        double sum = 0.0;
        for (auto& x : out) {
            x = gamma(alpha, 1.0);
            sum += x;
        }
        for (auto& x : out) x /= sum;
    }

    /// Samples an index from an (assumed normalized) distribution.
    int categorical(std::span<const double> probs) {
        double u = uniform();
        double acc = 0.0;
        for (size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(probs.size()) - 1;
    }

  private:
    static uint64_t splitmix64(uint64_t& x) {
        uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t state_[4];
};

}  // namespace iirl
