#pragma once

#include <cmath>
#include <cstdint>

namespace hopf::rng {

// splitmix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Stream seed for sub-task `index` of a job seeded with `master`.
// Distinct indices give decorrelated streams; the map is deterministic.
constexpr std::uint64_t derive_stream(std::uint64_t master, std::uint64_t index) {
    return mix64(master ^ mix64((index + 1) * kGolden));
}

// Counter-mode splitmix64. State advances by a fixed odd constant, so the
// n-th output depends only on (seed, n).
class Stream {
  public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += kGolden;
        return mix64(state_);
    }

    // Uniform on [0, 1), 53-bit resolution.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on [-1, 1).
    double next_symmetric() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-52 - 1.0; }

    // Standard normal via the Marsaglia polar method. Pairs are generated
    // together; the spare is returned on the following call.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = next_symmetric();
            v = next_symmetric();
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * scale;
        have_spare_ = true;
        return u * scale;
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace hopf::rng
