#pragma once

#include <cstdint>
#include <random>

namespace remest {

// Reproducible random stream: identical (seed, stream) pairs yield identical
// sequences on every platform. mt19937_64 output is fully specified by the
// standard; the normal transform is done by hand because the distribution
// adapters in <random> are implementation-defined.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}
    RngStream(std::uint64_t seed, std::uint64_t stream)
        : eng_(mix(mix(seed ^ 0x6a09e667f3bcc908ull) + stream * 0x9e3779b97f4a7c15ull)) {}

    // uniform on (0, 1), never returns an endpoint
    double uniform() {
        return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1p-53;
    }

    // standard normal via Box-Muller with cached spare
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    std::uint64_t next_u64() { return eng_(); }

private:
    static std::uint64_t mix(std::uint64_t z) {  // splitmix64 finalizer
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace remest
