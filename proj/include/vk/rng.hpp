#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace vk {

// SplitMix64 (Steele, Lea & Flood). Tiny, splittable and identical on every
// platform, which is all the amplitude draws need.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next()
    {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform on the open interval (0,1)
    double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    // derive an independent stream; used for per-curve projection sequences
    SplitMix64 split() { return SplitMix64(next() ^ 0xD1B54A32D192ED03ull); }

private:
    std::uint64_t state_;
};

// One Box-Muller draw gives two independent standard normals; packing them as
// (g1 + i g2)/sqrt(2) yields a unit-variance circular complex Gaussian.
inline std::complex<double> complex_gaussian(SplitMix64& rng)
{
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(t) * std::numbers::sqrt2 / 2.0, r * std::sin(t) * std::numbers::sqrt2 / 2.0};
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b)
{
    SplitMix64 g(a ^ (b * 0x9E3779B97F4A7C15ull + 0x632BE59BD9B4E019ull));
    return g.next();
}

} // namespace vk
