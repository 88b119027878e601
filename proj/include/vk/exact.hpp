#pragma once

// Exact determinants over Z, the Gaussian integers Z[i] and the Eisenstein
// integers Z[w], w = exp(2 pi i / 3).
//
// Small matrices use fraction-free (Bareiss) elimination on arbitrary
// precision integers. Large ones are reduced modulo enough 62-bit primes to
// exceed the Hadamard bound and reconstructed by CRT; the primes split in the
// ring (p = 1 mod 4 for Z[i], p = 1 mod 3 for Z[w]) so that the determinant's
// two coordinates can be read off from the two embeddings of the generator.

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cstdint>
#include <vector>

namespace vk {

using BigInt = boost::multiprecision::cpp_int;

enum class Ring { Integer, Gaussian, Eisenstein };

// element a + b*theta, theta = i or w (b = 0 for the integers)
struct RingValue {
    BigInt a = 0, b = 0;
    bool operator==(const RingValue&) const = default;
};

// square matrix with small entries a + b*theta, row-major
struct RingMatrix {
    Ring ring = Ring::Integer;
    int n = 0;
    std::vector<std::array<std::int64_t, 2>> e;

    RingMatrix() = default;
    RingMatrix(Ring r, int size) : ring(r), n(size), e(std::size_t(size) * size, {0, 0}) {}
    std::array<std::int64_t, 2>& operator()(int i, int j) { return e[std::size_t(i) * n + j]; }
    const std::array<std::int64_t, 2>& operator()(int i, int j) const { return e[std::size_t(i) * n + j]; }
};

RingValue det_bareiss(const RingMatrix& m);
RingValue det_modular(const RingMatrix& m);
// dispatches on size; the empty matrix has determinant 1
RingValue det(const RingMatrix& m);

// |x|^2 as an integer: a^2 - ab + b^2 on Z[w], a^2 + b^2 on Z[i] and Z
BigInt norm(Ring r, const RingValue& x);

// log2 of the Hadamard bound on |det m|
double log2_hadamard(const RingMatrix& m);

namespace modp {
bool is_prime(std::uint64_t n);
// i-th prime below 2^62 that is 1 mod `modulus` (modulus 2, 4 or 3)
std::uint64_t prime(int index, int modulus);
std::uint64_t det(std::vector<std::uint64_t> a, int n, std::uint64_t p);
} // namespace modp

} // namespace vk
