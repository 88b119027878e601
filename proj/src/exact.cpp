#include "vk/exact.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace vk {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// --- ring elements for Bareiss ---------------------------------------------

struct Q {
    BigInt a, b;
};

Q mul(Ring r, const Q& x, const Q& y)
{
    switch (r) {
    case Ring::Integer: return {x.a * y.a, 0};
    case Ring::Gaussian: return {x.a * y.a - x.b * y.b, x.a * y.b + x.b * y.a};
    case Ring::Eisenstein: {
        // w^2 = -1 - w
        const BigInt bd = x.b * y.b;
        return {x.a * y.a - bd, x.a * y.b + x.b * y.a - bd};
    }
    }
    return {};
}

Q conj(Ring r, const Q& x)
{
    switch (r) {
    case Ring::Integer: return x;
    case Ring::Gaussian: return {x.a, -x.b};
    case Ring::Eisenstein: return {x.a - x.b, -x.b}; // conj(w) = w^2 = -1 - w
    }
    return x;
}

BigInt qnorm(Ring r, const Q& x)
{
    switch (r) {
    case Ring::Integer: return x.a * x.a;
    case Ring::Gaussian: return x.a * x.a + x.b * x.b;
    case Ring::Eisenstein: return x.a * x.a - x.a * x.b + x.b * x.b;
    }
    return 0;
}

// x / y, known to be exact
Q divexact(Ring r, const Q& x, const Q& y)
{
    if (r == Ring::Integer) return {x.a / y.a, 0};
    const Q num = mul(r, x, conj(r, y));
    const BigInt d = qnorm(r, y);
    Q q{num.a / d, num.b / d};
    if (q.a * d != num.a || q.b * d != num.b) throw std::logic_error("inexact division in fraction-free elimination");
    return q;
}

bool is_zero(const Q& x) { return x.a == 0 && x.b == 0; }

// --- arithmetic mod p ---------------------------------------------------------

u64 mulmod(u64 a, u64 b, u64 p) { return u64(u128(a) * b % p); }

u64 powmod(u64 a, u64 e, u64 p)
{
    u64 r = 1;
    a %= p;
    while (e) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

u64 invmod(u64 a, u64 p) { return powmod(a, p - 2, p); }

u64 reduce(std::int64_t v, u64 p)
{
    const std::int64_t m = v % std::int64_t(p);
    return m < 0 ? u64(m + std::int64_t(p)) : u64(m);
}

// generator image theta -> r in F_p and its conjugate
std::pair<u64, u64> roots(Ring ring, u64 p)
{
    for (u64 g = 2;; ++g) {
        if (ring == Ring::Gaussian) {
            const u64 r = powmod(g, (p - 1) / 4, p);
            if (mulmod(r, r, p) == p - 1) return {r, p - r};
        }
        else {
            const u64 r = powmod(g, (p - 1) / 3, p);
            if (r != 1) return {r, mulmod(r, r, p)};
        }
    }
}

} // namespace

namespace modp {

bool is_prime(u64 n)
{
    if (n < 2) return false;
    for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % q == 0) return n == q;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) d >>= 1, ++s;
    // deterministic for all 64-bit n
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool comp = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                comp = false;
                break;
            }
        }
        if (comp) return false;
    }
    return true;
}

u64 prime(int index, int modulus)
{
    static std::mutex mu;
    static std::vector<u64> cache[5];
    std::lock_guard lock(mu);
    auto& list = cache[modulus];
    u64 start = list.empty() ? (u64(1) << 62) : list.back() - 1;
    while (int(list.size()) <= index) {
        u64 c = start;
        while (c % u64(modulus) != 1 % u64(modulus) || (c & 1) == 0 || !is_prime(c)) --c;
        list.push_back(c);
        start = c - 1;
    }
    return list[index];
}

u64 det(std::vector<u64> a, int n, u64 p)
{
    u64 d = 1;
    for (int k = 0; k < n; ++k) {
        int piv = -1;
        for (int i = k; i < n; ++i)
            if (a[std::size_t(i) * n + k]) {
                piv = i;
                break;
            }
        if (piv < 0) return 0;
        if (piv != k) {
            for (int j = k; j < n; ++j) std::swap(a[std::size_t(k) * n + j], a[std::size_t(piv) * n + j]);
            d = d ? p - d : 0;
        }
        const u64 pk = a[std::size_t(k) * n + k];
        d = mulmod(d, pk, p);
        const u64 inv = invmod(pk, p);
        u64* rk = &a[std::size_t(k) * n];
        for (int i = k + 1; i < n; ++i) {
            u64* ri = &a[std::size_t(i) * n];
            if (!ri[k]) continue;
            const u64 f = mulmod(ri[k], inv, p);
            for (int j = k + 1; j < n; ++j) {
                if (!rk[j]) continue;
                const u64 t = mulmod(f, rk[j], p);
                ri[j] = ri[j] >= t ? ri[j] - t : ri[j] + p - t;
            }
            ri[k] = 0;
        }
    }
    return d;
}

} // namespace modp

double log2_hadamard(const RingMatrix& m)
{
    double s = 0;
    for (int i = 0; i < m.n; ++i) {
        long double r = 0;
        for (int j = 0; j < m.n; ++j) {
            const long double a = m(i, j)[0], b = m(i, j)[1];
            switch (m.ring) {
            case Ring::Integer: r += a * a; break;
            case Ring::Gaussian: r += a * a + b * b; break;
            case Ring::Eisenstein: r += a * a - a * b + b * b; break;
            }
        }
        if (r == 0) return -INFINITY;
        s += 0.5 * std::log2(double(r));
    }
    return s;
}

RingValue det_bareiss(const RingMatrix& m)
{
    const int n = m.n;
    if (n == 0) return {1, 0};
    const Ring r = m.ring;
    std::vector<Q> a(std::size_t(n) * n);
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = {m.e[k][0], r == Ring::Integer ? 0 : m.e[k][1]};
    auto at = [&](int i, int j) -> Q& { return a[std::size_t(i) * n + j]; };
    Q prev{1, 0};
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (is_zero(at(k, k))) {
            int piv = -1;
            for (int i = k + 1; i < n; ++i)
                if (!is_zero(at(i, k))) {
                    piv = i;
                    break;
                }
            if (piv < 0) return {0, 0};
            for (int j = 0; j < n; ++j) std::swap(at(k, j), at(piv, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j < n; ++j) {
                const Q t1 = mul(r, at(i, j), at(k, k)), t2 = mul(r, at(i, k), at(k, j));
                at(i, j) = divexact(r, Q{t1.a - t2.a, t1.b - t2.b}, prev);
            }
            at(i, k) = {0, 0};
        }
        prev = at(k, k);
    }
    Q d = at(n - 1, n - 1);
    if (sign < 0) d = {-d.a, -d.b};
    return {d.a, d.b};
}

RingValue det_modular(const RingMatrix& m)
{
    const int n = m.n;
    if (n == 0) return {1, 0};
    const double lh = log2_hadamard(m);
    if (lh == -INFINITY) return {0, 0};
    // both coordinates are bounded by 2H; need the prime product above 4H + 1
    const double bits = std::max(0.0, lh) + 4;
    const int modulus = m.ring == Ring::Integer ? 2 : m.ring == Ring::Gaussian ? 4 : 3;

    BigInt M = 1, A = 0, B = 0;
    std::vector<u64> w(std::size_t(n) * n);
    double have = 0;
    for (int idx = 0; have < bits; ++idx) {
        const u64 p = modp::prime(idx, modulus);
        u64 ra, rb;
        if (m.ring == Ring::Integer) {
            for (std::size_t k = 0; k < w.size(); ++k) w[k] = reduce(m.e[k][0], p);
            ra = modp::det(w, n, p);
            rb = 0;
        }
        else {
            const auto [r1, r2] = roots(m.ring, p);
            auto eval = [&](u64 r) {
                for (std::size_t k = 0; k < w.size(); ++k) {
                    const u64 x = reduce(m.e[k][0], p), y = reduce(m.e[k][1], p);
                    w[k] = (x + mulmod(y, r, p)) % p;
                }
                return modp::det(w, n, p);
            };
            const u64 v1 = eval(r1), v2 = eval(r2);
            // v1 = a + b r1, v2 = a + b r2
            const u64 diff = (r1 + p - r2) % p;
            rb = mulmod((v1 + p - v2) % p, invmod(diff, p), p);
            ra = (v1 + p - mulmod(rb, r1, p)) % p;
        }
        // CRT step: x = X + M * ((r - X) / M mod p)
        auto step = [&](BigInt& X, u64 res) {
            const u64 xm = u64(BigInt(X % p));
            const u64 mm = u64(BigInt(M % p));
            const u64 t = mulmod((res + p - xm) % p, invmod(mm, p), p);
            X += M * t;
        };
        step(A, ra);
        if (m.ring != Ring::Integer) step(B, rb);
        M *= p;
        have += std::log2(double(p));
    }
    const BigInt half = M / 2;
    if (A > half) A -= M;
    if (B > half) B -= M;
    return {A, B};
}

RingValue det(const RingMatrix& m) { return m.n <= 40 ? det_bareiss(m) : det_modular(m); }

BigInt norm(Ring r, const RingValue& x) { return qnorm(r, Q{x.a, x.b}); }

} // namespace vk
