#pragma once

// Test-side constructions shared by the unit and acceptance suites: knot
// polygons in space, the reference columns of data/knot_codes.txt and the
// Alexander/Jones oracles computed from them.

#include "vk/knots.hpp"
#include "vk/rng.hpp"
#include "vk/stats.hpp"

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vk::test {

constexpr double pi = std::numbers::pi;

// Closed polyline sampled from a periodic parametrisation on [0, 2 pi).
inline Eigen::Matrix3Xd parametric(const std::function<Eigen::Vector3d(double)>& f, int n)
{
    Eigen::Matrix3Xd p(3, n + 1);
    for (int k = 0; k < n; ++k) p.col(k) = f(2 * pi * k / n);
    p.col(n) = p.col(0);
    return p;
}

inline Eigen::Matrix3Xd trefoil(int n = 240)
{
    return parametric([](double t) {
        return Eigen::Vector3d(std::sin(t) + 2 * std::sin(2 * t), std::cos(t) - 2 * std::cos(2 * t), -std::sin(3 * t));
    }, n);
}

inline Eigen::Matrix3Xd figure_eight(int n = 320)
{
    return parametric([](double t) {
        return Eigen::Vector3d((2 + std::cos(2 * t)) * std::cos(3 * t), (2 + std::cos(2 * t)) * std::sin(3 * t),
                               std::sin(4 * t));
    }, n);
}

// (p,q) torus knot on the standard torus of radii 2 and 1
inline Eigen::Matrix3Xd torus_knot(int p, int q, int n = 600)
{
    return parametric([p, q](double t) {
        const double r = 2 + std::cos(q * t);
        return Eigen::Vector3d(r * std::cos(p * t), r * std::sin(p * t), -std::sin(q * t));
    }, n);
}

inline Eigen::Matrix3Xd circle(double radius, int n = 64)
{
    return parametric([radius](double t) { return Eigen::Vector3d(radius * std::cos(t), radius * std::sin(t), 0); },
                      n);
}

// Closure of a braid word (generators +-i act on strands i-1, i, counted from
// 0) laid around the z axis: strand slot s sits at radius 3 + s, one crossing
// per angular step. The over strand is chosen so that the crossing seen from
// +z has the sign of the generator (right-hand rule on the two tangents).
// An odd step count keeps the two strands from sharing a vertex in the shadow.
inline Eigen::Matrix3Xd closed_braid(const std::vector<int>& word, int strands, int steps_per_crossing = 7)
{
    if (word.empty()) throw std::invalid_argument("empty braid word");
    const int n_cross = int(word.size());
    const double dtheta = 2 * pi / n_cross;
    // slot occupied by each strand, updated crossing by crossing
    std::vector<int> slot(strands);
    for (int s = 0; s < strands; ++s) slot[s] = s;
    std::vector<std::vector<Eigen::Vector3d>> path(strands);
    auto at = [](double r, double th, double z) { return Eigen::Vector3d(r * std::cos(th), r * std::sin(th), z); };
    for (int c = 0; c < n_cross; ++c) {
        const int g = std::abs(word[c]);
        if (g < 1 || g >= strands) throw std::invalid_argument("generator out of range");
        int a = -1, b = -1; // strands in slots g-1 and g
        for (int s = 0; s < strands; ++s) {
            if (slot[s] == g - 1) a = s;
            if (slot[s] == g) b = s;
        }
        const double th0 = c * dtheta, r0 = 3 + (g - 1);
        // tangents at the midpoint: a moves outwards, b inwards, both along +theta
        const Eigen::Vector2d ta(1, r0 * dtheta), tb(-1, r0 * dtheta); // (radial, tangential)
        const double cross = ta[0] * tb[1] - ta[1] * tb[0];            // > 0
        // local frame (radial, tangential) is right-handed with +z
        const bool a_over = (cross > 0) == (word[c] > 0);
        for (int k = 0; k < steps_per_crossing; ++k) {
            const double u = double(k) / steps_per_crossing;
            const double th = th0 + u * dtheta;
            const double bump = 0.5 * std::sin(pi * u);
            for (int s = 0; s < strands; ++s) {
                double r = 3 + slot[s], z = 0;
                if (s == a) {
                    r = r0 + u;
                    z = a_over ? bump : -bump;
                }
                else if (s == b) {
                    r = r0 + 1 - u;
                    z = a_over ? -bump : bump;
                }
                path[s].push_back(at(r, th, z));
            }
        }
        std::swap(slot[a], slot[b]);
    }
    // follow the permutation: strand s ends in slot[s] and continues as the
    // strand that started there
    std::vector<Eigen::Vector3d> pts;
    std::vector<bool> used(strands, false);
    int s = 0, guard = 0;
    while (!used[s]) {
        used[s] = true;
        pts.insert(pts.end(), path[s].begin(), path[s].end());
        s = slot[s];
        if (++guard > strands) break;
    }
    for (bool u : used)
        if (!u) throw std::invalid_argument("braid closure is a link");
    Eigen::Matrix3Xd p(3, pts.size() + 1);
    for (std::size_t k = 0; k < pts.size(); ++k) p.col(k) = pts[k];
    p.col(pts.size()) = pts.front();
    return p;
}

inline int strands_of(const std::vector<int>& word)
{
    int m = 1;
    for (int g : word) m = std::max(m, std::abs(g));
    return m + 1;
}

// b1 on strands 0..n1-1 followed by b2 shifted onto strands n1-1..: the closure
// is the connected sum of the two closures.
inline std::vector<int> braid_sum(const std::vector<int>& b1, int n1, const std::vector<int>& b2)
{
    std::vector<int> w = b1;
    for (int g : b2) w.push_back(g > 0 ? g + n1 - 1 : g - (n1 - 1));
    return w;
}

// ---- reference columns ---------------------------------------------------

struct KnotRef {
    std::string name;
    int crossings = 0;
    std::string gauss;
    std::vector<long> alexander; // coefficients from t^alex_min
    int alex_min = 0;
    std::vector<long> jones;
    int jones_min = 0;
    std::vector<int> braid;
};

inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(' ');
    const auto e = s.find_last_not_of(' ');
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

inline std::vector<long> parse_vector(std::string s)
{
    for (char& c : s)
        if (c == '[' || c == ']' || c == ',') c = ' ';
    std::istringstream is(s);
    std::vector<long> v;
    long x;
    while (is >> x) v.push_back(x);
    return v;
}

inline std::vector<KnotRef> load_refs()
{
    std::ifstream f(data_path("knot_codes.txt"));
    if (!f) throw std::runtime_error("knot_codes.txt not found");
    std::vector<KnotRef> out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> c;
        std::stringstream ss(line);
        std::string t;
        while (std::getline(ss, t, '|')) c.push_back(trim(t));
        if (c.size() < 6) throw std::runtime_error("short reference line: " + line);
        KnotRef r;
        r.name = c[0];
        r.crossings = std::stoi(c[1]);
        r.gauss = c[2];
        auto a = parse_vector(c[3]);
        r.alex_min = int(a[0]);
        r.alexander.assign(a.begin() + 2, a.end());
        auto j = parse_vector(c[4]);
        r.jones_min = int(j[0]);
        r.jones.assign(j.begin() + 2, j.end());
        for (long g : parse_vector(c[5])) r.braid.push_back(int(g));
        out.push_back(r);
    }
    return out;
}

inline std::map<std::string, KnotRef> refs_by_name()
{
    std::map<std::string, KnotRef> m;
    for (auto& r : load_refs()) m[r.name] = r;
    return m;
}

// Oracle values from the published polynomials. Delta is evaluated in
// complex floating point; its magnitudes are small integers.
struct Oracle {
    long det = 0, a3 = 0, a4 = 0, v2 = 0;
    double v3 = 0; // from the Jones polynomial, in the convention of that column
};

inline Oracle oracle(const KnotRef& r)
{
    Oracle o;
    using C = std::complex<double>;
    auto eval = [&](C t) {
        C s = 0;
        for (std::size_t k = 0; k < r.alexander.size(); ++k) s += double(r.alexander[k]) * std::pow(t, double(k));
        return s;
    };
    o.det = std::lround(std::abs(eval(-1.0)));
    o.a3 = std::lround(std::norm(eval(std::polar(1.0, 2 * pi / 3))));
    o.a4 = std::lround(std::norm(eval(C(0, 1))));
    // Conway normalisation: symmetric about the middle, Delta(1) = 1; then
    // v2 = Delta''(1)/2 = sum c_k e_k^2 / 2 over centred exponents e_k
    const int deg = int(r.alexander.size()) - 1;
    long sum = 0, second = 0;
    for (int k = 0; k <= deg; ++k) {
        const long e2 = long(2 * k - deg) * (2 * k - deg); // (2 e)^2
        sum += r.alexander[k];
        second += r.alexander[k] * e2;
    }
    o.v2 = sum * second / 8;
    // v3 = -(V'''(1) + 3 V''(1)) / 36
    double d2 = 0, d3 = 0;
    for (std::size_t k = 0; k < r.jones.size(); ++k) {
        const double e = r.jones_min + double(k);
        d2 += r.jones[k] * e * (e - 1);
        d3 += r.jones[k] * e * (e - 1) * (e - 2);
    }
    o.v3 = -(d3 + 3 * d2) / 36;
    return o;
}

// ---- synthetic analysis records ----------------------------------------

// Records whose curves have log-uniform lengths in [L_lo, L_hi] (lambda) and
// are unknotted with probability exp(-L / L0); knotted curves are trefoils.
inline std::vector<TangleRecord> synthetic_records(double L0, long curves, int per_record, std::uint64_t seed,
                                                   double L_lo = 10, double L_hi = 500)
{
    SplitMix64 g(seed);
    std::vector<TangleRecord> out;
    InvariantSet trefoil;
    trefoil.det = 3;
    trefoil.a3 = 4;
    trefoil.v2 = 1;
    trefoil.v3 = 1;
    for (long made = 0; made < curves;) {
        TangleRecord r;
        r.system = SystemKind::ThreeSphere;
        r.N = 7;
        r.seed = out.size() + 1;
        r.energy = 63;
        for (int k = 0; k < per_record && made < curves; ++k, ++made) {
            CurveRow c;
            c.id = k;
            c.length = L_lo * std::pow(L_hi / L_lo, g.uniform());
            c.length_classical = c.length;
            c.inv = g.uniform() < std::exp(-c.length / L0) ? InvariantSet{} : trefoil;
            r.rows.push_back(c);
        }
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace vk::test
