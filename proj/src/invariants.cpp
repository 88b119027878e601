#include "vk/errors.hpp"
#include "vk/knots.hpp"
#include "vk/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace vk {

RingMatrix alexander_matrix(const KnotDiagram& d, Root root)
{
    const int n = d.crossings();
    const Ring ring = root == Root::MinusOne ? Ring::Integer : root == Root::I ? Ring::Gaussian : Ring::Eisenstein;
    if (n <= 1) return RingMatrix(ring, 0);
    // t and 1 - t as a + b*theta
    const std::array<std::int64_t, 2> t = root == Root::MinusOne ? std::array<std::int64_t, 2>{-1, 0}
                                                                 : std::array<std::int64_t, 2>{0, 1};
    const std::array<std::int64_t, 2> one_minus_t = {1 - t[0], -t[1]};

    // arc k ends at the k-th under-passage
    const auto& ps = d.passages;
    std::vector<int> arc_at(ps.size()), over_arc(n), in_arc(n), out_arc(n), sign(n);
    int unders = 0;
    for (std::size_t k = 0; k < ps.size(); ++k) {
        arc_at[k] = unders % n;
        if (!ps[k].over) ++unders;
    }
    for (std::size_t k = 0; k < ps.size(); ++k) {
        const int c = ps[k].crossing;
        sign[c] = ps[k].sign;
        if (ps[k].over) over_arc[c] = arc_at[k];
        else {
            in_arc[c] = arc_at[k];
            out_arc[c] = (arc_at[k] + 1) % n;
        }
    }
    RingMatrix full(ring, n);
    auto add = [&](int r, int c, std::array<std::int64_t, 2> v) {
        full(r, c)[0] += v[0];
        full(r, c)[1] += v[1];
    };
    for (int c = 0; c < n; ++c) {
        add(c, over_arc[c], one_minus_t);
        if (sign[c] > 0) {
            add(c, in_arc[c], t);
            add(c, out_arc[c], {-1, 0});
        }
        else {
            add(c, in_arc[c], {-1, 0});
            add(c, out_arc[c], t);
        }
    }
    RingMatrix m(ring, n - 1);
    for (int i = 0; i < n - 1; ++i)
        for (int j = 0; j < n - 1; ++j) m(i, j) = full(i, j);
    return m;
}

BigInt alexander_magnitude(const KnotDiagram& d, Root root)
{
    const RingMatrix m = alexander_matrix(d, root);
    const RingValue v = det(m);
    if (root == Root::MinusOne) return abs(v.a);
    return norm(m.ring, v);
}

namespace {

// over and under positions of every crossing along the basepointed curve
struct Chords {
    std::vector<int> tail, head, sign; // tail = over, head = under
};

Chords chords(const KnotDiagram& d)
{
    const int n = d.crossings();
    Chords c{std::vector<int>(n), std::vector<int>(n), std::vector<int>(n)};
    for (int k = 0; k < int(d.passages.size()); ++k) {
        const auto& p = d.passages[k];
        (p.over ? c.tail : c.head)[p.crossing] = k;
        c.sign[p.crossing] = p.sign;
    }
    return c;
}

// Based arrow diagrams of v3 as (tail rank, head rank) triples over six points.
constexpr int kV3Patterns[5][3][2] = {
    {{2, 0}, {4, 1}, {5, 3}},
    {{0, 3}, {2, 5}, {4, 1}},
    {{1, 4}, {3, 0}, {5, 2}},
    {{1, 5}, {3, 0}, {4, 2}},
    {{0, 4}, {2, 5}, {3, 1}},
};

// A three-arrow configuration as a word: for each of the six ranks, the arrow
// index (0..2, in order of first appearance) and whether it is a tail.
int encode(const std::array<std::pair<int, int>, 6>& pts)
{
    // pts sorted by position; .second = arrow*2 + is_tail
    int relabel[3] = {-1, -1, -1}, next = 0, code = 0;
    for (const auto& [pos, tag] : pts) {
        const int a = tag >> 1;
        if (relabel[a] < 0) relabel[a] = next++;
        code = code * 6 + relabel[a] * 2 + (tag & 1);
    }
    return code;
}

std::array<int, 5> pattern_codes()
{
    std::array<int, 5> out{};
    for (int p = 0; p < 5; ++p) {
        std::array<std::pair<int, int>, 6> pts;
        for (int a = 0; a < 3; ++a) {
            pts[kV3Patterns[p][a][0]] = {kV3Patterns[p][a][0], a * 2 + 1};
            pts[kV3Patterns[p][a][1]] = {kV3Patterns[p][a][1], a * 2};
        }
        out[p] = encode(pts);
    }
    return out;
}

} // namespace

std::int64_t vassiliev_v2(const KnotDiagram& d)
{
    // arrows X, Y with head(Y) < tail(X) < tail(Y) < head(X)
    const Chords c = chords(d);
    const int n = d.crossings();
    std::int64_t v = 0;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (c.head[y] < c.tail[x] && c.tail[x] < c.tail[y] && c.tail[y] < c.head[x]) v += c.sign[x] * c.sign[y];
    return v;
}

std::int64_t vassiliev_v3(const KnotDiagram& d)
{
    static const std::array<int, 5> codes = pattern_codes();
    const Chords c = chords(d);
    const int n = d.crossings();
    // every v3 pattern is connected, so each arrow crosses another one
    std::vector<std::vector<char>> crosses(n, std::vector<char>(n, 0));
    auto inside = [](int p, int a, int b) { return a < b ? (a < p && p < b) : (b < p && p < a); };
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y)
            crosses[x][y] = crosses[y][x] = inside(c.tail[y], c.tail[x], c.head[x]) != inside(c.head[y], c.tail[x], c.head[x]);

    std::int64_t v = 0;
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y)
            for (int z = y + 1; z < n; ++z) {
                const int links = crosses[x][y] + crosses[x][z] + crosses[y][z];
                if (links < 2) continue;
                std::array<std::pair<int, int>, 6> pts = {{{c.tail[x], 1}, {c.head[x], 0}, {c.tail[y], 3},
                                                           {c.head[y], 2}, {c.tail[z], 5}, {c.head[z], 4}}};
                std::sort(pts.begin(), pts.end());
                const int code = encode(pts);
                for (int p : codes)
                    if (p == code) {
                        v += c.sign[x] * c.sign[y] * c.sign[z];
                        break;
                    }
            }
    return v;
}

std::string InvariantSet::str() const
{
    return "(" + det.str() + "," + a3.str() + "," + a4.str() + "," + std::to_string(v2) + "," + std::to_string(v3) +
           ")";
}

InvariantSet invariants(const KnotDiagram& raw)
{
    const KnotDiagram d = reduce(raw);
    InvariantSet s;
    s.det = alexander_magnitude(d, Root::MinusOne);
    s.a3 = alexander_magnitude(d, Root::Omega);
    s.a4 = alexander_magnitude(d, Root::I);
    s.v2 = vassiliev_v2(d);
    s.v3 = vassiliev_v3(d);
    return s;
}

RobustResult robust_invariants(const Eigen::Matrix3Xd& P, std::uint64_t seed, int max_retries, int agree)
{
    // R2 low-discrepancy sequence on the unit square, mapped to the sphere by
    // equal-area (z, phi) coordinates and started at a seeded offset
    constexpr double g = 1.32471795724474602596;
    SplitMix64 rng(seed);
    const double s1 = rng.uniform(), s2 = rng.uniform();
    RobustResult r;
    int ok = 0;
    for (int k = 0; ok < agree; ++k) {
        const double u = std::fmod(s1 + k / g, 1.0), v = std::fmod(s2 + k / (g * g), 1.0);
        const double z = 2 * u - 1, rho = std::sqrt(std::max(0.0, 1 - z * z)), phi = 2 * std::numbers::pi * v;
        const Eigen::Vector3d dir(rho * std::cos(phi), rho * std::sin(phi), z);
        KnotDiagram d;
        try {
            d = project(P, dir);
        }
        catch (const DegenerateProjection&) {
            if (++r.retries > max_retries)
                throw PersistentDegeneracy("no regular projection after " + std::to_string(max_retries) + " retries");
            continue;
        }
        const KnotDiagram red = reduce(d);
        const InvariantSet inv = invariants(red);
        if (ok == 0) {
            r.inv = inv;
            r.crossings = red.crossings();
        }
        else if (!(inv == r.inv))
            throw InvariantDisagreement("projections disagree: " + r.inv.str() + " vs " + inv.str());
        ++ok;
    }
    return r;
}

RobustResult robust_invariants(const VortexCurve& c, int max_retries)
{
    const Eigen::Matrix3Xd P = analysis_polyline(c);
    return robust_invariants(P, mix64(std::uint64_t(c.id), std::uint64_t(P.cols())), max_retries);
}

} // namespace vk
