#include "vk/curve.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>

namespace vk {

namespace {

using V3 = Eigen::Vector3d;

// Sparse uniform grid of segments. Segments whose bounding box covers many
// cells go to a separate list that every query scans.
class SegmentGrid {
public:
    explicit SegmentGrid(double cell) : cell_(cell) {}

    int add(const V3& a, const V3& b)
    {
        const int id = int(seg_.size());
        seg_.push_back({a, b});
        alive_.push_back(1);
        stamp_.push_back(0);
        const auto lo = key(a.cwiseMin(b)), hi = key(a.cwiseMax(b));
        const long long cells = (hi[0] - lo[0] + 1) * (hi[1] - lo[1] + 1) * (hi[2] - lo[2] + 1);
        if (cells > 64) {
            large_.push_back(id);
            return id;
        }
        for (long long x = lo[0]; x <= hi[0]; ++x)
            for (long long y = lo[1]; y <= hi[1]; ++y)
                for (long long z = lo[2]; z <= hi[2]; ++z) cells_[pack(x, y, z)].push_back(id);
        return id;
    }

    void kill(int id) { alive_[id] = 0; }
    const std::pair<V3, V3>& operator[](int id) const { return seg_[id]; }

    // calls f(id) for every live segment whose cells meet the box; stops when f returns true
    template <typename F>
    bool any(const V3& lo_p, const V3& hi_p, F&& f)
    {
        ++epoch_;
        auto visit = [&](int id) {
            if (!alive_[id] || stamp_[id] == epoch_) return false;
            stamp_[id] = epoch_;
            return f(id);
        };
        for (int id : large_)
            if (visit(id)) return true;
        const auto lo = key(lo_p), hi = key(hi_p);
        const long long cells = (hi[0] - lo[0] + 1) * (hi[1] - lo[1] + 1) * (hi[2] - lo[2] + 1);
        if (cells > (long long)cells_.size()) {
            for (auto& [k, ids] : cells_) {
                const long long x = unpack(k, 0), y = unpack(k, 1), z = unpack(k, 2);
                if (x < lo[0] || x > hi[0] || y < lo[1] || y > hi[1] || z < lo[2] || z > hi[2]) continue;
                for (int id : ids)
                    if (visit(id)) return true;
            }
            return false;
        }
        for (long long x = lo[0]; x <= hi[0]; ++x)
            for (long long y = lo[1]; y <= hi[1]; ++y)
                for (long long z = lo[2]; z <= hi[2]; ++z) {
                    auto it = cells_.find(pack(x, y, z));
                    if (it == cells_.end()) continue;
                    for (int id : it->second)
                        if (visit(id)) return true;
                }
        return false;
    }

private:
    std::array<long long, 3> key(const V3& p) const
    {
        return {(long long)std::floor(p[0] / cell_), (long long)std::floor(p[1] / cell_), (long long)std::floor(p[2] / cell_)};
    }
    static std::uint64_t pack(long long x, long long y, long long z)
    {
        constexpr long long off = 1 << 20;
        return (std::uint64_t(x + off) << 42) | (std::uint64_t(y + off) << 21) | std::uint64_t(z + off);
    }
    static long long unpack(std::uint64_t k, int a)
    {
        constexpr long long off = 1 << 20;
        return (long long)((k >> (42 - 21 * a)) & ((1u << 21) - 1)) - off;
    }

    double cell_;
    std::vector<std::pair<V3, V3>> seg_;
    std::vector<char> alive_;
    std::vector<unsigned> stamp_;
    unsigned epoch_ = 0;
    std::vector<int> large_;
    std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

double seg_seg_dist(const V3& p1, const V3& q1, const V3& p2, const V3& q2)
{
    const V3 d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
    const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
    double s = 0, t = 0;
    if (a <= 1e-300 && e <= 1e-300) return r.norm();
    if (a <= 1e-300) t = std::clamp(f / e, 0.0, 1.0);
    else {
        const double c = d1.dot(r);
        if (e <= 1e-300) s = std::clamp(-c / a, 0.0, 1.0);
        else {
            const double b = d1.dot(d2), den = a * e - b * b;
            s = den > 0 ? std::clamp((b * f - c * e) / den, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0) t = 0, s = std::clamp(-c / a, 0.0, 1.0);
            else if (t > 1) t = 1, s = std::clamp((b - c) / a, 0.0, 1.0);
        }
    }
    return (p1 + s * d1 - (p2 + t * d2)).norm();
}

// closed triangle vs closed segment, conservative within `tol` (a length)
bool meets(const V3& P, const V3& Q, const V3& A, const V3& B, const V3& C, double tol)
{
    const V3 n = (B - A).cross(C - A);
    const double nn = n.norm();
    const double span = std::max({(B - A).norm(), (C - A).norm(), (C - B).norm()});
    if (nn <= 1e-12 * span * span) {
        // sliver: treat as its longest edge
        return seg_seg_dist(P, Q, A, B) <= tol || seg_seg_dist(P, Q, B, C) <= tol || seg_seg_dist(P, Q, A, C) <= tol;
    }
    const V3 u = n / nn;
    const double dp = u.dot(P - A), dq = u.dot(Q - A);
    if ((dp > tol && dq > tol) || (dp < -tol && dq < -tol)) return false;
    auto inside = [&](const V3& X) {
        const double e0 = u.dot((B - A).cross(X - A)), e1 = u.dot((C - B).cross(X - B)), e2 = u.dot((A - C).cross(X - C));
        const double t = tol * span;
        return e0 >= -t && e1 >= -t && e2 >= -t;
    };
    if (std::abs(dp) <= tol && std::abs(dq) <= tol) {
        // coplanar: endpoint inside or crossing an edge
        if (inside(P) || inside(Q)) return true;
        return seg_seg_dist(P, Q, A, B) <= tol || seg_seg_dist(P, Q, B, C) <= tol || seg_seg_dist(P, Q, A, C) <= tol;
    }
    if (std::abs(dp - dq) < 1e-300) return false;
    const double t = std::clamp(dp / (dp - dq), 0.0, 1.0);
    const V3 X = P + t * (Q - P);
    if (inside(X)) return true;
    // the segment may graze an edge while crossing the slab
    return seg_seg_dist(P, Q, A, B) <= tol || seg_seg_dist(P, Q, B, C) <= tol || seg_seg_dist(P, Q, A, C) <= tol;
}

// a segment starting at triangle vertex `a` meets the triangle elsewhere only
// if it runs into the triangle's plane inside the angle at `a`
bool adjacent_meets(const V3& a, const V3& p, const V3& x, const V3& y, double tol)
{
    const V3 n = (x - a).cross(y - a);
    const double nn = n.norm();
    const V3 d = p - a;
    if (d.norm() == 0) return false;
    if (nn == 0) return true;
    if (std::abs(n.dot(d)) / nn > tol) return false;
    const V3 u = n / nn;
    const double s1 = u.dot((x - a).cross(d)), s2 = u.dot(d.cross(y - a));
    return s1 >= -tol * d.norm() && s2 >= -tol * d.norm();
}

} // namespace

VortexCurve simplify(const VortexCurve& c, const std::vector<Eigen::Matrix3Xd>& obstacles)
{
    const Eigen::Matrix3Xd& E = c.embedding;
    const int cols = int(E.cols());
    const bool closed = c.closed;
    const int n = closed ? cols - 1 : cols;
    if (n < (closed ? 4 : 3)) return c;

    double total = 0;
    for (int k = 1; k < cols; ++k) total += (E.col(k) - E.col(k - 1)).norm();
    const double mean_seg = std::max(total / std::max(1, cols - 1), 1e-300);
    const V3 lo = E.rowwise().minCoeff(), hi = E.rowwise().maxCoeff();
    const double extent = std::max((hi - lo).norm(), mean_seg);
    const double tol = 1e-10 * extent;

    SegmentGrid grid(4 * mean_seg);
    // obstacles first; only their ids below `n_obst` are foreign
    for (const auto& o : obstacles)
        for (Eigen::Index k = 1; k < o.cols(); ++k) grid.add(o.col(k - 1), o.col(k));

    std::vector<int> prev(n), next(n), seg_after(n, -1), version(n, 0);
    std::vector<char> alive(n, 1);
    for (int i = 0; i < n; ++i) {
        prev[i] = closed ? (i + n - 1) % n : i - 1;
        next[i] = closed ? (i + 1) % n : (i + 1 < n ? i + 1 : -1);
    }
    std::unordered_map<int, std::pair<int, int>> own; // grid id -> (from, to) vertex pair
    auto add_seg = [&](int i) {
        const int id = grid.add(E.col(i), E.col(next[i]));
        seg_after[i] = id;
        own[id] = {i, next[i]};
    };
    for (int i = 0; i < n; ++i)
        if (next[i] >= 0) add_seg(i);

    int count = n;
    auto removable = [&](int v) {
        if (!alive[v] || prev[v] < 0 || next[v] < 0) return false;
        if (closed && count <= 3) return false;
        const int a = prev[v], b = next[v];
        const V3 A = E.col(a), B = E.col(v), C = E.col(b);
        const V3 blo = A.cwiseMin(B).cwiseMin(C).array() - tol, bhi = A.cwiseMax(B).cwiseMax(C).array() + tol;
        const bool hit = grid.any(blo, bhi, [&](int id) {
            auto it = own.find(id);
            if (it != own.end()) {
                const auto [i, j] = it->second;
                if (i == a || i == v) return false; // the triangle's own edges
                if (j == a) return adjacent_meets(A, E.col(i), B, C, tol);
                if (i == b) return adjacent_meets(C, E.col(j), A, B, tol);
            }
            const auto& [P, Q] = grid[id];
            return meets(P, Q, A, B, C, tol);
        });
        return !hit;
    };
    auto area = [&](int v) {
        return (E.col(v) - E.col(prev[v])).cross(E.col(next[v]) - E.col(prev[v])).norm();
    };
    auto remove = [&](int v) {
        const int a = prev[v], b = next[v];
        grid.kill(seg_after[a]);
        grid.kill(seg_after[v]);
        own.erase(seg_after[a]);
        own.erase(seg_after[v]);
        alive[v] = 0;
        next[a] = b;
        prev[b] = a;
        add_seg(a);
        --count;
        ++version[a];
        ++version[b];
    };

    using Item = std::tuple<double, int, int>; // area, vertex, version
    bool changed = true;
    while (changed) {
        changed = false;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
        for (int v = 0; v < n; ++v)
            if (alive[v] && prev[v] >= 0 && next[v] >= 0) pq.push({area(v), v, version[v]});
        while (!pq.empty()) {
            auto [ar, v, ver] = pq.top();
            pq.pop();
            if (!alive[v] || ver != version[v]) continue;
            if (!removable(v)) continue;
            const int a = prev[v], b = next[v];
            remove(v);
            changed = true;
            for (int w : {a, b})
                if (alive[w] && prev[w] >= 0 && next[w] >= 0) pq.push({area(w), w, version[w]});
        }
    }

    std::vector<int> keep;
    int start = 0;
    if (closed) {
        while (!alive[start]) ++start;
        int v = start;
        do {
            keep.push_back(v);
            v = next[v];
        } while (v != start);
        keep.push_back(start);
    }
    else {
        for (int v = 0; v >= 0; v = next[v]) keep.push_back(v);
    }
    VortexCurve r = c;
    r.vertices.resize(3, keep.size());
    r.embedding.resize(3, keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) {
        r.vertices.col(k) = c.vertices.col(keep[k]);
        r.embedding.col(k) = c.embedding.col(keep[k]);
    }
    r.arclength_lambda = arclength(r);
    return r;
}

} // namespace vk
