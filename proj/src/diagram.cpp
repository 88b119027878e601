#include "vk/errors.hpp"
#include "vk/knots.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace vk {

void KnotDiagram::validate() const
{
    if (passages.size() % 2) throw std::invalid_argument("odd number of passages");
    const int n = crossings();
    std::vector<int> over(n, 0), under(n, 0), sign(n, 0);
    for (const auto& p : passages) {
        if (p.crossing < 0 || p.crossing >= n) throw std::invalid_argument("crossing label out of range");
        if (p.sign != 1 && p.sign != -1) throw std::invalid_argument("crossing sign must be +-1");
        (p.over ? over : under)[p.crossing]++;
        if (sign[p.crossing] && sign[p.crossing] != p.sign) throw std::invalid_argument("crossing signs disagree");
        sign[p.crossing] = p.sign;
    }
    for (int c = 0; c < n; ++c)
        if (over[c] != 1 || under[c] != 1) throw std::invalid_argument("crossing must be passed once over and once under");
}

namespace {

// relabel crossings 0.. in order of first appearance
KnotDiagram canonical(std::vector<Passage> ps, const Eigen::Vector3d& dir)
{
    std::unordered_map<int, int> id;
    for (auto& p : ps) {
        auto [it, fresh] = id.try_emplace(p.crossing, int(id.size()));
        p.crossing = it->second;
    }
    KnotDiagram d;
    d.passages = std::move(ps);
    d.direction = dir;
    return d;
}

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

double point_seg_dist(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b)
{
    const Eigen::Vector2d ab = b - a;
    const double l2 = ab.squaredNorm();
    const double t = l2 > 0 ? std::clamp((p - a).dot(ab) / l2, 0.0, 1.0) : 0.0;
    return (a + t * ab - p).norm();
}

} // namespace

KnotDiagram project(const Eigen::Matrix3Xd& P, const Eigen::Vector3d& direction)
{
    const Eigen::Index cols = P.cols();
    if (cols < 2 || P.col(0) != P.col(cols - 1)) throw std::invalid_argument("project needs a closed polyline");
    const int m = int(cols - 1);
    const Eigen::Vector3d d = direction.normalized();
    Eigen::Index k;
    d.cwiseAbs().minCoeff(&k);
    const Eigen::Vector3d e1 = (Eigen::Vector3d::Unit(k) - d[k] * d).normalized();
    const Eigen::Vector3d e2 = d.cross(e1); // (e1, e2, d) right-handed, d towards the viewer

    std::vector<Eigen::Vector2d> q(cols);
    std::vector<double> h(cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        q[j] = {P.col(j).dot(e1), P.col(j).dot(e2)};
        h[j] = P.col(j).dot(d);
    }
    Eigen::Vector2d lo = q[0], hi = q[0];
    double total = 0;
    for (int j = 0; j < m; ++j) {
        lo = lo.cwiseMin(q[j]);
        hi = hi.cwiseMax(q[j]);
        total += (q[j + 1] - q[j]).norm();
    }
    const double scale = std::max((hi - lo).maxCoeff(), 1e-300);
    const double tol = 1e-9 * scale;
    if (m < 3) return canonical({}, d);

    for (int j = 0; j < m; ++j)
        if ((q[j + 1] - q[j]).norm() <= tol) throw DegenerateProjection("segment projects to a point");

    // uniform grid over segment bounding boxes
    const double cell = std::max(2 * total / m, scale / 4096);
    auto key = [&](double x, double y) {
        return std::pair<long long, long long>{(long long)std::floor((x - lo.x()) / cell),
                                               (long long)std::floor((y - lo.y()) / cell)};
    };
    struct PairHash {
        std::size_t operator()(const std::pair<long long, long long>& p) const
        {
            return std::hash<long long>()(p.first * 1000003LL ^ p.second);
        }
    };
    std::unordered_map<std::pair<long long, long long>, std::vector<int>, PairHash> grid;
    for (int j = 0; j < m; ++j) {
        const Eigen::Vector2d a = q[j].cwiseMin(q[j + 1]).array() - tol, b = q[j].cwiseMax(q[j + 1]).array() + tol;
        const auto k0 = key(a.x(), a.y()), k1 = key(b.x(), b.y());
        for (long long x = k0.first; x <= k1.first; ++x)
            for (long long y = k0.second; y <= k1.second; ++y) grid[{x, y}].push_back(j);
    }

    struct Hit {
        int i, j;       // segments, i < j
        double s, t;    // parameters along them
        bool i_over;
        int sign;
        Eigen::Vector2d x;
    };
    std::vector<Hit> hits;
    std::vector<int> stamp(m, -1);
    for (int i = 0; i < m; ++i) {
        const Eigen::Vector2d a = q[i], b = q[i + 1], ab = b - a;
        const Eigen::Vector2d blo = a.cwiseMin(b).array() - tol, bhi = a.cwiseMax(b).array() + tol;
        const auto k0 = key(blo.x(), blo.y()), k1 = key(bhi.x(), bhi.y());
        for (long long x = k0.first; x <= k1.first; ++x)
            for (long long y = k0.second; y <= k1.second; ++y) {
                auto it = grid.find({x, y});
                if (it == grid.end()) continue;
                for (int j : it->second) {
                    if (j <= i || stamp[j] == i) continue;
                    stamp[j] = i;
                    const Eigen::Vector2d c = q[j], e = q[j + 1], cd = e - c;
                    const bool adjacent = j == i + 1 || (i == 0 && j == m - 1);
                    if (adjacent) {
                        // shared vertex; only a fold-back onto itself is degenerate
                        const Eigen::Vector2d u = j == i + 1 ? ab : cd, v = j == i + 1 ? cd : ab;
                        if (std::abs(cross2(u, v)) <= 1e-9 * u.norm() * v.norm() && u.dot(v) < 0)
                            throw DegenerateProjection("consecutive segments overlap in projection");
                        continue;
                    }
                    const double o1 = cross2(ab, c - a), o2 = cross2(ab, e - a);
                    const double o3 = cross2(cd, a - c), o4 = cross2(cd, b - c);
                    const bool proper = ((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0));
                    const double near = std::min({point_seg_dist(c, a, b), point_seg_dist(e, a, b),
                                                  point_seg_dist(a, c, e), point_seg_dist(b, c, e)});
                    if (near <= tol) throw DegenerateProjection("vertex on another segment or collinear overlap");
                    if (!proper) continue;
                    const double den = cross2(ab, cd);
                    const double s = cross2(c - a, cd) / den, t = cross2(c - a, ab) / den;
                    const double hi_ = h[i] + s * (h[i + 1] - h[i]), hj = h[j] + t * (h[j + 1] - h[j]);
                    if (std::abs(hi_ - hj) <= tol) throw DegenerateProjection("crossing strands at equal depth");
                    const bool i_over = hi_ > hj;
                    const Eigen::Vector2d o = i_over ? ab : cd, u = i_over ? cd : ab;
                    hits.push_back({i, j, s, t, i_over, cross2(o, u) > 0 ? 1 : -1, a + s * ab});
                }
            }
    }

    // triple points: two crossings at the same place
    {
        std::vector<int> order(hits.size());
        for (std::size_t r = 0; r < order.size(); ++r) order[r] = int(r);
        std::sort(order.begin(), order.end(), [&](int x, int y) { return hits[x].x.x() < hits[y].x.x(); });
        for (std::size_t r = 0; r < order.size(); ++r)
            for (std::size_t s = r + 1; s < order.size() && hits[order[s]].x.x() - hits[order[r]].x.x() <= tol; ++s)
                if ((hits[order[s]].x - hits[order[r]].x).norm() <= tol) throw DegenerateProjection("triple point");
    }

    std::vector<std::vector<std::tuple<double, int, bool>>> along(m);
    for (std::size_t c = 0; c < hits.size(); ++c) {
        along[hits[c].i].emplace_back(hits[c].s, int(c), hits[c].i_over);
        along[hits[c].j].emplace_back(hits[c].t, int(c), !hits[c].i_over);
    }
    std::vector<Passage> ps;
    ps.reserve(2 * hits.size());
    for (int j = 0; j < m; ++j) {
        auto& a = along[j];
        std::sort(a.begin(), a.end());
        for (auto& [s, c, over] : a) ps.push_back({c, over, hits[c].sign});
    }
    return canonical(std::move(ps), d);
}

KnotDiagram reduce(const KnotDiagram& in)
{
    std::vector<Passage> ps = in.passages;
    bool changed = true;
    while (changed && !ps.empty()) {
        changed = false;
        const int L = int(ps.size());
        int maxc = 0;
        for (auto& p : ps) maxc = std::max(maxc, p.crossing + 1);
        std::vector<int> pos_over(maxc, -1), pos_under(maxc, -1);
        for (int k = 0; k < L; ++k) (ps[k].over ? pos_over : pos_under)[ps[k].crossing] = k;
        std::vector<char> dead(maxc, 0);
        auto adjacent = [&](int x, int y) { return (x + 1) % L == y || (y + 1) % L == x; };

        for (int k = 0; k < L; ++k) {
            const Passage& p = ps[k];
            const Passage& n = ps[(k + 1) % L];
            if (dead[p.crossing] || dead[n.crossing]) continue;
            if (p.crossing == n.crossing) {
                // R-I: a kink
                dead[p.crossing] = 1;
                changed = true;
                continue;
            }
            if (p.over != n.over || p.sign == n.sign) continue;
            const auto& other = p.over ? pos_under : pos_over;
            const int x = other[p.crossing], y = other[n.crossing];
            if (adjacent(x, y)) {
                // R-II: a bigon
                dead[p.crossing] = dead[n.crossing] = 1;
                changed = true;
            }
        }
        if (changed) {
            std::vector<Passage> keep;
            keep.reserve(ps.size());
            for (auto& p : ps)
                if (!dead[p.crossing]) keep.push_back(p);
            ps = std::move(keep);
        }
    }
    return canonical(std::move(ps), in.direction);
}

KnotDiagram mirror(const KnotDiagram& d)
{
    KnotDiagram m = d;
    for (auto& p : m.passages) {
        p.over = !p.over;
        p.sign = -p.sign;
    }
    return m;
}

KnotDiagram connect(const KnotDiagram& a, const KnotDiagram& b)
{
    std::vector<Passage> ps = a.passages;
    const int off = a.crossings();
    for (auto p : b.passages) {
        p.crossing += off;
        ps.push_back(p);
    }
    return canonical(std::move(ps), a.direction);
}

KnotDiagram rotate(const KnotDiagram& d, int shift)
{
    std::vector<Passage> ps = d.passages;
    if (!ps.empty()) {
        const int L = int(ps.size());
        std::rotate(ps.begin(), ps.begin() + ((shift % L) + L) % L, ps.end());
    }
    return canonical(std::move(ps), d.direction);
}

KnotDiagram parse_gauss(const std::string& code)
{
    std::istringstream is(code);
    std::string tok;
    std::vector<Passage> ps;
    while (is >> tok) {
        if (tok.size() < 3) throw std::invalid_argument("bad Gauss token '" + tok + "'");
        const char s = tok.back(), ou = tok[tok.size() - 2];
        if ((s != '+' && s != '-') || (ou != 'O' && ou != 'U'))
            throw std::invalid_argument("bad Gauss token '" + tok + "'");
        int label = 0;
        try {
            label = std::stoi(tok.substr(0, tok.size() - 2));
        }
        catch (const std::exception&) {
            throw std::invalid_argument("bad Gauss token '" + tok + "'");
        }
        ps.push_back({label, ou == 'O', s == '+' ? 1 : -1});
    }
    KnotDiagram d = canonical(std::move(ps), Eigen::Vector3d::UnitZ());
    d.validate();
    return d;
}

std::string format_gauss(const KnotDiagram& d)
{
    std::string s;
    for (const auto& p : d.passages) {
        if (!s.empty()) s += ' ';
        s += std::to_string(p.crossing + 1);
        s += p.over ? 'O' : 'U';
        s += p.sign > 0 ? '+' : '-';
    }
    return s;
}

} // namespace vk
