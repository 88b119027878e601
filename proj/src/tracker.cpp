#include "vk/tracker.hpp"
#include "vk/errors.hpp"
#include "vk/rng.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace vk {

namespace {

constexpr double kPi = std::numbers::pi;

inline std::size_t hash_mix(std::uint64_t h, std::uint64_t v)
{
    h ^= v + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    h *= 0xBF58476D1CE4E5B9ull;
    return h ^ (h >> 31);
}

struct CellKey {
    int block = 0, level = 0;
    std::array<int, 3> idx{};
    friend bool operator==(const CellKey&, const CellKey&) = default;
    friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct CellHash {
    std::size_t operator()(const CellKey& c) const
    {
        std::uint64_t h = hash_mix(c.block, c.level);
        for (int v : c.idx) h = hash_mix(h, static_cast<std::uint32_t>(v));
        return h;
    }
};

struct FaceId {
    CellKey cell;
    int dir = 0;
    friend bool operator==(const FaceId&, const FaceId&) = default;
    friend auto operator<=>(const FaceId&, const FaceId&) = default;
};

struct FaceHash {
    std::size_t operator()(const FaceId& f) const { return hash_mix(CellHash()(f.cell), f.dir); }
};

struct PointKey {
    int block;
    std::array<std::int64_t, 3> f;
    friend bool operator==(const PointKey&, const PointKey&) = default;
};

struct PointHash {
    std::size_t operator()(const PointKey& p) const
    {
        std::uint64_t h = static_cast<std::uint64_t>(p.block);
        for (auto v : p.f) h = hash_mix(h, static_cast<std::uint64_t>(v));
        return h;
    }
};

struct FaceInfo {
    int w = 0;           // outward winding seen from the owning side
    bool hidden = false; // zero winding but a pair of zeros inside
    Eigen::Vector3d pos = Eigen::Vector3d::Zero(); // owner frame, base-cell units
};

double wrap_angle(double d)
{
    if (d > kPi) d -= 2 * kPi;
    else if (d <= -kPi) d += 2 * kPi;
    return d;
}

int winding_of(const std::array<double, 4>& ph)
{
    double s = 0;
    for (int k = 0; k < 4; ++k) s += wrap_angle(ph[(k + 1) % 4] - ph[k]);
    return static_cast<int>(std::lround(s / (2 * kPi)));
}

// value of psi at a block-frame position given in base-cell units
using Sampler = std::function<cplx(int block, const Eigen::Vector3d& pos)>;

struct Segment3 {
    CellKey cell;
    FaceId in, out;
};

class Tracker {
public:
    Tracker(const GridSpec& g, int nblocks, Sampler sampler)
        : g_(g), nblocks_(nblocks), sampler_(std::move(sampler))
    {
        g_.validate();
        r_ = g.refinement_factor;
        D_ = g.max_recursion_depth;
        rpow_.assign(D_ + 1, 1);
        for (int l = 1; l <= D_; ++l) rpow_[l] = rpow_[l - 1] * r_;
        for (int a = 0; a < 3; ++a) n_[a] = g.dims[a];
        if (g.boundary == Boundary::SphereNet && (n_[0] != n_[1] || n_[1] != n_[2]))
            throw std::invalid_argument("sphere net charts must be cubic");
    }

    std::vector<std::vector<Segment3>> run(TraceStats* stats);
    std::vector<std::vector<Segment3>> join();

    // geometry helpers used when converting walks into curves
    Eigen::Vector3d node_in_frame(const FaceId& node, const CellKey& frame);
    const FaceInfo& info(const FaceId& owner);
    Eigen::Vector3d physical(const Eigen::Vector3d& pos) const { return g_.origin + g_.cell() * pos; }
    int n(int a) const { return n_[a]; }

private:
    int parity(int block) const { return g_.boundary == Boundary::SphereNet ? chart::parity(block) : 1; }
    bool in_domain(int block, const std::array<int, 3>& base) const;
    bool exists(const CellKey& c) const;
    bool is_leaf(const CellKey& c) const { return exists(c) && !internal_.count(c); }
    CellKey parent(const CellKey& c) const
    {
        return {c.block, c.level - 1, {floordiv(c.idx[0]), floordiv(c.idx[1]), floordiv(c.idx[2])}};
    }
    int floordiv(int v) const { return v >= 0 ? v / r_ : -((-v + r_ - 1) / r_); }
    std::optional<FaceId> neighbor(const CellKey& c, int dir) const;
    FaceId owner(const CellKey& c, int dir) const;
    int face_out(const CellKey& c, int dir);
    cplx sample(int block, int level, const std::array<int, 3>& p);
    cplx sample_raw(int block, int level, const std::array<int, 3>& p, bool cache);
    FaceInfo compute_face(const FaceId& f, const std::array<cplx, 4>& v) const;
    std::array<std::array<int, 3>, 4> corners(const FaceId& f) const;
    void collect(const CellKey& x, int dir, std::vector<std::pair<FaceId, int>>& out);
    bool needs_refine(const CellKey& c);
    void refine(const CellKey& c, std::deque<CellKey>& queue);
    FaceId resolve(const CellKey& c, int dir);
    void base_pass(int block, std::vector<CellKey>& active);
    void check_degenerate(const CellKey& c, int dir);
    bool probe_hidden(const FaceId& own, bool force);
    std::string where(const CellKey& c) const;

    GridSpec g_;
    int nblocks_;
    Sampler sampler_;
    int r_ = 2, D_ = 6;
    std::array<int, 3> n_{};
    std::vector<long> rpow_;
    std::unordered_map<PointKey, cplx, PointHash> cache_;
    std::unordered_map<FaceId, FaceInfo, FaceHash> faces_;
    std::unordered_set<CellKey, CellHash> internal_;
    std::unordered_map<FaceId, bool, FaceHash> probed_;
    std::vector<CellKey> candidates_;
    TraceStats st_;
};

std::string Tracker::where(const CellKey& c) const
{
    std::ostringstream os;
    os << "block " << c.block << " level " << c.level << " cell (" << c.idx[0] << "," << c.idx[1] << ","
       << c.idx[2] << ")";
    if (g_.boundary != Boundary::SphereNet) {
        Eigen::Vector3d p(c.idx[0] + 0.5, c.idx[1] + 0.5, c.idx[2] + 0.5);
        p /= double(rpow_[c.level]);
        const auto x = physical(p);
        os << " near (" << x[0] << "," << x[1] << "," << x[2] << ")";
    }
    return os.str();
}

bool Tracker::in_domain(int, const std::array<int, 3>& b) const
{
    for (int a = 0; a < 3; ++a)
        if (b[a] < 0 || b[a] >= n_[a]) return false;
    if (g_.clip_radius <= 0) return true;
    // keep base cells that meet the clipping ball
    double d2 = 0;
    for (int a = 0; a < 3; ++a) {
        const double lo = g_.origin[a] + g_.cell() * b[a], hi = lo + g_.cell();
        const double q = std::clamp(0.0, lo, hi);
        d2 += q * q;
    }
    return d2 < g_.clip_radius * g_.clip_radius;
}

bool Tracker::exists(const CellKey& c) const
{
    if (c.level == 0) return in_domain(c.block, c.idx);
    return internal_.count(parent(c)) > 0;
}

std::optional<FaceId> Tracker::neighbor(const CellKey& c, int dir) const
{
    const int ax = dir >> 1, side = dir & 1;
    const int M = static_cast<int>(n_[ax] * rpow_[c.level]);
    CellKey q = c;
    q.idx[ax] += side ? 1 : -1;
    if (q.idx[ax] < 0 || q.idx[ax] >= M) {
        switch (g_.boundary) {
        case Boundary::Open: return std::nullopt;
        case Boundary::Periodic: q.idx[ax] = (q.idx[ax] + M) % M; break;
        case Boundary::SphereNet: {
            const ChartFace f{c.block, ax, side ? 1 : -1};
            const ChartFace p = chart::partner(f);
            const auto L = chart::local_axes(c.block), L2 = chart::local_axes(p.chart);
            q.block = p.chart;
            for (int m2 = 0; m2 < 3; ++m2) {
                if (m2 == p.axis) {
                    q.idx[m2] = p.side > 0 ? M - 1 : 0;
                    continue;
                }
                int m = 0;
                while (L[m] != L2[m2]) ++m;
                q.idx[m2] = c.idx[m];
            }
            return FaceId{q, 2 * p.axis + (p.side > 0 ? 1 : 0)};
        }
        }
    }
    std::array<int, 3> base;
    for (int a = 0; a < 3; ++a) base[a] = static_cast<int>(q.idx[a] / rpow_[c.level]);
    if (!in_domain(q.block, base)) return std::nullopt;
    return FaceId{q, dir ^ 1};
}

FaceId Tracker::owner(const CellKey& c, int dir) const
{
    FaceId self{c, dir};
    auto nb = neighbor(c, dir);
    if (!nb) return self;
    return std::min(self, *nb);
}

std::array<std::array<int, 3>, 4> Tracker::corners(const FaceId& f) const
{
    const int ax = f.dir >> 1, side = f.dir & 1;
    const int b = (ax + 1) % 3, cc = (ax + 2) % 3;
    std::array<std::array<int, 3>, 4> out;
    static constexpr int db[4] = {0, 1, 1, 0}, dc[4] = {0, 0, 1, 1};
    for (int k = 0; k < 4; ++k) {
        out[k][ax] = f.cell.idx[ax] + side;
        out[k][b] = f.cell.idx[b] + db[k];
        out[k][cc] = f.cell.idx[cc] + dc[k];
    }
    return out;
}

cplx Tracker::sample_raw(int block, int level, const std::array<int, 3>& p, bool use_cache)
{
    PointKey key{block, {}};
    double sign = 1;
    const long scale = rpow_[D_ - level];
    for (int a = 0; a < 3; ++a) {
        std::int64_t f = std::int64_t(p[a]) * scale;
        const std::int64_t M = std::int64_t(n_[a]) * rpow_[D_];
        if (g_.boundary == Boundary::Periodic && (f < 0 || f >= M)) {
            std::int64_t w = f >= 0 ? f / M : -((-f + M - 1) / M);
            f -= w * M;
            if ((w & 1) && g_.sign_twist < 0) sign = -sign;
        }
        key.f[a] = f;
    }
    if (use_cache) {
        auto it = cache_.find(key);
        if (it != cache_.end()) return sign * it->second;
    }
    const double R = double(rpow_[D_]);
    const Eigen::Vector3d pos(key.f[0] / R, key.f[1] / R, key.f[2] / R);
    const cplx v = sampler_(block, pos);
    ++st_.samples;
    if (use_cache) cache_.emplace(key, v);
    return sign * v;
}

cplx Tracker::sample(int block, int level, const std::array<int, 3>& p) { return sample_raw(block, level, p, true); }

FaceInfo Tracker::compute_face(const FaceId& f, const std::array<cplx, 4>& v) const
{
    FaceInfo fi;
    std::array<double, 4> ph;
    for (int k = 0; k < 4; ++k) ph[k] = std::arg(v[k]);
    const int w = winding_of(ph);
    const int side = f.dir & 1;
    fi.w = (side ? 1 : -1) * w * parity(f.cell.block);
    if (w == 0) {
        // only worth solving when both parts change sign over the face
        bool rp = false, rn = false, ip = false, in = false;
        for (const auto& z : v) {
            rp |= z.real() > 0, rn |= z.real() < 0, ip |= z.imag() > 0, in |= z.imag() < 0;
        }
        if (rp && rn && ip && in) fi.hidden = bilinear_zeros(v).size() >= 2;
        return fi;
    }
    const auto zs = bilinear_zeros(v);
    Eigen::Vector2d st(0.5, 0.5);
    if (!zs.empty()) st = zs.front();
    constexpr double eps = 1e-7; // keep piercings off plaquette edges
    st = st.cwiseMax(eps).cwiseMin(1 - eps);
    const int ax = f.dir >> 1, b = (ax + 1) % 3, cc = (ax + 2) % 3;
    const double s = double(rpow_[f.cell.level]);
    fi.pos[ax] = (f.cell.idx[ax] + side) / s;
    fi.pos[b] = (f.cell.idx[b] + st[0]) / s;
    fi.pos[cc] = (f.cell.idx[cc] + st[1]) / s;
    return fi;
}

const FaceInfo& Tracker::info(const FaceId& own)
{
    static const FaceInfo zero{};
    auto it = faces_.find(own);
    if (it != faces_.end()) return it->second;
    if (own.cell.level == 0) return zero; // base faces were all visited by the streaming pass
    std::array<cplx, 4> v;
    const auto cs = corners(own);
    for (int k = 0; k < 4; ++k) v[k] = sample(own.cell.block, own.cell.level, cs[k]);
    return faces_.emplace(own, compute_face(own, v)).first->second;
}

int Tracker::face_out(const CellKey& c, int dir)
{
    const FaceId own = owner(c, dir);
    const int w = info(own).w;
    return (own == FaceId{c, dir}) ? w : -w;
}

void Tracker::base_pass(int block, std::vector<CellKey>& active)
{
    const int nx = n_[0], ny = n_[1], nz = n_[2];
    const std::size_t plane = std::size_t(nx + 1) * (ny + 1);
    std::vector<cplx> val[2] = {std::vector<cplx>(plane), std::vector<cplx>(plane)};
    auto fill = [&](int kz, std::vector<cplx>& out) {
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i) {
                bool needed = true;
                if (g_.clip_radius > 0) {
                    // a lattice point is needed only if one of its cells is in the domain
                    needed = false;
                    for (int d = 0; d < 8 && !needed; ++d)
                        needed = in_domain(block, {i - (d & 1), j - ((d >> 1) & 1), kz - ((d >> 2) & 1)});
                }
                out[std::size_t(j) * (nx + 1) + i] =
                    needed ? sample_raw(block, 0, {i, j, kz}, false) : cplx(std::nan(""), 0);
            }
    };
    fill(0, val[0]);
    std::unordered_set<CellKey, CellHash> act;
    for (int kz = 0; kz < nz; ++kz) {
        fill(kz + 1, val[1]);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const CellKey c{block, 0, {i, j, kz}};
                if (!in_domain(block, c.idx)) continue;
                for (int dir = 0; dir < 6; ++dir) {
                    const FaceId self{c, dir};
                    if (!(owner(c, dir) == self)) continue;
                    const auto cs = corners(self);
                    std::array<cplx, 4> v;
                    for (int k = 0; k < 4; ++k) {
                        const auto& p = cs[k];
                        v[k] = val[p[2] - kz][std::size_t(p[1]) * (nx + 1) + p[0]];
                    }
                    FaceInfo fi = compute_face(self, v);
                    if (fi.w == 0 && !fi.hidden) continue;
                    faces_.emplace(self, fi);
                    act.insert(c);
                    if (auto nb = neighbor(c, dir)) act.insert(nb->cell);
                }
            }
        std::swap(val[0], val[1]);
    }
    active.insert(active.end(), act.begin(), act.end());
}

void Tracker::collect(const CellKey& x, int dir, std::vector<std::pair<FaceId, int>>& out)
{
    if (!internal_.count(x)) {
        out.push_back({owner(x, dir), -face_out(x, dir)});
        return;
    }
    const int ax = dir >> 1, side = dir & 1;
    const int b = (ax + 1) % 3, cc = (ax + 2) % 3;
    for (int u = 0; u < r_; ++u)
        for (int v = 0; v < r_; ++v) {
            CellKey y{x.block, x.level + 1, {}};
            y.idx[ax] = x.idx[ax] * r_ + (side ? r_ - 1 : 0);
            y.idx[b] = x.idx[b] * r_ + u;
            y.idx[cc] = x.idx[cc] * r_ + v;
            collect(y, dir, out);
        }
}

// A winding-0 face next to a strand may still hide two opposite piercings
// (two lines passing close together). Faces whose corners show both the real
// and the imaginary part changing sign are resampled on a finer lattice and
// flagged when any sub-plaquette winds.
bool Tracker::probe_hidden(const FaceId& own, bool force)
{
    if (!force) {
        // without a line nearby, a zero pair on the face needs both parts to
        // change sign at the corners
        bool rp = false, rn = false, ip = false, in = false;
        for (const auto& p : corners(own)) {
            const cplx z = sample(own.cell.block, own.cell.level, p);
            rp |= z.real() > 0, rn |= z.real() < 0, ip |= z.imag() > 0, in |= z.imag() < 0;
        }
        if (!(rp && rn && ip && in)) return false;
    }
    auto it = probed_.find(own);
    if (it != probed_.end()) return it->second;
    const auto cs = corners(own);
    bool hidden = false;
    {
        constexpr int q = 4;
        const int ax = own.dir >> 1, b = (ax + 1) % 3, cc = (ax + 2) % 3;
        const double s = double(rpow_[own.cell.level]);
        std::array<std::array<double, q + 1>, q + 1> ph;
        for (int u = 0; u <= q; ++u)
            for (int v = 0; v <= q; ++v) {
                Eigen::Vector3d pos;
                pos[ax] = cs[0][ax] / s;
                pos[b] = (cs[0][b] + double(u) / q) / s;
                pos[cc] = (cs[0][cc] + double(v) / q) / s;
                ph[u][v] = std::arg(sampler_(own.cell.block, pos));
                ++st_.samples;
            }
        for (int u = 0; u < q && !hidden; ++u)
            for (int v = 0; v < q && !hidden; ++v)
                hidden = winding_of({ph[u][v], ph[u + 1][v], ph[u + 1][v + 1], ph[u][v + 1]}) != 0;
    }
    probed_.emplace(own, hidden);
    return hidden;
}

bool Tracker::needs_refine(const CellKey& c)
{
    int pierced = 0, sum = 0;
    std::array<int, 6> ws{};
    std::array<FaceId, 6> owners;
    for (int dir = 0; dir < 6; ++dir) {
        const FaceId own = owner(c, dir);
        const FaceInfo& fi = info(own);
        const int w = (own == FaceId{c, dir}) ? fi.w : -fi.w;
        if (std::abs(w) >= 2) return true;
        if (w) ++pierced, sum += w;
        ws[dir] = w;
        owners[dir] = own;
        auto nb = neighbor(c, dir);
        if (nb && nb->cell.level == c.level && internal_.count(nb->cell)) {
            std::vector<std::pair<FaceId, int>> sub;
            collect(nb->cell, nb->dir, sub);
            int s = 0, sa = 0;
            for (const auto& [f, wi] : sub) s += wi, sa += std::abs(wi);
            if (s != w || sa != std::abs(w)) {
                ++st_.coarse_fine_splits;
                return true;
            }
        }
    }
    if (sum != 0 || (pierced != 0 && pierced != 2)) return true;
    // A zero pair of opposite winding on an unpierced face is invisible to
    // the flow count; next to a line it usually means two lines pass close
    // and would be joined wrongly. A single line grazing the face gives the
    // same signature without affecting connectivity, so this only asks for
    // refinement while depth remains.
    if (c.level >= D_) return false;
    for (int dir = 0; dir < 6; ++dir)
        if (ws[dir] == 0 && (info(owners[dir]).hidden || probe_hidden(owners[dir], pierced > 0))) {
            ++st_.hidden_pairs;
            return true;
        }
    return false;
}

void Tracker::refine(const CellKey& c, std::deque<CellKey>& queue)
{
    internal_.insert(c);
    ++st_.refined_cells;
    st_.max_level_used = std::max(st_.max_level_used, c.level + 1);
    for (int z = 0; z < r_; ++z)
        for (int y = 0; y < r_; ++y)
            for (int x = 0; x < r_; ++x) {
                CellKey ch{c.block, c.level + 1, {c.idx[0] * r_ + x, c.idx[1] * r_ + y, c.idx[2] * r_ + z}};
                queue.push_back(ch);
                candidates_.push_back(ch);
            }
    for (int dir = 0; dir < 6; ++dir) {
        auto nb = neighbor(c, dir);
        if (!nb) continue;
        CellKey q = nb->cell;
        while (q.level > 0 && !exists(q)) q = parent(q);
        if (is_leaf(q)) queue.push_back(q);
    }
}

FaceId Tracker::resolve(const CellKey& c, int dir)
{
    auto nb = neighbor(c, dir);
    if (nb && internal_.count(nb->cell)) {
        std::vector<std::pair<FaceId, int>> sub;
        collect(nb->cell, nb->dir, sub);
        for (const auto& [f, w] : sub)
            if (w) return f;
        throw TrackingIncomplete("lost a piercing on a coarse-fine interface at " + where(c));
    }
    return owner(c, dir);
}

void Tracker::check_degenerate(const CellKey& c, int dir)
{
    const FaceId own = owner(c, dir);
    const FaceInfo& fi = info(own);
    double vmin = HUGE_VAL;
    for (const auto& p : corners(own)) vmin = std::min(vmin, std::abs(sample(own.cell.block, own.cell.level, p)));
    Eigen::Vector3d pos = fi.pos;
    const cplx at = sampler_(own.cell.block, pos);
    if (std::abs(at) > 0.5 * vmin)
        throw DegenerateField("phase winds around a plaquette where the field does not vanish, " + where(c));
}

Eigen::Vector3d Tracker::node_in_frame(const FaceId& node, const CellKey& frame)
{
    Eigen::Vector3d p = info(node).pos;
    if (g_.boundary == Boundary::Periodic) {
        const double s = double(rpow_[frame.level]);
        for (int a = 0; a < 3; ++a) {
            const double centre = (frame.idx[a] + 0.5) / s;
            p[a] += n_[a] * std::round((centre - p[a]) / n_[a]);
        }
    }
    else if (g_.boundary == Boundary::SphereNet && node.cell.block != frame.block) {
        const double n = n_[0];
        ChartPoint cp{node.cell.block, (2.0 * p / n).array() - 1.0};
        const ChartPoint q = chart::identify(cp);
        if (q.chart != frame.block) throw TrackingIncomplete("seam piercing does not belong to the adjacent chart");
        p = (q.a.array() + 1.0) * (n / 2.0);
    }
    return p;
}

std::vector<std::vector<Segment3>> Tracker::run(TraceStats* stats)
{
    std::vector<CellKey> active;
    for (int b = 0; b < nblocks_; ++b) base_pass(b, active);
    std::sort(active.begin(), active.end());
    candidates_ = active;

    std::deque<CellKey> queue(active.begin(), active.end());
    for (;;) {
        while (!queue.empty()) {
            const CellKey c = queue.front();
            queue.pop_front();
            if (!is_leaf(c) || !needs_refine(c)) continue;
            if (c.level >= D_) throw RecursionExhausted("ambiguity persists at maximum depth: " + where(c));
            refine(c, queue);
        }
        auto walks = join();
        // A loop of at most four segments circling one lattice edge is what an
        // edge with a phase step close to pi produces: all four faces around
        // it flip together and the flow stays balanced. Real loops this small
        // survive refinement and then span more cells.
        for (const auto& w : walks) {
            if (w.size() > 4 || w.front().in != w.back().out) continue;
            for (const auto& sg : w)
                if (sg.cell.level < D_ && is_leaf(sg.cell)) {
                    ++st_.small_loop_splits;
                    refine(sg.cell, queue);
                }
        }
        if (queue.empty()) {
            if (stats) *stats = st_;
            return walks;
        }
    }
}

std::vector<std::vector<Segment3>> Tracker::join()
{
    // one directed segment per leaf that carries a strand
    std::sort(candidates_.begin(), candidates_.end());
    candidates_.erase(std::unique(candidates_.begin(), candidates_.end()), candidates_.end());
    std::vector<Segment3> segs;
    for (const auto& c : candidates_) {
        if (!is_leaf(c)) continue;
        int in = -1, out = -1;
        for (int dir = 0; dir < 6; ++dir) {
            const int w = face_out(c, dir);
            if (w == -1) in = dir;
            else if (w == 1) out = dir;
        }
        if (in < 0 && out < 0) continue;
        if (in < 0 || out < 0) throw TrackingIncomplete("unbalanced cell " + where(c));
        if (c.level == D_ && D_ > 0) {
            check_degenerate(c, in);
            check_degenerate(c, out);
        }
        segs.push_back({c, resolve(c, in), resolve(c, out)});
    }
    st_.leaves = static_cast<long>(segs.size());

    std::unordered_map<FaceId, int, FaceHash> from, to;
    for (int s = 0; s < int(segs.size()); ++s) {
        if (!from.emplace(segs[s].in, s).second || !to.emplace(segs[s].out, s).second)
            throw TrackingIncomplete("two strands share a piercing near " + where(segs[s].cell));
    }
    std::vector<char> used(segs.size(), 0);
    std::vector<std::vector<Segment3>> walks;
    auto walk_from = [&](int s) {
        std::vector<Segment3> w;
        while (s >= 0 && !used[s]) {
            used[s] = 1;
            w.push_back(segs[s]);
            auto it = from.find(segs[s].out);
            s = it == from.end() ? -1 : it->second;
        }
        walks.push_back(std::move(w));
    };
    // chains entering through the boundary first, then loops
    for (int s = 0; s < int(segs.size()); ++s)
        if (!to.count(segs[s].in)) walk_from(s);
    for (int s = 0; s < int(segs.size()); ++s)
        if (!used[s]) walk_from(s);
    return walks;
}

// clip a polyline to the ball |x| <= R; returns the inside pieces
std::vector<std::pair<Eigen::Matrix3Xd, bool>> clip_to_ball(const std::vector<Eigen::Vector3d>& pts, bool closed, double R)
{
    std::vector<std::pair<Eigen::Matrix3Xd, bool>> out;
    const int n = int(pts.size());
    auto inside = [&](const Eigen::Vector3d& p) { return p.squaredNorm() < R * R; };
    bool all_in = true;
    int start = 0;
    for (int i = 0; i < n; ++i)
        if (!inside(pts[i])) {
            all_in = false;
            start = i;
            break;
        }
    if (all_in && closed) {
        Eigen::Matrix3Xd m(3, n + 1);
        for (int i = 0; i < n; ++i) m.col(i) = pts[i];
        m.col(n) = pts[0];
        out.push_back({m, true});
        return out;
    }
    std::vector<Eigen::Vector3d> seq;
    if (closed) {
        for (int k = 0; k <= n; ++k) seq.push_back(pts[(start + k) % n]);
    }
    else seq = pts;
    auto crossing = [&](const Eigen::Vector3d& p, const Eigen::Vector3d& q) {
        const Eigen::Vector3d d = q - p;
        const double a = d.squaredNorm(), b = 2 * p.dot(d), c = p.squaredNorm() - R * R;
        const double disc = std::max(0.0, b * b - 4 * a * c);
        const double sq = std::sqrt(disc);
        double t = (-b + sq) / (2 * a);
        if (t < 0 || t > 1) t = (-b - sq) / (2 * a);
        t = std::clamp(t, 0.0, 1.0);
        Eigen::Vector3d x = p + t * d;
        return Eigen::Vector3d(x * (R / x.norm()));
    };
    std::vector<Eigen::Vector3d> cur;
    bool in = inside(seq[0]);
    if (in) cur.push_back(seq[0]);
    for (std::size_t i = 1; i < seq.size(); ++i) {
        const bool nin = inside(seq[i]);
        if (in && nin) cur.push_back(seq[i]);
        else if (in && !nin) {
            cur.push_back(crossing(seq[i - 1], seq[i]));
            if (cur.size() >= 2) {
                Eigen::Matrix3Xd m(3, cur.size());
                for (std::size_t k = 0; k < cur.size(); ++k) m.col(k) = cur[k];
                out.push_back({m, false});
            }
            cur.clear();
        }
        else if (!in && nin) {
            cur.push_back(crossing(seq[i - 1], seq[i]));
            cur.push_back(seq[i]);
        }
        else {
            // segment may dip into the ball between two outside vertices
            const Eigen::Vector3d p = seq[i - 1], d = seq[i] - p;
            const double t = std::clamp(-p.dot(d) / d.squaredNorm(), 0.0, 1.0);
            if ((p + t * d).squaredNorm() < R * R) {
                Eigen::Matrix3Xd m(3, 2);
                m.col(0) = crossing(p + t * d, p);
                m.col(1) = crossing(p + t * d, seq[i]);
                out.push_back({m, false});
            }
        }
        in = nin;
    }
    if (in && cur.size() >= 2) {
        // an open chain can only end inside if the domain boundary was inside the ball
        Eigen::Matrix3Xd m(3, cur.size());
        for (std::size_t k = 0; k < cur.size(); ++k) m.col(k) = cur[k];
        out.push_back({m, false});
    }
    return out;
}

std::vector<VortexCurve> build_curves(Tracker& tr, const std::vector<std::vector<Segment3>>& walks, const GridSpec& g,
                                      SystemKind system)
{
    std::vector<VortexCurve> out;
    const double h = g.cell();
    auto is_loop = [](const std::vector<Segment3>& w) { return w.front().in == w.back().out; };

    if (g.boundary == Boundary::Periodic) {
        const double side = h * tr.n(0);
        for (const auto& w : walks) {
            if (!is_loop(w)) throw TrackingIncomplete("open strand in a periodic domain");
            std::vector<Segment> segs;
            for (const auto& s : w) segs.push_back({tr.node_in_frame(s.in, s.cell) * h, tr.node_in_frame(s.out, s.cell) * h});
            VortexCurve c = unwrap_periodic(segs, side, g.lambda);
            c.vertices.colwise() += g.origin;
            c.embedding = c.vertices;
            c.system = system;
            out.push_back(std::move(c));
        }
    }
    else if (g.boundary == Boundary::Open) {
        for (const auto& w : walks) {
            const bool loop = is_loop(w);
            std::vector<Eigen::Vector3d> pts;
            if (!loop) pts.push_back(tr.physical(tr.node_in_frame(w.front().in, w.front().cell)));
            for (const auto& s : w) pts.push_back(tr.physical(tr.node_in_frame(s.out, s.cell)));
            if (g.clip_radius > 0) {
                for (auto& [m, closed] : clip_to_ball(pts, loop, g.clip_radius))
                    out.push_back(make_curve(system, m, closed, g.lambda));
            }
            else {
                Eigen::Matrix3Xd m(3, pts.size() + (loop ? 1 : 0));
                for (std::size_t k = 0; k < pts.size(); ++k) m.col(k) = pts[k];
                if (loop) m.col(pts.size()) = pts.front();
                out.push_back(make_curve(system, m, loop, g.lambda));
            }
        }
    }
    else {
        const double n = tr.n(0);
        auto to_a = [&](const Eigen::Vector3d& p) -> Eigen::Vector3d { return (2.0 * p / n).array() - 1.0; };
        std::vector<ChartFragment> frags;
        for (const auto& w : walks) {
            if (!is_loop(w)) throw TrackingIncomplete("open strand on the 3-sphere");
            const std::size_t m = w.size();
            std::size_t start = 0;
            for (std::size_t k = 0; k < m; ++k)
                if (w[k].cell.block != w[(k + m - 1) % m].cell.block) {
                    start = k;
                    break;
                }
            const bool one_chart = std::all_of(w.begin(), w.end(), [&](const Segment3& s) { return s.cell.block == w[0].cell.block; });
            if (one_chart) {
                ChartFragment f{w[0].cell.block, Eigen::Matrix3Xd(3, m), true};
                for (std::size_t k = 0; k < m; ++k) f.a.col(k) = to_a(tr.node_in_frame(w[k].out, w[k].cell));
                frags.push_back(std::move(f));
                continue;
            }
            std::size_t k = 0;
            while (k < m) {
                const auto& s0 = w[(start + k) % m];
                std::vector<Eigen::Vector3d> pts{to_a(tr.node_in_frame(s0.in, s0.cell))};
                std::size_t j = k;
                while (j < m && w[(start + j) % m].cell.block == s0.cell.block) {
                    const auto& s = w[(start + j) % m];
                    pts.push_back(to_a(tr.node_in_frame(s.out, s.cell)));
                    ++j;
                }
                ChartFragment f{s0.cell.block, Eigen::Matrix3Xd(3, pts.size()), false};
                for (std::size_t q = 0; q < pts.size(); ++q) f.a.col(q) = pts[q];
                frags.push_back(std::move(f));
                k = j;
            }
        }
        out = stitch_sphere_net(frags, SphereNet(), g.lambda);
        std::vector<std::vector<Eigen::Vector4d>> pts;
        for (const auto& c : out) pts.push_back(sphere_points(c));
        if (!out.empty()) set_pole(out, far_pole(pts));
    }
    for (std::size_t k = 0; k < out.size(); ++k) out[k].id = int(k);
    return out;
}
} // namespace

void GridSpec::validate() const
{
    if (!(spacing > 0)) throw std::invalid_argument("grid spacing must be positive");
    if ((dims.array() < 2).any()) throw std::invalid_argument("grid dims must be >= 2");
    if (refinement_factor < 2) throw std::invalid_argument("refinement factor must be >= 2");
    if (max_recursion_depth < 1) throw std::invalid_argument("max recursion depth must be >= 1");
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
    long span = 1;
    for (int l = 0; l < max_recursion_depth; ++l) span *= refinement_factor;
    if (span * dims.maxCoeff() > (1l << 30)) throw std::invalid_argument("grid too fine for 32-bit cell indices");
}

} // namespace vk

namespace vk {

int plaquette_winding(const std::array<double, 4>& phases) { return winding_of(phases); }

std::vector<Eigen::Vector2d> bilinear_zeros(const std::array<cplx, 4>& v)
{
    // R(s,t) = A + B s + C t + D s t, I(s,t) = E + F s + G t + H s t
    const double A = v[0].real(), B = v[1].real() - A, C = v[3].real() - A, D = v[2].real() - v[1].real() - v[3].real() + A;
    const double E = v[0].imag(), F = v[1].imag() - E, G = v[3].imag() - E, H = v[2].imag() - v[1].imag() - v[3].imag() + E;
    const double qa = F * D - H * B, qb = E * D + F * C - G * B - H * A, qc = E * C - G * A;
    double roots[2];
    int nr = 0;
    const double scale = std::abs(qa) + std::abs(qb) + std::abs(qc);
    if (scale == 0) return {};
    if (std::abs(qa) <= 1e-13 * scale) {
        if (qb != 0) roots[nr++] = -qc / qb;
    }
    else {
        const double disc = qb * qb - 4 * qa * qc;
        if (disc < 0) return {};
        const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
        roots[nr++] = q / qa;
        if (q != 0) roots[nr++] = qc / q;
    }
    std::vector<Eigen::Vector2d> out;
    for (int k = 0; k < nr; ++k) {
        const double s = roots[k];
        if (!(s >= 0 && s <= 1)) continue;
        const double dr = C + D * s, di = G + H * s;
        double t;
        if (std::abs(dr) >= std::abs(di)) {
            if (dr == 0) continue;
            t = -(A + B * s) / dr;
        }
        else t = -(E + F * s) / di;
        if (!(t >= 0 && t <= 1)) continue;
        Eigen::Vector2d z(s, t);
        bool dup = false;
        for (const auto& o : out) dup |= (o - z).norm() < 1e-12;
        if (!dup) out.push_back(z);
    }
    return out;
}

GridSpec default_grid(const ModeSpec& mode, double spacing, std::uint64_t seed, int max_depth, int refinement_factor,
                      double truncation)
{
    if (!(spacing > 0)) throw std::invalid_argument("grid spacing must be positive");
    GridSpec g;
    g.lambda = mode.wavelength;
    g.max_recursion_depth = max_depth;
    g.refinement_factor = refinement_factor;
    SplitMix64 rng(mix64(seed, 0x67726964ull));
    Eigen::Vector3d off;
    for (int a = 0; a < 3; ++a) off[a] = 0.2 + 0.6 * rng.uniform();
    const double target = spacing * mode.wavelength;
    switch (mode.system) {
    case SystemKind::PeriodicCube: {
        // nodal cell of side pi; psi(r + pi e_k) = (-1)^N psi(r)
        const int n = std::max(2, int(std::ceil(kPi / target)));
        const double h = kPi / n;
        g.boundary = Boundary::Periodic;
        g.dims.setConstant(n);
        g.spacing = h / mode.wavelength;
        g.origin = off * h;
        g.sign_twist = (mode.N & 1) ? -1 : 1;
        break;
    }
    case SystemKind::Harmonic3D: {
        if (!(truncation > 0)) throw std::invalid_argument("truncation multiple must be positive");
        const double R = truncation * std::sqrt(2 * mode.energy);
        const double h = target;
        g.boundary = Boundary::Open;
        g.spacing = spacing;
        g.origin = -Eigen::Vector3d::Constant(R) - off * h;
        g.dims.setConstant(int(std::ceil((2 * R + h) / h)) + 1);
        g.clip_radius = R;
        break;
    }
    case SystemKind::ThreeSphere: {
        // chart coordinates span 2 units; the metric is largest (1 per unit) at chart centres
        const int n = std::max(2, int(std::ceil(2 / target)));
        g.boundary = Boundary::SphereNet;
        g.dims.setConstant(n);
        g.spacing = 2.0 / n / mode.wavelength;
        break;
    }
    }
    return g;
}

std::vector<VortexCurve> trace(const RandomSuperposition& sup, const GridSpec& grid, TraceStats* stats)
{
    const Field field(sup);
    const double h = grid.cell();
    const SystemKind sys = sup.mode.system;
    if ((sys == SystemKind::ThreeSphere) != (grid.boundary == Boundary::SphereNet))
        throw std::invalid_argument("grid boundary does not match the system");
    std::vector<VortexCurve> out;
    if (sys == SystemKind::ThreeSphere) {
        const double n = grid.dims[0];
        Sampler s = [&](int block, const Eigen::Vector3d& pos) {
            const Eigen::Vector3d a = (2.0 * pos / n).array() - 1.0;
            return field.at_embedding(chart::to_embedding(block, a));
        };
        Tracker tr(grid, 8, s);
        out = build_curves(tr, tr.run(stats), grid, sys);
    }
    else {
        Sampler s = [&](int, const Eigen::Vector3d& pos) { return field(Eigen::Vector3d(grid.origin + h * pos)); };
        Tracker tr(grid, 1, s);
        out = build_curves(tr, tr.run(stats), grid, sys);
        if (sys == SystemKind::Harmonic3D) {
            for (auto& c : out) {
                c.truncation_radius = grid.clip_radius;
                c.classical_radius = std::sqrt(2 * sup.mode.energy);
            }
        }
    }
    return out;
}

std::vector<VortexCurve> trace_field(const std::function<cplx(const Eigen::Vector3d&)>& f, const GridSpec& grid,
                                     TraceStats* stats)
{
    if (grid.boundary == Boundary::SphereNet) throw std::invalid_argument("trace_field works on Euclidean boxes");
    const double h = grid.cell();
    Sampler s = [&](int, const Eigen::Vector3d& pos) { return f(Eigen::Vector3d(grid.origin + h * pos)); };
    Tracker tr(grid, 1, s);
    const SystemKind sys = grid.boundary == Boundary::Periodic ? SystemKind::PeriodicCube : SystemKind::Harmonic3D;
    auto out = build_curves(tr, tr.run(stats), grid, sys);
    for (auto& c : out) c.truncation_radius = grid.clip_radius;
    return out;
}

VortexCurve unwrap_periodic(const std::vector<Segment>& segments, double side, double lambda, double tol)
{
    if (segments.empty()) throw TrackingIncomplete("empty loop");
    const double eps = tol * side;
    std::vector<Eigen::Vector3d> pts{segments[0].first};
    Eigen::Vector3d off = Eigen::Vector3d::Zero();
    auto shift_between = [&](const Eigen::Vector3d& end, const Eigen::Vector3d& start) {
        Eigen::Vector3d k = ((end - start) / side).array().round();
        if ((end - start - side * k).cwiseAbs().maxCoeff() > eps)
            throw TrackingIncomplete("segment ends do not meet under the periodic identification");
        return Eigen::Vector3d(side * k);
    };
    for (std::size_t k = 0; k < segments.size(); ++k) {
        if (k > 0) off += shift_between(pts.back() - off, segments[k].first);
        pts.push_back(segments[k].second + off);
    }
    const Eigen::Vector3d wrap = shift_between(pts.back(), segments[0].first);
    Eigen::Vector3i h = (wrap / side).array().round().cast<int>();
    Eigen::Matrix3Xd m(3, pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) m.col(k) = pts[k];
    const bool closed = h.isZero();
    if (closed) m.col(m.cols() - 1) = m.col(0);
    VortexCurve c = make_curve(SystemKind::PeriodicCube, m, closed, lambda);
    c.homology = h;
    return c;
}

std::vector<VortexCurve> stitch_sphere_net(const std::vector<ChartFragment>& frags, const SphereNet& net, double lambda,
                                           double tol)
{
    std::vector<VortexCurve> out;
    using Key = std::array<long long, 4>;
    auto key_of = [&](int chart, const Eigen::Vector3d& a, int dx, int dy, int dz) {
        return Key{chart, std::llround(a[0] / tol) + dx, std::llround(a[1] / tol) + dy, std::llround(a[2] / tol) + dz};
    };
    std::map<Key, int> starts;
    std::vector<int> open;
    for (int i = 0; i < int(frags.size()); ++i) {
        const auto& f = frags[i];
        if (f.a.cols() < (f.closed ? 3 : 2)) throw NetIdentificationError("degenerate chart fragment");
        if (f.closed) continue;
        open.push_back(i);
        starts[key_of(net.chart_id(f.chart), f.a.col(0), 0, 0, 0)] = i;
    }
    auto find_start = [&](const ChartPoint& p) {
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dz = -1; dz <= 1; ++dz) {
                    auto it = starts.find(key_of(p.chart, p.a, dx, dy, dz));
                    if (it != starts.end() && (frags[it->second].a.col(0) - p.a).cwiseAbs().maxCoeff() <= tol)
                        return it->second;
                }
        return -1;
    };
    std::vector<char> used(frags.size(), 0);
    // closed fragments and loops of open fragments, in input order
    for (int i = 0; i < int(frags.size()); ++i) {
        if (used[i]) continue;
        const auto& f0 = frags[i];
        std::vector<Eigen::Vector4d> pts;
        const int c0 = net.chart_id(f0.chart);
        if (f0.closed) {
            used[i] = 1;
            for (Eigen::Index k = 0; k < f0.a.cols(); ++k) pts.push_back(chart::to_embedding(c0, f0.a.col(k)));
            pts.push_back(pts.front());
            out.push_back(make_sphere_curve(pts, true, lambda, Eigen::Vector4d(-1, 0, 0, 0)));
            continue;
        }
        int cur = i;
        while (true) {
            used[cur] = 1;
            const auto& f = frags[cur];
            const int c = net.chart_id(f.chart);
            for (Eigen::Index k = (pts.empty() ? 0 : 1); k < f.a.cols(); ++k) pts.push_back(chart::to_embedding(c, f.a.col(k)));
            ChartPoint end{c, f.a.col(f.a.cols() - 1)};
            const ChartFace face = chart::face_of(end, tol);
            if (face.axis < 0) throw NetIdentificationError("fragment ends inside a chart");
            end.a[face.axis] = face.side; // snap onto the face before identifying
            const int next = find_start(chart::identify(end));
            if (next < 0) throw NetIdentificationError("orphan fragment end on a chart face");
            if (next == i) break;
            if (used[next]) throw NetIdentificationError("fragments do not form closed loops");
            cur = next;
        }
        pts.back() = pts.front(); // last end is the identified copy of the first start
        out.push_back(make_sphere_curve(pts, true, lambda, Eigen::Vector4d(-1, 0, 0, 0)));
    }
    return out;
}

} // namespace vk
