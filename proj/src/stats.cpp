#include "io_util.hpp"
#include "vk/rng.hpp"
#include "vk/stats.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <unordered_map>

// Analysis file layout:
//
//   # vk-analysis 1
//   # system <name> N <int> seed <uint64> energy <E> lambda <l> spacing <s>
//   curve,length,length_classical,closed,homology,eligible,passes_origin,partner,det,a3,a4,v2,v3,knot,candidates,retries,status
//   0,12.5,12.5,1,0;0;0,1,0,-1,3,4,1,1,1,3_1,,0,ok
//
// Lengths are in lambda. The invariant fields are empty for curves that were
// not analyzed; `status` then says why.

namespace vk {

static constexpr const char* kAnalysisHeader = "# vk-analysis 1";
static constexpr const char* kAnalysisColumns = "curve,length,length_classical,closed,homology,eligible,passes_origin,"
                                                "partner,det,a3,a4,v2,v3,knot,candidates,retries,status";

bool CurveRow::knotted() const { return inv && (inv->det > 1 || inv->v2 != 0 || inv->v3 != 0); }

bool TangleRecord::any_knotted() const
{
    return std::any_of(rows.begin(), rows.end(), [](const CurveRow& r) { return r.eligible && r.knotted(); });
}

double TangleRecord::total_length() const
{
    double s = 0;
    for (const auto& r : rows) s += r.length;
    return s;
}

double TangleRecord::total_length_classical() const
{
    double s = 0;
    for (const auto& r : rows) s += r.length_classical;
    return s;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    for (;;) {
        const std::size_t j = s.find(sep, i);
        out.push_back(s.substr(i, j == std::string::npos ? std::string::npos : j - i));
        if (j == std::string::npos) break;
        i = j + 1;
    }
    return out;
}

std::string join(const std::vector<std::string>& v, char sep)
{
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? std::string(1, sep) : "") + v[k];
    return s;
}

bool parse_flag(const std::string& s, long line)
{
    if (s == "0") return false;
    if (s == "1") return true;
    throw FormatError("expected 0 or 1, got '" + s + "'", line);
}

BigInt parse_big(const std::string& s, long line)
{
    if (s.empty() || s.find_first_not_of("-0123456789") != std::string::npos)
        throw FormatError("bad integer '" + s + "'", line);
    return BigInt(s);
}

double mean_of(const std::vector<double>& v)
{
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? 0 : s / double(v.size());
}

// standard error of the mean
double sem(const std::vector<double>& v)
{
    if (v.size() < 2) return 0;
    const double m = mean_of(v);
    double ss = 0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / double(v.size() - 1) / double(v.size()));
}

// y = a + b x with known standard deviations sigma
LinearFit weighted_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& sigma)
{
    LinearFit f;
    const std::size_t n = x.size();
    if (n < 2) return f;
    Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
    Eigen::Vector2d b = Eigen::Vector2d::Zero();
    for (std::size_t k = 0; k < n; ++k) {
        const double w = 1 / (sigma[k] * sigma[k]);
        A(0, 0) += w, A(0, 1) += w * x[k], A(1, 1) += w * x[k] * x[k];
        b(0) += w * y[k], b(1) += w * x[k] * y[k];
    }
    A(1, 0) = A(0, 1);
    if (std::abs(A.determinant()) <= 1e-300) return f;
    const Eigen::Matrix2d C = A.inverse();
    const Eigen::Vector2d p = C * b;
    f.ok = true;
    f.intercept = p(0), f.slope = p(1);
    f.intercept_stderr = std::sqrt(C(0, 0)), f.slope_stderr = std::sqrt(C(1, 1));
    return f;
}

// ordinary least squares, errors from the residuals
LinearFit ordinary_line(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = x.size();
    LinearFit f = weighted_line(x, y, std::vector<double>(n, 1.0));
    if (!f.ok) return f;
    double ss = 0;
    for (std::size_t k = 0; k < n; ++k) ss += std::pow(y[k] - f.intercept - f.slope * x[k], 2);
    const double s2 = n > 2 ? ss / double(n - 2) : 0;
    f.intercept_stderr *= std::sqrt(s2);
    f.slope_stderr *= std::sqrt(s2);
    return f;
}

int log_bin(double L, int per_decade) { return int(std::floor(per_decade * std::log10(L))); }

} // namespace

void write_analysis(std::ostream& os, const TangleRecord& r)
{
    os << kAnalysisHeader << '\n';
    os << "# system " << to_string(r.system) << " N " << r.N << " seed " << r.seed << " energy " << io::fmt(r.energy)
       << " lambda " << io::fmt(r.lambda) << " spacing " << io::fmt(r.spacing) << '\n';
    os << kAnalysisColumns << '\n';
    for (const auto& c : r.rows) {
        os << c.id << ',' << io::fmt(c.length) << ',' << io::fmt(c.length_classical) << ',' << (c.closed ? 1 : 0) << ','
           << c.homology[0] << ';' << c.homology[1] << ';' << c.homology[2] << ',' << (c.eligible ? 1 : 0) << ','
           << (c.passes_origin ? 1 : 0) << ',' << c.partner << ',';
        if (c.inv) os << c.inv->det << ',' << c.inv->a3 << ',' << c.inv->a4 << ',' << c.inv->v2 << ',' << c.inv->v3;
        else os << ",,,,";
        os << ',' << c.knot << ',' << join(c.candidates, '|') << ',' << c.retries << ',' << c.status << '\n';
    }
}

TangleRecord read_analysis(std::istream& is)
{
    io::LineReader in(is);
    std::string line;
    if (!in.next(line) || line != kAnalysisHeader) throw FormatError("not a vk analysis file", in.line());
    TangleRecord r;
    if (!in.next(line)) throw FormatError("missing metadata line", in.line() + 1);
    {
        const auto tok = io::split_ws(line);
        if (tok.size() != 13 || tok[0] != "#" || tok[1] != "system" || tok[3] != "N" || tok[5] != "seed" ||
            tok[7] != "energy" || tok[9] != "lambda" || tok[11] != "spacing")
            throw FormatError("bad metadata line", in.line());
        try {
            r.system = parse_system(tok[2]);
        }
        catch (const std::exception&) {
            throw FormatError("unknown system '" + std::string(tok[2]) + "'", in.line());
        }
        r.N = io::parse_int<int>(tok[4], in.line());
        r.seed = io::parse_int<std::uint64_t>(tok[6], in.line());
        r.energy = io::parse_double(tok[8], in.line());
        r.lambda = io::parse_double(tok[10], in.line());
        r.spacing = io::parse_double(tok[12], in.line());
    }
    if (!in.next(line) || line != kAnalysisColumns) throw FormatError("unexpected analysis columns", in.line());
    while (in.next_data(line)) {
        const auto f = split(line, ',');
        const long ln = in.line();
        if (f.size() != 17) throw FormatError("analysis row needs 17 fields", ln);
        CurveRow c;
        c.id = io::parse_int<int>(f[0], ln);
        c.length = io::parse_double(f[1], ln);
        c.length_classical = io::parse_double(f[2], ln);
        c.closed = parse_flag(f[3], ln);
        const auto h = split(f[4], ';');
        if (h.size() != 3) throw FormatError("homology needs three components", ln);
        for (int a = 0; a < 3; ++a) c.homology[a] = io::parse_int<int>(h[a], ln);
        c.eligible = parse_flag(f[5], ln);
        c.passes_origin = parse_flag(f[6], ln);
        c.partner = io::parse_int<int>(f[7], ln);
        const bool has = !f[8].empty();
        for (int k = 9; k <= 12; ++k)
            if (f[k].empty() == has) throw FormatError("invariant fields must be all present or all empty", ln);
        if (has) {
            InvariantSet s;
            s.det = parse_big(f[8], ln);
            s.a3 = parse_big(f[9], ln);
            s.a4 = parse_big(f[10], ln);
            s.v2 = io::parse_int<std::int64_t>(f[11], ln);
            s.v3 = io::parse_int<std::int64_t>(f[12], ln);
            c.inv = s;
        }
        c.knot = f[13];
        if (!f[14].empty()) c.candidates = split(f[14], '|');
        c.retries = io::parse_int<int>(f[15], ln);
        c.status = f[16];
        if (c.status.empty()) throw FormatError("empty status", ln);
        r.rows.push_back(std::move(c));
    }
    return r;
}

// ---- unknot probability -------------------------------------------------

UnknotTable unknot_probability(const std::vector<TangleRecord>& records, const BinOptions& opt)
{
    if (opt.bins_per_decade < 1) throw std::invalid_argument("bins_per_decade must be positive");
    struct Acc {
        long n = 0;
        double sumL = 0;
        std::map<std::size_t, std::pair<long, long>> per; // record -> (curves, unknotted)
    };
    std::map<int, Acc> acc;
    for (std::size_t e = 0; e < records.size(); ++e)
        for (const auto& r : records[e].rows) {
            if (!r.eligible || !r.analyzed() || !(r.length > 0)) continue;
            Acc& a = acc[log_bin(r.length, opt.bins_per_decade)];
            ++a.n;
            a.sumL += r.length;
            auto& [n, u] = a.per[e];
            ++n;
            if (!r.knotted()) ++u;
        }

    UnknotTable t;
    for (const auto& [k, a] : acc) {
        UnknotBin b;
        b.lo = std::pow(10.0, double(k) / opt.bins_per_decade);
        b.hi = std::pow(10.0, double(k + 1) / opt.bins_per_decade);
        b.mean_length = a.sumL / double(a.n);
        b.curves = a.n;
        b.eigenfunctions = int(a.per.size());
        std::vector<double> p;
        for (const auto& [e, nu] : a.per) p.push_back(double(nu.second) / double(nu.first));
        b.p = mean_of(p);
        b.stderr_ = p.size() > 1 ? sem(p) : std::sqrt(b.p * (1 - b.p) / double(a.n));
        t.bins.push_back(b);
    }

    // fit window
    const std::size_t nb = t.bins.size();
    for (std::size_t i = 0; i < nb; ++i) {
        UnknotBin& b = t.bins[i];
        bool in = opt.fit_min || opt.fit_max
                      ? (!opt.fit_min || b.mean_length >= *opt.fit_min) && (!opt.fit_max || b.mean_length <= *opt.fit_max)
                      : i >= nb / 2;
        b.in_fit = in && b.curves >= opt.min_count && b.p > 0;
    }
    std::vector<double> x, y, s;
    for (const auto& b : t.bins)
        if (b.in_fit) {
            x.push_back(b.mean_length);
            y.push_back(std::log(b.p));
            // a bin with no spread still carries the resolution of its count
            s.push_back(std::max(b.stderr_, 0.5 / double(b.curves)) / b.p);
            t.fit.counts.push_back(b.curves);
        }
    const LinearFit lf = weighted_line(x, y, s);
    if (lf.ok) {
        FitResult& f = t.fit;
        f.ok = true;
        f.slope = lf.slope, f.slope_stderr = lf.slope_stderr;
        f.intercept = lf.intercept, f.intercept_stderr = lf.intercept_stderr;
        if (f.slope < 0) {
            f.L0 = -1 / f.slope;
            f.L0_stderr = f.slope_stderr / (f.slope * f.slope);
        }
        else f.L0_stderr = std::numeric_limits<double>::infinity();
        for (const auto& b : t.bins)
            if (b.in_fit) {
                if (f.L_min == 0) f.L_min = b.lo;
                f.L_max = b.hi;
            }
    }
    else t.fit.counts.clear();
    return t;
}

// ---- complexity histogram -----------------------------------------------

double log10_log10(const BigInt& det)
{
    if (det <= 1) throw std::invalid_argument("log10(log10 det) needs det > 1");
    const std::string s = det.str();
    double l10;
    if (s.size() <= 300) l10 = std::log10(det.convert_to<double>());
    else l10 = std::log10(std::stod(s.substr(0, 17))) + double(s.size() - 17);
    return std::log10(l10);
}

ComplexityHistogram complexity_histogram(const std::vector<TangleRecord>& records, int bins_per_decade)
{
    std::map<std::pair<BigInt, int>, long> count;
    for (const auto& rec : records)
        for (const auto& r : rec.rows)
            if (r.eligible && r.knotted() && r.inv->det > 1 && r.length > 0)
                ++count[{r.inv->det, log_bin(r.length, bins_per_decade)}];
    ComplexityHistogram h;
    for (const auto& [key, n] : count) {
        ComplexityCell c;
        c.det = key.first;
        c.y = log10_log10(key.first);
        c.x_lo = double(key.second) / bins_per_decade;
        c.x_hi = double(key.second + 1) / bins_per_decade;
        c.count = n;
        h.cells.push_back(c);
    }
    h.markers = {{"3_1", log10_log10(3)}, {"3_1#3_1", log10_log10(9)}};
    return h;
}

// ---- knotting probability against energy ---------------------------------

std::vector<KnottingRow> knotting_probability_vs_energy(const std::vector<TangleRecord>& records,
                                                        int min_eigenfunctions)
{
    std::map<std::pair<SystemKind, int>, KnottingRow> g;
    for (const auto& rec : records) {
        KnottingRow& k = g[{rec.system, rec.N}];
        k.system = rec.system;
        k.N = rec.N;
        k.energy = rec.energy;
        ++k.eigenfunctions;
        if (rec.any_knotted()) ++k.knotted;
    }
    std::vector<KnottingRow> out;
    for (auto& [key, k] : g) {
        k.p = double(k.knotted) / double(k.eigenfunctions);
        k.stderr_ = std::sqrt(k.p * (1 - k.p) / double(k.eigenfunctions));
        k.parity = k.N % 2 ? "odd" : "even";
        k.sufficient = k.eigenfunctions >= min_eigenfunctions;
        out.push_back(k);
    }
    return out;
}

// ---- arclength against energy ---------------------------------------------

double expected_total_length(SystemKind s, int N)
{
    const double pi = std::numbers::pi;
    switch (s) {
    case SystemKind::PeriodicCube:
        return std::pow(double(N), 3) * pi * std::sqrt(3.0) / 2;
    case SystemKind::ThreeSphere:
        return std::pow(double(N) * (N + 2), 1.5) / 3;
    case SystemKind::Harmonic3D:
        return 4 * std::pow(2 * (N + 1.5), 3) / (45 * pi);
    }
    return 0;
}

ArclengthCheck arclength_energy_check(const std::vector<TangleRecord>& records, int min_eigenfunctions)
{
    std::map<std::pair<SystemKind, int>, std::vector<const TangleRecord*>> g;
    for (const auto& rec : records) g[{rec.system, rec.N}].push_back(&rec);
    ArclengthCheck out;
    std::map<SystemKind, std::vector<const ArclengthRow*>> per_system;
    for (const auto& [key, recs] : g) {
        ArclengthRow row;
        row.system = key.first;
        row.N = key.second;
        row.energy = recs.front()->energy;
        row.eigenfunctions = int(recs.size());
        std::vector<double> L;
        for (const auto* r : recs)
            L.push_back(r->system == SystemKind::Harmonic3D ? r->total_length_classical() : r->total_length());
        row.mean = mean_of(L);
        row.stderr_ = sem(L);
        row.mean_units = row.mean * recs.front()->lambda;
        row.expected = expected_total_length(row.system, row.N);
        row.sufficient = row.eigenfunctions >= min_eigenfunctions;
        out.rows.push_back(row);
    }
    for (const auto& r : out.rows)
        if (r.sufficient) per_system[r.system].push_back(&r);
    for (const auto& [sys, rows] : per_system) {
        std::vector<double> x, y, s;
        bool weighted = true;
        for (const auto* r : rows) {
            x.push_back(r->energy);
            y.push_back(r->mean_units);
            const double lam = r->mean > 0 ? r->mean_units / r->mean : 0;
            s.push_back(r->stderr_ * lam);
            weighted = weighted && s.back() > 0;
        }
        out.fits.push_back({sys, weighted ? weighted_line(x, y, s) : ordinary_line(x, y)});
    }
    return out;
}

// ---- symmetry -------------------------------------------------------------

namespace {

struct Key4 {
    std::array<std::int64_t, 4> k;
    bool operator==(const Key4&) const = default;
};
struct Key4Hash {
    std::size_t operator()(const Key4& k) const
    {
        std::uint64_t h = 0;
        for (auto v : k.k) h = mix64(h, std::uint64_t(v));
        return std::size_t(h);
    }
};

// uniform hash of points in R^4 for fixed-radius nearest queries
class PointHash {
public:
    explicit PointHash(double cell) : cell_(cell) {}
    void add(const Eigen::Vector4d& p, int curve) { map_[key(p)].push_back({p, curve}); }
    // nearest point within `cell` of p, -1 if none
    std::pair<int, double> nearest(const Eigen::Vector4d& p, int dims) const
    {
        const Key4 c = key(p);
        int best = -1;
        double bd = cell_;
        std::array<int, 4> lo{-1, -1, -1, -1}, hi{1, 1, 1, 1};
        for (int a = dims; a < 4; ++a) lo[a] = hi[a] = 0;
        for (int i = lo[0]; i <= hi[0]; ++i)
            for (int j = lo[1]; j <= hi[1]; ++j)
                for (int k = lo[2]; k <= hi[2]; ++k)
                    for (int l = lo[3]; l <= hi[3]; ++l) {
                        auto it = map_.find({{c.k[0] + i, c.k[1] + j, c.k[2] + k, c.k[3] + l}});
                        if (it == map_.end()) continue;
                        for (const auto& [q, cv] : it->second) {
                            const double d = (q - p).norm();
                            if (d < bd || (d == bd && cv < best)) bd = d, best = cv;
                        }
                    }
        return {best, bd};
    }

private:
    Key4 key(const Eigen::Vector4d& p) const
    {
        Key4 k;
        for (int a = 0; a < 4; ++a) k.k[a] = std::int64_t(std::floor(p[a] / cell_));
        return k;
    }
    double cell_;
    std::unordered_map<Key4, std::vector<std::pair<Eigen::Vector4d, int>>, Key4Hash> map_;
};

std::vector<Eigen::Vector4d> points4(const VortexCurve& c)
{
    if (c.system == SystemKind::ThreeSphere) return sphere_points(c);
    std::vector<Eigen::Vector4d> p(c.vertices.cols());
    for (Eigen::Index k = 0; k < c.vertices.cols(); ++k) p[k] << c.vertices.col(k), 0.0;
    return p;
}

double distance_to_origin(const Eigen::Matrix3Xd& v)
{
    double d = v.cols() ? v.col(0).norm() : 0;
    for (Eigen::Index k = 0; k + 1 < v.cols(); ++k) {
        const Eigen::Vector3d a = v.col(k), e = v.col(k + 1) - a;
        const double t = e.squaredNorm() > 0 ? std::clamp(-a.dot(e) / e.squaredNorm(), 0.0, 1.0) : 0.0;
        d = std::min(d, (a + t * e).norm());
    }
    return d;
}

} // namespace

std::vector<AntipodalMatch> antipodal_partners(const std::vector<VortexCurve>& curves, double spacing)
{
    std::vector<AntipodalMatch> out(curves.size());
    if (curves.empty()) return out;
    const SystemKind sys = curves.front().system;
    if (sys == SystemKind::PeriodicCube) throw std::invalid_argument("antipodal_partners: no antipodal map on the torus");
    const double lambda = curves.front().lambda;
    const double h = spacing * lambda, tol = 2 * h;
    const int dims = sys == SystemKind::ThreeSphere ? 4 : 3;

    std::vector<std::vector<Eigen::Vector4d>> pts(curves.size());
    PointHash hash(tol);
    for (std::size_t c = 0; c < curves.size(); ++c) {
        pts[c] = points4(curves[c]);
        for (const auto& p : pts[c]) hash.add(p, int(c));
    }
    for (std::size_t c = 0; c < curves.size(); ++c) {
        const auto& P = pts[c];
        if (P.empty()) continue;
        const std::size_t stride = std::max<std::size_t>(1, P.size() / 256);
        std::map<int, int> votes;
        int samples = 0;
        for (std::size_t k = 0; k < P.size(); k += stride, ++samples) {
            const auto [cv, d] = hash.nearest(-P[k], dims);
            if (cv >= 0) ++votes[cv];
        }
        int best = -1, bv = 0;
        for (const auto& [cv, v] : votes)
            if (v > bv) bv = v, best = cv;
        if (best < 0 || 2 * bv < samples) continue;
        AntipodalMatch& m = out[c];
        m.partner = best;
        double dev = 0;
        for (std::size_t k = 0; k < P.size(); k += stride) {
            double dmin = std::numeric_limits<double>::infinity();
            for (const auto& q : pts[best]) dmin = std::min(dmin, (q + P[k]).norm());
            dev = std::max(dev, dmin);
        }
        m.deviation = dev / lambda;
        if (sys == SystemKind::Harmonic3D && best == int(c))
            m.passes_origin = distance_to_origin(curves[c].vertices) <= h * std::sqrt(3.0);
    }
    return out;
}

SymmetryReport symmetry_audit(const std::vector<VortexCurve>& curves, const TangleRecord& record)
{
    SymmetryReport r;
    r.system = record.system;
    r.N = record.N;
    r.seed = record.seed;
    r.curves = int(curves.size());
    r.applicable = record.system != SystemKind::PeriodicCube;
    if (!r.applicable) return r;
    if (record.system == SystemKind::Harmonic3D) r.expected_origin_curves = record.N % 2 ? 1 : 0;
    const auto m = antipodal_partners(curves, record.spacing);
    std::map<int, const CurveRow*> row_of;
    for (const auto& row : record.rows) row_of[row.id] = &row;
    for (std::size_t c = 0; c < m.size(); ++c) {
        if (m[c].partner < 0) {
            ++r.unmatched;
            continue;
        }
        r.max_deviation = std::max(r.max_deviation, m[c].deviation);
        if (m[c].passes_origin) ++r.origin_curves;
        if (m[c].partner == int(c)) {
            ++r.self_antipodal;
            continue;
        }
        ++r.paired;
        if (m[c].partner < int(c)) continue; // each pair once
        auto a = row_of.find(curves[c].id), b = row_of.find(curves[m[c].partner].id);
        if (a == row_of.end() || b == row_of.end() || !a->second->inv || !b->second->inv) continue;
        ++r.det_pairs;
        if (a->second->inv->det != b->second->inv->det) ++r.det_mismatches;
    }
    return r;
}

// ---- plot-data writers ------------------------------------------------------

void write_fig2_main(std::ostream& os, const std::vector<std::pair<SystemKind, UnknotTable>>& tables)
{
    os << "# vk-fig2-main 1\n"
          "# probability that an eligible curve is unknotted, binned in length L (lambda);\n"
          "# stderr over eigenfunctions; ln P = intercept + slope L fitted over bins with in_fit = 1, L0 = -1/slope\n"
          "# fit,system,ok,L0,L0_stderr,slope,slope_stderr,intercept,intercept_stderr,L_min,L_max\n";
    for (const auto& [sys, t] : tables) {
        const FitResult& f = t.fit;
        os << "# fit," << to_string(sys) << ',' << (f.ok ? 1 : 0) << ',' << io::fmt(f.L0) << ','
           << io::fmt(f.L0_stderr) << ',' << io::fmt(f.slope) << ',' << io::fmt(f.slope_stderr) << ','
           << io::fmt(f.intercept) << ',' << io::fmt(f.intercept_stderr) << ',' << io::fmt(f.L_min) << ','
           << io::fmt(f.L_max) << '\n';
    }
    os << "system,L_lo,L_hi,L_mean,curves,eigenfunctions,P_unknot,stderr,in_fit\n";
    for (const auto& [sys, t] : tables)
        for (const auto& b : t.bins)
            os << to_string(sys) << ',' << io::fmt(b.lo) << ',' << io::fmt(b.hi) << ',' << io::fmt(b.mean_length) << ','
               << b.curves << ',' << b.eigenfunctions << ',' << io::fmt(b.p) << ',' << io::fmt(b.stderr_) << ','
               << (b.in_fit ? 1 : 0) << '\n';
}

void write_fig2_inset(std::ostream& os, const std::vector<std::pair<SystemKind, ComplexityHistogram>>& hists)
{
    os << "# vk-fig2-inset 1\n"
          "# knotted curves counted by y = log10(log10 det) against x = log10 L, L in lambda\n";
    if (!hists.empty())
        for (const auto& [name, y] : hists.front().second.markers) os << "# marker," << name << ',' << io::fmt(y) << '\n';
    os << "system,det,y,x_lo,x_hi,count\n";
    for (const auto& [sys, h] : hists)
        for (const auto& c : h.cells)
            os << to_string(sys) << ',' << c.det << ',' << io::fmt(c.y) << ',' << io::fmt(c.x_lo) << ','
               << io::fmt(c.x_hi) << ',' << c.count << '\n';
}

void write_fig3(std::ostream& os, const std::vector<KnottingRow>& rows)
{
    os << "# vk-fig3 1\n"
          "# fraction of eigenfunctions with at least one knotted eligible curve, binomial stderr;\n"
          "# E_N in system units: cube 3N^2, sphere N(N+2), oscillator N+3/2\n"
          "system,N,E_N,eigenfunctions,knotted,P_knotted,stderr,parity,sufficient\n";
    for (const auto& k : rows)
        os << to_string(k.system) << ',' << k.N << ',' << io::fmt(k.energy) << ',' << k.eigenfunctions << ','
           << k.knotted << ',' << io::fmt(k.p) << ',' << io::fmt(k.stderr_) << ',' << k.parity << ','
           << (k.sufficient ? 1 : 0) << '\n';
}

void write_arclength_check(std::ostream& os, const ArclengthCheck& check)
{
    os << "# vk-arclength-check 1\n"
          "# mean total vortex length per eigenfunction in lambda (oscillator: inside the classical ball) and in\n"
          "# system length units; expected from the line density E/3pi; fit of length in units against E_N\n"
          "# fit,system,ok,slope,slope_stderr,intercept,intercept_stderr\n";
    for (const auto& [sys, f] : check.fits)
        os << "# fit," << to_string(sys) << ',' << (f.ok ? 1 : 0) << ',' << io::fmt(f.slope) << ','
           << io::fmt(f.slope_stderr) << ',' << io::fmt(f.intercept) << ',' << io::fmt(f.intercept_stderr) << '\n';
    os << "system,N,E_N,eigenfunctions,mean_length,stderr,mean_length_units,expected_length,sufficient\n";
    for (const auto& r : check.rows)
        os << to_string(r.system) << ',' << r.N << ',' << io::fmt(r.energy) << ',' << r.eigenfunctions << ','
           << io::fmt(r.mean) << ',' << io::fmt(r.stderr_) << ',' << io::fmt(r.mean_units) << ','
           << io::fmt(r.expected) << ',' << (r.sufficient ? 1 : 0) << '\n';
}

void write_symmetry_audit(std::ostream& os, const std::vector<SymmetryReport>& reports)
{
    os << "# vk-symmetry-audit 1\n"
          "# antipodal images of every curve; deviation in lambda\n"
          "system,N,seed,applicable,curves,paired,self_antipodal,unmatched,max_deviation,origin_curves,"
          "expected_origin_curves,det_pairs,det_mismatches\n";
    for (const auto& r : reports)
        os << to_string(r.system) << ',' << r.N << ',' << r.seed << ',' << (r.applicable ? 1 : 0) << ',' << r.curves
           << ',' << r.paired << ',' << r.self_antipodal << ',' << r.unmatched << ',' << io::fmt(r.max_deviation) << ','
           << r.origin_curves << ',' << r.expected_origin_curves << ',' << r.det_pairs << ',' << r.det_mismatches
           << '\n';
}

} // namespace vk
