#include "io_util.hpp"
#include "vk/curve.hpp"

#include <ostream>

// Curve file layout:
//
//   # vk-curves 1
//   system <cube|sphere|ho>
//   N <int>
//   seed <uint64>
//   spacing <double>             initial grid spacing in lambda
//   depth_used <int>
//   lambda <double>
//   truncation_radius <double>   oscillator only, 0 otherwise
//   classical_radius <double>
//   pole <w> <x> <y> <z>         3-sphere stereographic pole
//   curves <count>
//   curve <id> closed <0|1> homology <hx> <hy> <hz> vertices <n> arclength <L>
//   <c0> <c1> <c2>               n rows, system-native coordinates
//   simplified <m>               optional
//   <c0> <c1> <c2>               m rows
//
// Open oscillator curves are stored unclosed; the closure used for their
// invariants is recomputed on analysis.

namespace vk {

static constexpr const char* kCurvesHeader = "# vk-curves 1";

namespace {

void write_rows(std::ostream& os, const Eigen::Matrix3Xd& v)
{
    for (Eigen::Index k = 0; k < v.cols(); ++k)
        os << io::fmt(v(0, k)) << ' ' << io::fmt(v(1, k)) << ' ' << io::fmt(v(2, k)) << '\n';
}

Eigen::Matrix3Xd read_rows(io::LineReader& in, long n)
{
    Eigen::Matrix3Xd v(3, n);
    for (long k = 0; k < n; ++k) {
        const auto t = io::split_ws(in.expect_data("vertex row"));
        if (t.size() != 3) throw FormatError("vertex row needs 3 fields", in.line());
        for (int a = 0; a < 3; ++a) v(a, k) = io::parse_double(t[a], in.line());
    }
    return v;
}

template <typename T>
T keyed(io::LineReader& in, const char* key)
{
    const auto t = io::split_ws(in.expect_data(key));
    const auto v = io::expect_key(t, key, in.line());
    if constexpr (std::is_floating_point_v<T>) return io::parse_double(v, in.line());
    else return io::parse_int<T>(v, in.line());
}

} // namespace

void write_curves(std::ostream& os, const CurveFileHeader& h, const std::vector<CurveRecord>& curves)
{
    os << kCurvesHeader << '\n';
    os << "system " << to_string(h.system) << '\n';
    os << "N " << h.N << '\n';
    os << "seed " << h.seed << '\n';
    os << "spacing " << io::fmt(h.spacing) << '\n';
    os << "depth_used " << h.depth_used << '\n';
    os << "lambda " << io::fmt(h.lambda) << '\n';
    os << "truncation_radius " << io::fmt(h.truncation_radius) << '\n';
    os << "classical_radius " << io::fmt(h.classical_radius) << '\n';
    os << "pole";
    for (int a = 0; a < 4; ++a) os << ' ' << io::fmt(h.pole[a]);
    os << '\n';
    os << "curves " << curves.size() << '\n';
    for (const auto& r : curves) {
        const auto& c = r.curve;
        os << "curve " << c.id << " closed " << (c.closed ? 1 : 0) << " homology " << c.homology[0] << ' '
           << c.homology[1] << ' ' << c.homology[2] << " vertices " << c.vertices.cols() << " arclength "
           << io::fmt(c.arclength_lambda) << '\n';
        write_rows(os, c.vertices);
        if (r.simplified) {
            os << "simplified " << r.simplified->cols() << '\n';
            write_rows(os, *r.simplified);
        }
    }
}

std::vector<CurveRecord> read_curves(std::istream& is, CurveFileHeader& h)
{
    io::LineReader in(is);
    std::string line;
    if (!in.next(line) || line != kCurvesHeader)
        throw FormatError("not a vk curve file (schema header missing or unsupported)", in.line());
    {
        const auto t = io::split_ws(in.expect_data("system"));
        try {
            h.system = parse_system(io::expect_key(t, "system", in.line()));
        }
        catch (const std::invalid_argument& e) {
            throw FormatError(e.what(), in.line());
        }
    }
    h.N = keyed<int>(in, "N");
    h.seed = keyed<std::uint64_t>(in, "seed");
    h.spacing = keyed<double>(in, "spacing");
    h.depth_used = keyed<int>(in, "depth_used");
    h.lambda = keyed<double>(in, "lambda");
    h.truncation_radius = keyed<double>(in, "truncation_radius");
    h.classical_radius = keyed<double>(in, "classical_radius");
    {
        const auto t = io::split_ws(in.expect_data("pole"));
        if (t.size() != 5 || t[0] != "pole") throw FormatError("expected 'pole <w> <x> <y> <z>'", in.line());
        for (int a = 0; a < 4; ++a) h.pole[a] = io::parse_double(t[a + 1], in.line());
    }
    const long count = keyed<long>(in, "curves");
    if (count < 0) throw FormatError("negative curve count", in.line());

    std::vector<CurveRecord> out;
    out.reserve(count);
    bool have_line = false;
    for (long j = 0; j < count; ++j) {
        if (!have_line) line = in.expect_data("curve record");
        have_line = false;
        const auto t = io::split_ws(line);
        if (t.size() != 12 || t[0] != "curve" || t[2] != "closed" || t[4] != "homology" || t[8] != "vertices" ||
            t[10] != "arclength")
            throw FormatError("malformed curve record", in.line());
        const long rec_line = in.line();
        const int id = io::parse_int<int>(t[1], rec_line);
        const int closed = io::parse_int<int>(t[3], rec_line);
        if (closed != 0 && closed != 1) throw FormatError("closed flag must be 0 or 1", rec_line);
        Eigen::Vector3i hom(io::parse_int<int>(t[5], rec_line), io::parse_int<int>(t[6], rec_line),
                            io::parse_int<int>(t[7], rec_line));
        const long n = io::parse_int<long>(t[9], rec_line);
        if (n < 0) throw FormatError("negative vertex count", rec_line);
        const double L = io::parse_double(t[11], rec_line);
        Eigen::Matrix3Xd v = read_rows(in, n);
        if (closed && n > 0 && v.col(0) != v.col(n - 1))
            throw FormatError("closed curve must repeat its first vertex", rec_line);
        if (!hom.isZero() && h.system != SystemKind::PeriodicCube)
            throw FormatError("homology is only defined on the periodic cube", rec_line);

        CurveRecord r;
        VortexCurve& c = r.curve;
        c.id = id;
        c.system = h.system;
        c.vertices = std::move(v);
        c.closed = closed;
        c.homology = hom;
        c.lambda = h.lambda;
        c.truncation_radius = h.truncation_radius;
        c.classical_radius = h.classical_radius;
        c.pole = h.pole;
        c.embedding = h.system == SystemKind::ThreeSphere ? stereographic(sphere_points(c), c.pole) : c.vertices;
        c.arclength_lambda = L;

        if (in.next_data(line)) {
            const auto s = io::split_ws(line);
            if (!s.empty() && s[0] == "simplified") {
                if (s.size() != 2) throw FormatError("expected 'simplified <count>'", in.line());
                const long m = io::parse_int<long>(s[1], in.line());
                if (m < 0) throw FormatError("negative vertex count", in.line());
                r.simplified = read_rows(in, m);
            }
            else have_line = true;
        }
        out.push_back(std::move(r));
    }
    if (have_line || in.next_data(line)) throw FormatError("trailing data after curve records", in.line());
    return out;
}

} // namespace vk
