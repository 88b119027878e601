#include "support.hpp"

#include "vk/errors.hpp"
#include "vk/stats.hpp"

#include <doctest.h>

#include <sstream>

using namespace vk;
using vk::test::pi;

namespace {

TangleRecord record_of(SystemKind s, int N, std::uint64_t seed, std::vector<double> lengths, std::vector<int> dets)
{
    TangleRecord r;
    r.system = s;
    r.N = N;
    r.seed = seed;
    r.energy = mode_spec(s, N).energy;
    r.lambda = mode_spec(s, N).wavelength;
    for (std::size_t k = 0; k < lengths.size(); ++k) {
        CurveRow c;
        c.id = int(k);
        c.length = c.length_classical = lengths[k];
        InvariantSet inv;
        inv.det = dets[k];
        if (dets[k] > 1) inv.v2 = 1;
        c.inv = inv;
        r.rows.push_back(c);
    }
    return r;
}

} // namespace

TEST_CASE("knotted flag")
{
    CurveRow c;
    CHECK(!c.knotted());
    c.inv = InvariantSet{};
    CHECK(!c.knotted());
    c.inv->v3 = 2; // det 1 but a non-zero Vassiliev invariant
    CHECK(c.knotted());
    c.inv = InvariantSet{};
    c.inv->det = 3;
    CHECK(c.knotted());
    c.inv = InvariantSet{};
    c.inv->a3 = 4; // only the Alexander magnitudes at other roots: not counted
    CHECK(!c.knotted());
}

TEST_CASE("analysis file round trip")
{
    auto r = record_of(SystemKind::Harmonic3D, 5, 9, {12.5, 3.25, 40}, {3, 1, 29});
    r.rows[1].inv.reset();
    r.rows[1].status = "PersistentDegeneracy";
    r.rows[1].eligible = false;
    r.rows[2].closed = false;
    r.rows[2].passes_origin = true;
    r.rows[2].partner = 2;
    r.rows[2].knot = "unidentified";
    r.rows[2].candidates = {"8_12", "8_12*"};
    r.rows[0].homology = {1, -2, 0};
    r.rows[0].retries = 2;
    r.rows[0].inv->v3 = -1;
    std::stringstream ss;
    write_analysis(ss, r);
    const std::string text = ss.str();
    auto back = read_analysis(ss);
    std::stringstream again;
    write_analysis(again, back);
    CHECK(again.str() == text);
    CHECK(back.N == 5);
    CHECK(back.seed == 9);
    REQUIRE(back.rows.size() == 3);
    CHECK(!back.rows[1].inv);
    CHECK(back.rows[2].candidates == r.rows[2].candidates);
    CHECK(back.rows[0].homology == Eigen::Vector3i(1, -2, 0));
    CHECK(*back.rows[0].inv == *r.rows[0].inv);

    // malformed input names the offending line
    std::string bad = text;
    bad.replace(bad.find("12.5"), 4, "x1.5");
    std::stringstream bs(bad);
    try {
        read_analysis(bs);
        FAIL("accepted a malformed row");
    }
    catch (const FormatError& e) {
        CHECK(e.line == 4);
    }
    std::stringstream wrong("# vk-analysis 2\n");
    CHECK_THROWS_AS(read_analysis(wrong), FormatError);
}

TEST_CASE("unknot probability: synthetic exponential")
{
    const auto recs = test::synthetic_records(100, 100000, 100, 1);
    const auto t = unknot_probability(recs);
    REQUIRE(t.fit.ok);
    CHECK(t.fit.L0 == doctest::Approx(100).epsilon(0.05));
    CHECK(t.fit.L_min > 0);
    CHECK(t.fit.L_max > t.fit.L_min);
    // non-increasing across bins within 3 sigma
    for (std::size_t k = 1; k < t.bins.size(); ++k) {
        const auto &a = t.bins[k - 1], &b = t.bins[k];
        CHECK(b.p <= a.p + 3 * std::hypot(a.stderr_, b.stderr_));
    }
    for (const auto& b : t.bins) {
        CHECK(b.p >= 0);
        CHECK(b.p <= 1);
        CHECK(b.stderr_ <= 0.5);
        CHECK(b.hi / b.lo == doctest::Approx(std::pow(10.0, 1.0 / 8)));
    }

    // an explicit window works too
    BinOptions o;
    o.fit_min = 30;
    o.fit_max = 300;
    CHECK(unknot_probability(recs, o).fit.L0 == doctest::Approx(100).epsilon(0.05));
}

TEST_CASE("unknot probability: degenerate inputs")
{
    auto recs = test::synthetic_records(1e300, 2000, 50, 2);
    const auto t = unknot_probability(recs);
    for (const auto& b : t.bins) CHECK(b.p == 1.0);
    REQUIRE(t.fit.ok);
    CHECK(t.fit.slope == doctest::Approx(0).epsilon(1e-12));
    CHECK(std::isinf(t.fit.L0));

    // too little data: table but no fit
    const auto few = unknot_probability(test::synthetic_records(100, 5, 5, 3));
    CHECK(!few.bins.empty());
    CHECK(!few.fit.ok);
    CHECK(unknot_probability({}).bins.empty());
}

TEST_CASE("complexity histogram")
{
    CHECK(log10_log10(3) == doctest::Approx(-0.32).epsilon(0.02));
    CHECK(log10_log10(9) == doctest::Approx(-0.02).epsilon(0.05));
    CHECK_THROWS(log10_log10(1));
    // very large determinants stay finite
    BigInt huge = 1;
    for (int k = 0; k < 400; ++k) huge *= 10;
    CHECK(log10_log10(huge) == doctest::Approx(std::log10(400.0)));

    CHECK(complexity_histogram({}).cells.empty());
    auto r = record_of(SystemKind::ThreeSphere, 7, 1, {10, 11, 1000, 50}, {3, 3, 9, 1});
    const auto h = complexity_histogram({r});
    REQUIRE(h.cells.size() == 2);
    CHECK(h.cells[0].det == 3);
    CHECK(h.cells[0].count == 2);
    CHECK(h.cells[0].y == doctest::Approx(log10_log10(3)));
    CHECK(h.cells[1].x_lo == doctest::Approx(3.0));
    REQUIRE(h.markers.size() == 2);
    CHECK(h.markers[0].second == doctest::Approx(-0.32).epsilon(0.02));
    CHECK(h.markers[1].second == doctest::Approx(-0.02).epsilon(0.05));
}

TEST_CASE("knotting probability against energy")
{
    std::vector<TangleRecord> recs;
    for (int s = 1; s <= 12; ++s) recs.push_back(record_of(SystemKind::Harmonic3D, 4, s, {10, 20}, {1, 1}));
    for (int s = 1; s <= 10; ++s) recs.push_back(record_of(SystemKind::Harmonic3D, 5, s, {10, 20}, {1, s <= 4 ? 5 : 1}));
    recs.push_back(record_of(SystemKind::ThreeSphere, 3, 1, {10}, {3}));
    const auto rows = knotting_probability_vs_energy(recs);
    REQUIRE(rows.size() == 3);
    const auto& even = rows[1];
    CHECK(even.N == 4);
    CHECK(even.p == 0);
    CHECK(even.stderr_ == 0);
    CHECK(even.parity == "even");
    const auto& odd = rows[2];
    CHECK(odd.p == doctest::Approx(0.4));
    CHECK(odd.stderr_ == doctest::Approx(std::sqrt(0.4 * 0.6 / 10)));
    CHECK(odd.parity == "odd");
    CHECK(odd.energy == 6.5);
    CHECK(!rows[0].sufficient);
    for (const auto& k : rows) {
        CHECK(k.p >= 0);
        CHECK(k.p <= 1);
        CHECK(k.stderr_ <= 0.5);
    }
}

TEST_CASE("expected arclength")
{
    // the line density E/3pi per unit volume (wavenumber k, E = k^2),
    // integrated by quadrature and measured in lambda = 2 pi / k
    auto sphere = [](int N) {
        const double E = N * (N + 2.0), k = std::sqrt(E);
        return E / (3 * pi) * 2 * pi * pi / (2 * pi / k);
    };
    auto cube = [](int N) {
        const double E = 3.0 * N * N, k = std::sqrt(E);
        return E / (3 * pi) * std::pow(2 * pi, 3) / (2 * pi / k) / 8; // one nodal cell of side pi
    };
    auto oscillator = [](int N) {
        // local wavenumber k(r)^2 = 2E - r^2 inside the classical ball
        const double E = N + 1.5, R = std::sqrt(2 * E), lam = 2 * pi / R;
        const int n = 20000;
        double s = 0;
        for (int i = 0; i < n; ++i) {
            const double r = R * (i + 0.5) / n;
            s += (2 * E - r * r) / (3 * pi) * 4 * pi * r * r * (R / n);
        }
        return s / lam;
    };
    for (int N : {3, 9, 17}) {
        CHECK(expected_total_length(SystemKind::ThreeSphere, N) == doctest::Approx(sphere(N)));
        CHECK(expected_total_length(SystemKind::PeriodicCube, N) == doctest::Approx(cube(N)));
        CHECK(expected_total_length(SystemKind::Harmonic3D, N) == doctest::Approx(oscillator(N)).epsilon(1e-6));
    }
    // published desk values
    CHECK(expected_total_length(SystemKind::ThreeSphere, 17) == doctest::Approx(1930).epsilon(0.1));
    CHECK(expected_total_length(SystemKind::PeriodicCube, 9) == doctest::Approx(2000).epsilon(0.1));
}

TEST_CASE("arclength against energy")
{
    SplitMix64 g(4);
    std::vector<TangleRecord> recs;
    auto add = [&](int N, int n) {
        for (int s = 0; s < n; ++s) {
            const double mean = expected_total_length(SystemKind::ThreeSphere, N);
            recs.push_back(record_of(SystemKind::ThreeSphere, N, s, {mean * (0.9 + 0.2 * g.uniform())}, {1}));
        }
    };
    for (int N : {5, 7, 9}) add(N, 40);
    auto check = arclength_energy_check(recs);
    REQUIRE(check.rows.size() == 3);
    REQUIRE(check.fits.size() == 1);
    CHECK(check.fits[0].second.ok);
    for (const auto& r : check.rows) {
        CHECK(r.mean == doctest::Approx(r.expected).epsilon(0.03));
        CHECK(r.mean_units == doctest::Approx(r.mean * mode_spec(SystemKind::ThreeSphere, r.N).wavelength));
    }
    // length in system units grows with E_N: L = 2 pi^2 E / (3 pi) = (2 pi / 3) E
    CHECK(check.fits[0].second.slope == doctest::Approx(2 * pi / 3).epsilon(0.05));

    // doubling the sample shrinks the standard error by about sqrt 2
    g = SplitMix64(5);
    recs.clear();
    add(5, 400);
    const std::vector<TangleRecord> small(recs.begin(), recs.begin() + 200), big = recs;
    const double s1 = arclength_energy_check(small).rows[0].stderr_;
    const double s2 = arclength_energy_check(big).rows[0].stderr_;
    CHECK(s1 / s2 == doctest::Approx(std::sqrt(2.0)).epsilon(0.15));
    CHECK(!arclength_energy_check(std::vector<TangleRecord>(recs.begin(), recs.begin() + 10)).rows[0].sufficient);
}

TEST_CASE("antipodal partners and symmetry audit")
{
    const double lambda = 0.5, spacing = 0.1;
    SUBCASE("3-sphere")
    {
        // a small loop, its antipode and a self-antipodal great circle
        auto loop = [](double sgn) {
            std::vector<Eigen::Vector4d> p;
            for (int k = 0; k <= 200; ++k) {
                const double t = 2 * pi * k / 200;
                p.push_back(sgn * Eigen::Vector4d(std::cos(0.3), std::sin(0.3) * std::cos(t), std::sin(0.3) * std::sin(t), 0));
            }
            return p;
        };
        std::vector<Eigen::Vector4d> gc;
        for (int k = 0; k <= 400; ++k) {
            const double t = 2 * pi * k / 400;
            gc.push_back(Eigen::Vector4d(std::cos(t), 0, 0, std::sin(t)));
        }
        const Eigen::Vector4d pole(0, 1, 0, 0);
        std::vector<VortexCurve> cs = {make_sphere_curve(loop(1), true, lambda, pole),
                                       make_sphere_curve(gc, true, lambda, pole),
                                       make_sphere_curve(loop(-1), true, lambda, pole)};
        for (int k = 0; k < 3; ++k) cs[k].id = k;
        const auto m = antipodal_partners(cs, spacing);
        CHECK(m[0].partner == 2);
        CHECK(m[2].partner == 0);
        CHECK(m[1].partner == 1);
        CHECK(m[0].deviation < 1e-9);
        CHECK(!m[1].passes_origin);

        auto rec = record_of(SystemKind::ThreeSphere, 3, 1, {1, 1, 1}, {3, 1, 3});
        rec.spacing = spacing;
        auto rep = symmetry_audit(cs, rec);
        CHECK(rep.applicable);
        CHECK(rep.paired == 2);
        CHECK(rep.self_antipodal == 1);
        CHECK(rep.unmatched == 0);
        CHECK(rep.det_pairs == 1);
        CHECK(rep.det_mismatches == 0);
        rec.rows[2].inv->det = 5;
        CHECK(symmetry_audit(cs, rec).det_mismatches == 1);

        // a lone loop without its image is reported, not thrown
        cs.pop_back();
        rep = symmetry_audit(cs, rec);
        CHECK(rep.unmatched == 1);
    }
    SUBCASE("oscillator")
    {
        Eigen::Matrix3Xd line(3, 21);
        for (int k = 0; k <= 20; ++k) line.col(k) = Eigen::Vector3d(0.01, 0.02, -5 + 0.5 * k);
        Eigen::Matrix3Xd ring = 0.2 * test::circle(1.0, 100);
        ring.row(0).array() += 2.0;
        std::vector<VortexCurve> cs = {make_curve(SystemKind::Harmonic3D, line, false, lambda),
                                       make_curve(SystemKind::Harmonic3D, ring, true, lambda),
                                       make_curve(SystemKind::Harmonic3D, -ring, true, lambda)};
        const auto m = antipodal_partners(cs, spacing);
        CHECK(m[0].partner == 0);
        CHECK(m[0].passes_origin);
        CHECK(m[1].partner == 2);
        CHECK(!m[1].passes_origin);

        auto rec = record_of(SystemKind::Harmonic3D, 5, 1, {1, 1, 1}, {1, 3, 3});
        rec.spacing = spacing;
        const auto rep = symmetry_audit(cs, rec);
        CHECK(rep.expected_origin_curves == 1);
        CHECK(rep.origin_curves == 1);
        CHECK(rep.paired == 2);
        CHECK(rep.det_mismatches == 0);
    }
    SUBCASE("cube: not applicable")
    {
        auto rec = record_of(SystemKind::PeriodicCube, 3, 1, {}, {});
        CHECK(!symmetry_audit({}, rec).applicable);
    }
}

TEST_CASE("plot-data writers")
{
    const auto recs = test::synthetic_records(100, 20000, 100, 5);
    std::stringstream a, b, c, d, e;
    write_fig2_main(a, {{SystemKind::ThreeSphere, unknot_probability(recs)}});
    write_fig2_inset(b, {{SystemKind::ThreeSphere, complexity_histogram(recs)}});
    write_fig3(c, knotting_probability_vs_energy(recs));
    write_arclength_check(d, arclength_energy_check(recs));
    write_symmetry_audit(e, {});
    CHECK(a.str().rfind("# vk-fig2-main 1\n", 0) == 0);
    CHECK(a.str().find("# fit,sphere,1,") != std::string::npos);
    CHECK(b.str().find("# marker,3_1,") != std::string::npos);
    CHECK(c.str().rfind("# vk-fig3 1\n", 0) == 0);
    CHECK(d.str().rfind("# vk-arclength-check 1\n", 0) == 0);
    CHECK(e.str().rfind("# vk-symmetry-audit 1\n", 0) == 0);
    // pure functions of their input
    std::stringstream a2;
    write_fig2_main(a2, {{SystemKind::ThreeSphere, unknot_probability(recs)}});
    CHECK(a2.str() == a.str());
}
