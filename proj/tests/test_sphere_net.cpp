#include "vk/rng.hpp"
#include "vk/sphere_net.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <set>
#include <tuple>

using namespace vk;

namespace {

Eigen::Vector4d random_unit(SplitMix64& g)
{
    Eigen::Vector4d x;
    for (int k = 0; k < 4; ++k) x[k] = complex_gaussian(g).real();
    return x.normalized();
}

Eigen::Matrix4d frame(int id, const Eigen::Vector3d& a)
{
    Eigen::Matrix4d M;
    M.col(0) = chart::to_embedding(id, a);
    const double h = 1e-6;
    for (int m = 0; m < 3; ++m)
        M.col(m + 1) = (chart::to_embedding(id, a + h * Eigen::Vector3d::Unit(m))
                        - chart::to_embedding(id, a - h * Eigen::Vector3d::Unit(m))) / (2 * h);
    return M;
}

} // namespace

TEST_CASE("chart maps")
{
    SplitMix64 g(3);
    for (int k = 0; k < 2000; ++k) {
        const Eigen::Vector4d x = random_unit(g);
        const ChartPoint p = chart::locate(x);
        CHECK(p.a.cwiseAbs().maxCoeff() <= 1.0);
        CHECK((chart::to_embedding(p.chart, p.a) - x).norm() < 1e-12);
        // the dominant coordinate picks the chart
        int c = 0;
        for (int d = 1; d < 4; ++d)
            if (std::abs(x[d]) > std::abs(x[c])) c = d;
        CHECK(chart::axis(p.chart) == c);
    }
    for (int id = 0; id < chart::count; ++id) {
        CHECK(chart::id(chart::axis(id), chart::sign(id)) == id);
        CHECK((chart::from_embedding(id, chart::to_embedding(id, Eigen::Vector3d(0.3, -0.9, 0.5)))
               - Eigen::Vector3d(0.3, -0.9, 0.5)).norm() < 1e-12);
    }
    CHECK_THROWS(chart::from_embedding(chart::id(0, 1), Eigen::Vector4d(-1, 0, 0, 0)));
}

TEST_CASE("face identification is an involution")
{
    std::set<std::tuple<int, int, int>> targets;
    for (int id = 0; id < chart::count; ++id)
        for (int axis = 0; axis < 3; ++axis)
            for (int side : {-1, 1}) {
                const ChartFace f{id, axis, side};
                const ChartFace q = chart::partner(f);
                CHECK(chart::partner(q) == f);
                CHECK(q.chart != f.chart);
                targets.insert({q.chart, q.axis, q.side});
            }
    CHECK(targets.size() == 48); // every face is some face's partner, once

    SplitMix64 g(4);
    for (int k = 0; k < 500; ++k) {
        const int id = int(g.next() % 8);
        ChartPoint p{id, Eigen::Vector3d(2 * g.uniform() - 1, 2 * g.uniform() - 1, 2 * g.uniform() - 1)};
        const int axis = int(g.next() % 3);
        p.a[axis] = g.next() % 2 ? 1.0 : -1.0;
        const ChartPoint q = chart::identify(p);
        CHECK((chart::to_embedding(q.chart, q.a) - chart::to_embedding(p.chart, p.a)).norm() < 1e-12);
        const ChartPoint r = chart::identify(q);
        CHECK(r.chart == p.chart);
        CHECK((r.a - p.a).norm() < 1e-12);
    }
    CHECK_THROWS(chart::identify(ChartPoint{0, Eigen::Vector3d(0.1, 0.2, 0.3)}));
}

TEST_CASE("chart distortion and orientation")
{
    double worst = 1;
    int orientation = 0;
    for (int id = 0; id < chart::count; ++id)
        for (double a0 = -1; a0 <= 1.001; a0 += 0.25)
            for (double a1 = -1; a1 <= 1.001; a1 += 0.25)
                for (double a2 = -1; a2 <= 1.001; a2 += 0.25) {
                    const Eigen::Vector3d a(a0, a1, a2);
                    double smin, smax;
                    worst = std::max(worst, chart::singular_values(id, a, smin, smax));
                    // numerical frame agrees with the analytic singular values
                    const Eigen::Matrix4d M = frame(id, a);
                    Eigen::JacobiSVD<Eigen::Matrix<double, 4, 3>> svd(M.rightCols<3>());
                    CHECK(svd.singularValues()[0] == doctest::Approx(smax).epsilon(1e-6));
                    const int s = M.determinant() > 0 ? 1 : -1;
                    if (orientation == 0) orientation = s * chart::parity(id);
                    CHECK(s * chart::parity(id) == orientation);
                }
    CHECK(worst <= 2.0 + 1e-9);
}

TEST_CASE("net labels")
{
    SphereNet plain;
    for (int k = 0; k < 8; ++k) CHECK(plain.label(k) == k);
    SphereNet shuffled({3, 7, 1, 0, 6, 2, 5, 4});
    for (int k = 0; k < 8; ++k) CHECK(shuffled.chart_id(shuffled.label(k)) == k);
    CHECK_THROWS(SphereNet({0, 0, 1, 2, 3, 4, 5, 6}));
}
