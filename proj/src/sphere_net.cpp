#include "vk/sphere_net.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace vk {

namespace chart {

std::array<int, 3> local_axes(int id)
{
    const int c = axis(id);
    std::array<int, 3> L{};
    int k = 0;
    for (int d = 0; d < 4; ++d)
        if (d != c) L[k++] = d;
    return L;
}

int parity(int id) { return sign(id) * ((axis(id) & 1) ? -1 : 1); }

Eigen::Vector4d to_embedding(int id, const Eigen::Vector3d& a)
{
    const int c = axis(id);
    const auto L = local_axes(id);
    double v[4];
    v[c] = 1.0;
    for (int m = 0; m < 3; ++m) v[L[m]] = a[m];
    // fixed summation order over embedding axes, independent of the chart
    double s2 = 0;
    for (int d = 0; d < 4; ++d) s2 += v[d] * v[d];
    const double w = 1.0 / std::sqrt(s2);
    Eigen::Vector4d x;
    for (int d = 0; d < 4; ++d) x[d] = v[d] * w;
    x[c] *= sign(id);
    return x;
}

Eigen::Vector3d from_embedding(int id, const Eigen::Vector4d& x)
{
    const int c = axis(id);
    const double w = sign(id) * x[c];
    if (!(w > 0)) throw std::invalid_argument("point not in chart hemisphere");
    const auto L = local_axes(id);
    Eigen::Vector3d a;
    for (int m = 0; m < 3; ++m) a[m] = x[L[m]] / w;
    return a;
}

ChartPoint locate(const Eigen::Vector4d& x)
{
    int c = 0;
    for (int d = 1; d < 4; ++d)
        if (std::abs(x[d]) > std::abs(x[c])) c = d;
    const int id = chart::id(c, x[c] >= 0 ? 1 : -1);
    ChartPoint p{id, from_embedding(id, x)};
    for (int m = 0; m < 3; ++m) p.a[m] = std::clamp(p.a[m], -1.0, 1.0);
    return p;
}

ChartFace partner(const ChartFace& f)
{
    const auto L = local_axes(f.chart);
    const int i = L[f.axis];
    const int other = id(i, f.side);
    const auto L2 = local_axes(other);
    int k2 = 0;
    while (L2[k2] != axis(f.chart)) ++k2;
    return {other, k2, sign(f.chart)};
}

ChartFace face_of(const ChartPoint& p, double tol)
{
    ChartFace f{p.chart, -1, 0};
    for (int m = 0; m < 3; ++m)
        if (std::abs(p.a[m]) >= 1.0 - tol) {
            if (f.axis >= 0) throw std::invalid_argument("point lies on a chart edge");
            f.axis = m;
            f.side = p.a[m] > 0 ? 1 : -1;
        }
    return f;
}

ChartPoint identify(const ChartPoint& p)
{
    const ChartFace f = face_of(p);
    if (f.axis < 0) throw std::invalid_argument("point is not on a chart face");
    const ChartFace g = partner(f);
    const auto L = local_axes(p.chart);
    const auto L2 = local_axes(g.chart);
    ChartPoint q{g.chart, {}};
    for (int m2 = 0; m2 < 3; ++m2) {
        if (m2 == g.axis) {
            q.a[m2] = g.side;
            continue;
        }
        int m = 0;
        while (L[m] != L2[m2]) ++m;
        q.a[m2] = p.a[m];
    }
    return q;
}

double singular_values(int id, const Eigen::Vector3d& a, double& smin, double& smax)
{
    // analytic Jacobian of a -> x
    const int c = axis(id);
    const auto L = local_axes(id);
    const Eigen::Vector3d& u = a;
    const double w = 1.0 / std::sqrt(1.0 + u.squaredNorm());
    Eigen::Matrix<double, 4, 3> J = Eigen::Matrix<double, 4, 3>::Zero();
    for (int m = 0; m < 3; ++m) {
        // d x_c / d u_m and d x_j / d u_m
        J(c, m) = -sign(id) * u[m] * w * w * w;
        for (int k = 0; k < 3; ++k) J(L[k], m) = ((k == m) ? w : 0.0) - u[k] * u[m] * w * w * w;
    }
    // singular values from the 3x3 Gram matrix (eigenvalues ascending)
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(J.transpose() * J);
    smin = std::sqrt(std::max(0.0, es.eigenvalues()[0]));
    smax = std::sqrt(es.eigenvalues()[2]);
    return smax / smin;
}

} // namespace chart

SphereNet::SphereNet()
{
    for (int k = 0; k < 8; ++k) label_[k] = chart_[k] = k;
}

SphereNet::SphereNet(const std::array<int, 8>& label_of_chart) : label_(label_of_chart)
{
    std::array<int, 8> seen{};
    for (int k = 0; k < 8; ++k) {
        if (label_[k] < 0 || label_[k] >= 8 || seen[label_[k]]++) throw std::invalid_argument("chart labels must be a permutation");
        chart_[label_[k]] = k;
    }
}

} // namespace vk
