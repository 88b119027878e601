#include "vk/curve.hpp"
#include "vk/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vk {

std::vector<Eigen::Vector4d> sphere_points(const VortexCurve& c)
{
    std::vector<Eigen::Vector4d> x(c.vertices.cols());
    for (Eigen::Index k = 0; k < c.vertices.cols(); ++k) x[k] = angles_to_embedding(c.vertices.col(k));
    return x;
}

Eigen::Matrix3Xd stereographic(const std::vector<Eigen::Vector4d>& x, const Eigen::Vector4d& pole)
{
    const Eigen::Vector4d p = pole.normalized();
    // orthonormal basis whose first vector is +-p; the other three span the tangent space
    Eigen::Matrix4d Q = Eigen::HouseholderQR<Eigen::Matrix<double, 4, 1>>(p).householderQ();
    // fix the handedness so that chirality does not depend on the pole:
    // det[p, q1, q2, q3] = -1, which gives (x1, x2, x3) / (1 + x0) for p = -e0
    Q.col(0) = p;
    if (Q.determinant() > 0) Q.col(3) = -Q.col(3);
    Eigen::Matrix3Xd y(3, x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = 1.0 - x[k].dot(p);
        for (int a = 0; a < 3; ++a) y(a, k) = x[k].dot(Q.col(a + 1)) / d;
    }
    return y;
}

Eigen::Vector4d far_pole(const std::vector<std::vector<Eigen::Vector4d>>& curves)
{
    SplitMix64 rng(0x706f6c65ull);
    Eigen::Vector4d best(-1, 0, 0, 0);
    double best_d = -1;
    for (int t = 0; t < 256; ++t) {
        Eigen::Vector4d q;
        for (int a = 0; a < 4; a += 2) {
            const cplx z = complex_gaussian(rng);
            q[a] = z.real();
            q[a + 1] = z.imag();
        }
        q.normalize();
        double dmax = -2; // largest cosine = closest point
        for (const auto& c : curves)
            for (const auto& x : c) dmax = std::max(dmax, x.dot(q));
        const double d = 1 - dmax;
        if (d > best_d) {
            best_d = d;
            best = q;
        }
    }
    return best;
}

void set_pole(std::vector<VortexCurve>& curves, const Eigen::Vector4d& pole)
{
    for (auto& c : curves) {
        if (c.system != SystemKind::ThreeSphere) continue;
        c.pole = pole;
        c.embedding = stereographic(sphere_points(c), pole);
    }
}

VortexCurve make_curve(SystemKind system, Eigen::Matrix3Xd vertices, bool closed, double lambda)
{
    VortexCurve c;
    c.system = system;
    c.vertices = std::move(vertices);
    c.closed = closed;
    c.lambda = lambda;
    if (closed && c.vertices.cols() > 0) c.vertices.col(c.vertices.cols() - 1) = c.vertices.col(0);
    if (system == SystemKind::ThreeSphere) c.embedding = stereographic(sphere_points(c), c.pole);
    else c.embedding = c.vertices;
    c.arclength_lambda = arclength(c);
    return c;
}

VortexCurve make_sphere_curve(const std::vector<Eigen::Vector4d>& points, bool closed, double lambda,
                              const Eigen::Vector4d& pole)
{
    VortexCurve c;
    c.system = SystemKind::ThreeSphere;
    c.closed = closed;
    c.lambda = lambda;
    c.pole = pole;
    c.vertices.resize(3, points.size());
    for (std::size_t k = 0; k < points.size(); ++k) c.vertices.col(k) = embedding_to_angles(points[k].normalized());
    if (closed && !points.empty()) c.vertices.col(points.size() - 1) = c.vertices.col(0);
    c.embedding = stereographic(sphere_points(c), pole);
    c.arclength_lambda = arclength(c);
    return c;
}

double arclength(const VortexCurve& c)
{
    double s = 0;
    if (c.system == SystemKind::ThreeSphere) {
        const auto x = sphere_points(c);
        for (std::size_t k = 1; k < x.size(); ++k) s += 2 * std::asin(std::min(1.0, 0.5 * (x[k] - x[k - 1]).norm()));
    }
    else {
        for (Eigen::Index k = 1; k < c.vertices.cols(); ++k) s += (c.vertices.col(k) - c.vertices.col(k - 1)).norm();
    }
    return s / c.lambda;
}

double arclength_classical(const VortexCurve& c)
{
    if (c.system != SystemKind::Harmonic3D) return arclength(c);
    const double R = c.classical_radius;
    double s = 0;
    for (Eigen::Index k = 1; k < c.vertices.cols(); ++k) {
        const Eigen::Vector3d p = c.vertices.col(k - 1), d = c.vertices.col(k) - p;
        const double a = d.squaredNorm();
        if (a == 0) continue;
        const double b = 2 * p.dot(d), q = p.squaredNorm() - R * R;
        const double disc = b * b - 4 * a * q;
        if (disc <= 0) continue;
        const double t0 = std::max(0.0, (-b - std::sqrt(disc)) / (2 * a));
        const double t1 = std::min(1.0, (-b + std::sqrt(disc)) / (2 * a));
        if (t1 > t0) s += (t1 - t0) * std::sqrt(a);
    }
    return s / c.lambda;
}

double radius_of_gyration(const VortexCurve& c)
{
    // exact moments of the uniform measure on the polyline; the 3-sphere uses
    // its embedding in R^4
    Eigen::MatrixXd P;
    if (c.system == SystemKind::ThreeSphere) {
        const auto x = sphere_points(c);
        P.resize(4, x.size());
        for (std::size_t k = 0; k < x.size(); ++k) P.col(k) = x[k];
    }
    else P = c.vertices;
    const Eigen::Index n = P.cols();
    if (n < 2) return 0;
    double L = 0;
    Eigen::VectorXd centre = Eigen::VectorXd::Zero(P.rows());
    for (Eigen::Index k = 1; k < n; ++k) {
        const double l = (P.col(k) - P.col(k - 1)).norm();
        L += l;
        centre += l * 0.5 * (P.col(k) + P.col(k - 1));
    }
    if (L == 0) return 0;
    centre /= L;
    double m2 = 0;
    for (Eigen::Index k = 1; k < n; ++k) {
        const Eigen::VectorXd a = P.col(k - 1) - centre, d = P.col(k) - P.col(k - 1);
        m2 += d.norm() * (a.squaredNorm() + a.dot(d) + d.squaredNorm() / 3);
    }
    return std::sqrt(std::max(0.0, m2 / L)) / c.lambda;
}

bool ends_on_truncation_sphere(const VortexCurve& c, double rel_tol)
{
    if (c.system != SystemKind::Harmonic3D || c.closed || c.truncation_radius <= 0 || c.vertices.cols() < 2) return false;
    const double R = c.truncation_radius;
    return std::abs(c.vertices.col(0).norm() - R) <= rel_tol * R &&
           std::abs(c.vertices.col(c.vertices.cols() - 1).norm() - R) <= rel_tol * R;
}

bool eligible_for_knotting(const VortexCurve& c)
{
    if (c.closed) return c.homology.isZero() && c.vertices.cols() >= 4;
    return ends_on_truncation_sphere(c);
}

VortexCurve close_open_curve(const VortexCurve& c)
{
    if (c.system != SystemKind::Harmonic3D || c.closed) throw std::invalid_argument("close_open_curve needs an open oscillator curve");
    if (!ends_on_truncation_sphere(c)) throw std::invalid_argument("curve endpoints are not on the truncation sphere");
    const double R = c.truncation_radius;
    const double rho = std::max(3 * c.classical_radius, 1.5 * R);
    const Eigen::Index n = c.vertices.cols();
    const Eigen::Vector3d u = c.vertices.col(n - 1).normalized(), s = c.vertices.col(0).normalized();
    Eigen::Vector3d v = s - s.dot(u) * u;
    if (v.norm() < 1e-9) {
        // antipodal or coincident ends: any plane through u will do
        Eigen::Index k;
        u.cwiseAbs().minCoeff(&k);
        v = Eigen::Vector3d::Unit(k) - u[k] * u;
    }
    v.normalize();
    const double theta = std::atan2(s.dot(v), s.dot(u));
    const int steps = std::max(2, int(std::ceil(std::abs(theta) / (std::numbers::pi / 32))));
    Eigen::Matrix3Xd out(3, n + steps + 2);
    out.leftCols(n) = c.vertices;
    Eigen::Index k = n;
    for (int j = 0; j <= steps; ++j) {
        const double phi = theta * j / steps;
        out.col(k++) = rho * (std::cos(phi) * u + std::sin(phi) * v);
    }
    out.col(k++) = c.vertices.col(0);
    VortexCurve r = make_curve(SystemKind::Harmonic3D, out, true, c.lambda);
    r.id = c.id;
    r.truncation_radius = c.truncation_radius;
    r.classical_radius = c.classical_radius;
    return r;
}

Eigen::Matrix3Xd analysis_polyline(const VortexCurve& c)
{
    if (c.closed) {
        if (!c.homology.isZero()) throw std::invalid_argument("curve with non-trivial homology has no knot type");
        return c.embedding;
    }
    return close_open_curve(c).embedding;
}

VortexCurve mirror(const VortexCurve& c)
{
    VortexCurve m = c;
    if (c.system == SystemKind::ThreeSphere) {
        // reflect x3 in the embedding: theta -> pi - theta
        for (Eigen::Index k = 0; k < m.vertices.cols(); ++k) m.vertices(1, k) = std::numbers::pi - m.vertices(1, k);
        m.pole[3] = -m.pole[3];
        m.embedding = stereographic(sphere_points(m), m.pole);
    }
    else {
        m.vertices.row(2) *= -1;
        m.embedding.row(2) *= -1;
        m.homology[2] = -m.homology[2];
    }
    return m;
}

} // namespace vk
