#pragma once

#include "vk/basis.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vk {

// An oriented piecewise-linear vortex line.
//
// `vertices` holds system-native coordinates: (x,y,z) for the cube (unwrapped
// across periodic copies) and the oscillator, (chi,theta,phi) for the
// 3-sphere. `embedding` is the Euclidean picture used by the knot machinery;
// it equals `vertices` except on the 3-sphere, where it is a stereographic
// image. Closed curves repeat their first vertex at the end.
struct VortexCurve {
    int id = 0;
    SystemKind system = SystemKind::PeriodicCube;
    Eigen::Matrix3Xd vertices;
    Eigen::Matrix3Xd embedding;
    bool closed = false;
    Eigen::Vector3i homology = Eigen::Vector3i::Zero();
    double lambda = 1;            // length of one reference wavelength
    double arclength_lambda = 0;
    double truncation_radius = 0; // oscillator only
    double classical_radius = 0;  // oscillator only
    Eigen::Vector4d pole = Eigen::Vector4d(-1, 0, 0, 0); // 3-sphere stereographic pole

    Eigen::Index size() const { return vertices.cols(); }
};

// Constructors that fill the derived fields (embedding, arclength).
VortexCurve make_curve(SystemKind system, Eigen::Matrix3Xd vertices, bool closed, double lambda);
VortexCurve make_sphere_curve(const std::vector<Eigen::Vector4d>& points, bool closed, double lambda,
                              const Eigen::Vector4d& pole);

// 3-sphere helpers
std::vector<Eigen::Vector4d> sphere_points(const VortexCurve& c);
Eigen::Matrix3Xd stereographic(const std::vector<Eigen::Vector4d>& x, const Eigen::Vector4d& pole);
// point of S^3 far from every given point; deterministic
Eigen::Vector4d far_pole(const std::vector<std::vector<Eigen::Vector4d>>& curves);
// re-embed a set of 3-sphere curves from a common pole
void set_pole(std::vector<VortexCurve>& curves, const Eigen::Vector4d& pole);

// Length in units of lambda. On the 3-sphere consecutive vertices are joined by
// great-circle arcs.
double arclength(const VortexCurve& c);
// Oscillator: length inside the classical ball r <= sqrt(2E).
double arclength_classical(const VortexCurve& c);
double radius_of_gyration(const VortexCurve& c);

bool eligible_for_knotting(const VortexCurve& c);
bool ends_on_truncation_sphere(const VortexCurve& c, double rel_tol = 1e-9);

// Closes an open oscillator curve outside the truncation sphere: radial legs
// out to 3x the classical radius joined by a great-circle arc on that sphere.
VortexCurve close_open_curve(const VortexCurve& c);

// Euclidean closed polyline used for knot analysis (closure applied to open
// oscillator curves).
Eigen::Matrix3Xd analysis_polyline(const VortexCurve& c);

// Topology-preserving simplification by triangle elision. A vertex is removed
// only if the triangle (prev, v, next) meets no other segment of the curve or
// of `obstacles` (a read-only snapshot of the rest of the tangle, in the same
// Euclidean embedding). Runs to a fixed point.
VortexCurve simplify(const VortexCurve& c, const std::vector<Eigen::Matrix3Xd>& obstacles = {});

// Mirror image (negate the last embedding coordinate / native z).
VortexCurve mirror(const VortexCurve& c);

// Curve file: header, then one record per curve, optionally followed by a
// simplified block for that curve.
struct CurveFileHeader {
    SystemKind system = SystemKind::PeriodicCube;
    int N = 0;
    std::uint64_t seed = 0;
    double spacing = 0;
    int depth_used = 0;
    double lambda = 1;
    double truncation_radius = 0;
    double classical_radius = 0;
    Eigen::Vector4d pole = Eigen::Vector4d(-1, 0, 0, 0);
};

struct CurveRecord {
    VortexCurve curve;
    std::optional<Eigen::Matrix3Xd> simplified; // native coordinates
};

void write_curves(std::ostream& os, const CurveFileHeader& h, const std::vector<CurveRecord>& curves);
std::vector<CurveRecord> read_curves(std::istream& is, CurveFileHeader& h);

} // namespace vk
