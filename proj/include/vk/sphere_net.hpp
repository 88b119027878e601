#pragma once

// Net of eight cubic charts covering the unit 3-sphere.
//
// Chart (c, s), c in 0..3, s = +-1, covers the region where |x_c| is the largest
// embedding coordinate and sign(x_c) = s. Its local coordinates a in [-1,1]^3
// run along the remaining three axes in increasing order. The map is the
// central projection x_c = s w, x_j = a_j w with w = 1/sqrt(1 + |a|^2); at any
// point, lengths along different directions differ by at most a factor of 2
// (attained at the chart corners).
// Chart ids are 2c + (s > 0).

#include <Eigen/Core>

#include <array>

namespace vk {

struct ChartPoint {
    int chart = 0;
    Eigen::Vector3d a = Eigen::Vector3d::Zero();
};

struct ChartFace {
    int chart = 0;
    int axis = 0; // local axis 0..2
    int side = 1; // -1 or +1
    friend bool operator==(const ChartFace&, const ChartFace&) = default;
};

namespace chart {
constexpr int count = 8;
inline int axis(int id) { return id >> 1; }
inline int sign(int id) { return (id & 1) ? 1 : -1; }
inline int id(int axis, int sign) { return 2 * axis + (sign > 0 ? 1 : 0); }
std::array<int, 3> local_axes(int id);
// orientation of the chart map relative to the standard orientation of S^3
int parity(int id);

Eigen::Vector4d to_embedding(int id, const Eigen::Vector3d& a);
Eigen::Vector3d from_embedding(int id, const Eigen::Vector4d& x);
ChartPoint locate(const Eigen::Vector4d& x); // chart with the dominant coordinate

ChartFace partner(const ChartFace& f);
// A point on exactly one face of its chart, expressed in the partner chart.
ChartPoint identify(const ChartPoint& p);
// Which face the point lies on (|a_k| == 1); axis = -1 if none.
ChartFace face_of(const ChartPoint& p, double tol = 0);

// ratio of largest to smallest singular value of d x / d a, over the pair of points
double singular_values(int id, const Eigen::Vector3d& a, double& smin, double& smax);
} // namespace chart

// The net as a labelled object: labels let callers renumber the charts.
class SphereNet {
public:
    SphereNet();
    explicit SphereNet(const std::array<int, 8>& label_of_chart);

    int label(int chart_id) const { return label_[chart_id]; }
    int chart_id(int label) const { return chart_[label]; }

private:
    std::array<int, 8> label_{}, chart_{};
};

} // namespace vk
