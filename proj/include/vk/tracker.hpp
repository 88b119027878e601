#pragma once

// Vortex tracking on a recursively resampled Cartesian grid.
//
// The domain is a set of blocks of n0 x n1 x n2 base cells: one periodic block
// for the cube (the nodal cell of side pi), one open block for the oscillator
// (restricted to the cells meeting the truncation ball) and the eight charts of
// the 3-sphere net. Each base cell is the root of an octree. Phase windings are
// evaluated on every face; a leaf cell is split whenever its faces do not
// describe exactly one strand passing through it, and coarse faces must agree
// with the finer faces on their other side. When no leaf is ambiguous the
// piercings are joined cell by cell into curves.

#include "vk/basis.hpp"
#include "vk/curve.hpp"
#include "vk/sphere_net.hpp"

#include <Eigen/Core>

#include <array>
#include <functional>
#include <vector>

namespace vk {

enum class Boundary { Periodic, Open, SphereNet };

struct GridSpec {
    Eigen::Vector3d origin = Eigen::Vector3d::Zero(); // lattice corner; unused for the sphere net
    double spacing = 0.1;                             // base cell size in units of lambda
    Eigen::Vector3i dims = Eigen::Vector3i::Constant(10);
    Boundary boundary = Boundary::Open;
    int max_recursion_depth = 6;
    int refinement_factor = 2;
    double lambda = 1;            // physical length of lambda
    double clip_radius = 0;       // > 0: open boundary restricted to this ball, curves clipped on it
    int sign_twist = 1;           // periodic only: psi(r + side e_k) = sign_twist * psi(r)

    double cell() const { return spacing * lambda; }
    void validate() const;
};

// Grid for one eigenfunction. `truncation` is the oscillator cutoff in units
// of the classical radius. The origin is shifted by a seed-dependent
// sub-voxel offset so that no symmetry point lands on the lattice.
GridSpec default_grid(const ModeSpec& mode, double spacing, std::uint64_t seed, int max_depth = 6,
                      int refinement_factor = 2, double truncation = 2.0);

struct Piercing {
    int block = 0;
    int level = 0;
    Eigen::Vector3i cell = Eigen::Vector3i::Zero();
    int face = 0;    // 2*axis + (0 low | 1 high)
    int winding = 0; // outward
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
};

struct TraceStats {
    int max_level_used = 0;
    long refined_cells = 0;
    long leaves = 0;        // leaves carrying a strand
    long samples = 0;       // field evaluations
    long hidden_pairs = 0;  // faces split because of a winding-0 zero pair
    long coarse_fine_splits = 0;
    long small_loop_splits = 0; // cells split because of an edge-sized loop
};

int plaquette_winding(const std::array<double, 4>& phases);

// bilinear model of the field on a unit plaquette, corners in circulation
// order (0,0) (1,0) (1,1) (0,1); returns the zeros found inside [0,1]^2
std::vector<Eigen::Vector2d> bilinear_zeros(const std::array<cplx, 4>& corners);

std::vector<VortexCurve> trace(const RandomSuperposition& sup, const GridSpec& grid, TraceStats* stats = nullptr);

// Tracks an arbitrary field on a Euclidean box (open or periodic); used for
// analytic test fields.
std::vector<VortexCurve> trace_field(const std::function<cplx(const Eigen::Vector3d&)>& f, const GridSpec& grid,
                                     TraceStats* stats = nullptr);

// Segments of one loop, in order, each given in cell-local canonical
// coordinates inside [0, side]^3.
using Segment = std::pair<Eigen::Vector3d, Eigen::Vector3d>;
VortexCurve unwrap_periodic(const std::vector<Segment>& segments, double side, double lambda,
                            double tol = 1e-9);

struct ChartFragment {
    int chart = 0;       // chart label in the net
    Eigen::Matrix3Xd a;  // chart coordinates, one column per vertex
    bool closed = false;
};
std::vector<VortexCurve> stitch_sphere_net(const std::vector<ChartFragment>& fragments, const SphereNet& net,
                                           double lambda, double tol = 1e-9);

} // namespace vk
