#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace vk {

using cplx = std::complex<double>;

enum class SystemKind { PeriodicCube, ThreeSphere, Harmonic3D };

std::string to_string(SystemKind s);
SystemKind parse_system(std::string_view name); // accepts "cube", "sphere", "ho" and the enum names

struct ModeSpec {
    SystemKind system = SystemKind::PeriodicCube;
    int N = 1;
    double energy = 0;  // 3N^2, N(N+2) or N+3/2 in the system's natural units
    int degeneracy = 0;
    double wavelength = 0; // reference lambda
};

// (l,m,n) for the cube and the oscillator; (l,m) for the 3-sphere with n = 0.
struct BasisLabel {
    int l = 0, m = 0, n = 0;
    friend bool operator==(const BasisLabel&, const BasisLabel&) = default;
    friend auto operator<=>(const BasisLabel&, const BasisLabel&) = default;
};

struct RandomSuperposition {
    ModeSpec mode;
    std::vector<BasisLabel> labels;
    std::vector<cplx> amplitudes;
    std::uint64_t seed = 0;
};

// Domain points are native coordinate triples: (x,y,z) for the cube and the
// oscillator, (chi,theta,phi) for the 3-sphere.
using DomainPoint = Eigen::Vector3d;

ModeSpec mode_spec(SystemKind system, int N);
std::vector<BasisLabel> enumerate_basis(SystemKind system, int N);
RandomSuperposition draw_superposition(const ModeSpec& mode, std::uint64_t seed);

cplx evaluate(const RandomSuperposition& sup, const DomainPoint& p);

// Normalised hyperspherical harmonic; the vector overload takes a unit 4-vector
// (cos chi, sin chi sin theta cos phi, sin chi sin theta sin phi, sin chi cos theta).
cplx hyperspherical_harmonic(int N, int l, int m, const DomainPoint& angles);
cplx hyperspherical_harmonic(int N, int l, int m, const Eigen::Vector4d& x);

// Cartesian oscillator eigenfunction psi_l(x) psi_m(y) psi_n(z).
double hermite_mode(int l, int m, int n, const DomainPoint& p);

// 3-sphere coordinate helpers.
Eigen::Vector4d angles_to_embedding(const DomainPoint& angles);
DomainPoint embedding_to_angles(const Eigen::Vector4d& x);
void check_angles(const DomainPoint& angles);

// Fast repeated evaluation of one superposition. Values agree bit-for-bit with
// evaluate(); instances are immutable and may be shared between threads.
class Field {
public:
    explicit Field(const RandomSuperposition& sup);

    const ModeSpec& mode() const { return mode_; }
    cplx operator()(const Eigen::Vector3d& p) const; // native coordinates
    cplx at_embedding(const Eigen::Vector4d& x) const; // 3-sphere only

private:
    cplx cube(const Eigen::Vector3d& p) const;
    cplx oscillator(const Eigen::Vector3d& p) const;

    ModeSpec mode_;
    std::vector<BasisLabel> labels_;
    std::vector<cplx> amps_;
    std::vector<cplx> sphere_coef_; // per (l, m) with the normalisation folded in
    int kmax_ = 0;
};

// Manifest: a line-oriented, versioned description of one superposition.
void write_manifest(std::ostream& os, const RandomSuperposition& sup);
RandomSuperposition read_manifest(std::istream& is);

} // namespace vk
