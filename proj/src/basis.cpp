#include "vk/basis.hpp"
#include "vk/rng.hpp"
#include "vk/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vk {

namespace {
constexpr double pi = std::numbers::pi;

void require_N(SystemKind s, int N)
{
    if (s == SystemKind::PeriodicCube && N < 1)
        throw std::invalid_argument("periodic cube needs N >= 1");
    if (N < 0) throw std::invalid_argument("N must be non-negative");
    if (N > 200) throw std::invalid_argument("N too large");
}
} // namespace

std::string to_string(SystemKind s)
{
    switch (s) {
    case SystemKind::PeriodicCube: return "cube";
    case SystemKind::ThreeSphere: return "sphere";
    case SystemKind::Harmonic3D: return "ho";
    }
    return "?";
}

SystemKind parse_system(std::string_view name)
{
    if (name == "cube" || name == "PeriodicCube") return SystemKind::PeriodicCube;
    if (name == "sphere" || name == "ThreeSphere") return SystemKind::ThreeSphere;
    if (name == "ho" || name == "Harmonic3D") return SystemKind::Harmonic3D;
    throw std::invalid_argument("unknown system '" + std::string(name) + "'");
}

ModeSpec mode_spec(SystemKind system, int N)
{
    require_N(system, N);
    ModeSpec m;
    m.system = system;
    m.N = N;
    switch (system) {
    case SystemKind::PeriodicCube:
        m.energy = 3.0 * N * N;
        m.degeneracy = static_cast<int>(enumerate_basis(system, N).size());
        m.wavelength = 2 * pi / std::sqrt(m.energy);
        break;
    case SystemKind::ThreeSphere:
        m.energy = double(N) * (N + 2);
        m.degeneracy = (N + 1) * (N + 1);
        // N = 0 is a constant field with no lines; any positive scale will do
        m.wavelength = N == 0 ? 2 * pi : 2 * pi / std::sqrt(m.energy);
        break;
    case SystemKind::Harmonic3D:
        m.energy = N + 1.5;
        m.degeneracy = (N + 1) * (N + 2) / 2;
        m.wavelength = 2 * pi / std::sqrt(2 * m.energy);
        break;
    }
    return m;
}

std::vector<BasisLabel> enumerate_basis(SystemKind system, int N)
{
    require_N(system, N);
    std::vector<BasisLabel> out;
    switch (system) {
    case SystemKind::PeriodicCube: {
        const int target = 3 * N * N;
        const int k = static_cast<int>(std::floor(std::sqrt(double(target))));
        for (int l = -k; l <= k; ++l)
            for (int m = -k; m <= k; ++m)
                for (int n = -k; n <= k; ++n) {
                    if (l * l + m * m + n * n != target) continue;
                    // 3N^2 forces a common parity; the check documents it
                    if (((l ^ m) & 1) || ((m ^ n) & 1)) continue;
                    out.push_back({l, m, n});
                }
        break;
    }
    case SystemKind::ThreeSphere:
        for (int l = 0; l <= N; ++l)
            for (int m = -l; m <= l; ++m) out.push_back({l, m, 0});
        break;
    case SystemKind::Harmonic3D:
        for (int l = 0; l <= N; ++l)
            for (int m = 0; l + m <= N; ++m) out.push_back({l, m, N - l - m});
        break;
    }
    return out;
}

RandomSuperposition draw_superposition(const ModeSpec& mode, std::uint64_t seed)
{
    RandomSuperposition s;
    s.mode = mode_spec(mode.system, mode.N);
    s.labels = enumerate_basis(mode.system, mode.N);
    s.seed = seed;
    SplitMix64 rng(seed);
    s.amplitudes.reserve(s.labels.size());
    for (std::size_t j = 0; j < s.labels.size(); ++j) s.amplitudes.push_back(complex_gaussian(rng));
    return s;
}

void check_angles(const DomainPoint& a)
{
    if (!(a[0] >= 0 && a[0] <= pi) || !(a[1] >= 0 && a[1] <= pi) || !(a[2] >= 0 && a[2] <= 2 * pi))
        throw std::invalid_argument("3-sphere angles out of range");
}

Eigen::Vector4d angles_to_embedding(const DomainPoint& a)
{
    const double sc = std::sin(a[0]);
    return {std::cos(a[0]), sc * std::sin(a[1]) * std::cos(a[2]), sc * std::sin(a[1]) * std::sin(a[2]),
            sc * std::cos(a[1])};
}

DomainPoint embedding_to_angles(const Eigen::Vector4d& x)
{
    const double rho = std::hypot(x[1], x[2], x[3]);
    const double chi = std::atan2(rho, x[0]);
    const double theta = std::atan2(std::hypot(x[1], x[2]), x[3]);
    double phi = std::atan2(x[2], x[1]);
    if (phi < 0) phi += 2 * pi;
    if (phi >= 2 * pi) phi = 0;
    return {chi, theta, phi};
}

Field::Field(const RandomSuperposition& sup)
    : mode_(sup.mode), labels_(sup.labels), amps_(sup.amplitudes)
{
    if (labels_.size() != amps_.size()) throw std::invalid_argument("label/amplitude size mismatch");
    if (mode_.system == SystemKind::PeriodicCube) {
        for (const auto& b : labels_) kmax_ = std::max({kmax_, std::abs(b.l), std::abs(b.m), std::abs(b.n)});
    }
    else if (mode_.system == SystemKind::ThreeSphere) {
        const int N = mode_.N;
        sphere_coef_.assign((N + 1) * (N + 1), cplx(0));
        for (std::size_t j = 0; j < labels_.size(); ++j) {
            const auto& b = labels_[j];
            sphere_coef_[b.l * b.l + b.l + b.m] += amps_[j] * hyperspherical_norm(N, b.l);
        }
    }
}

cplx Field::operator()(const Eigen::Vector3d& p) const
{
    switch (mode_.system) {
    case SystemKind::PeriodicCube: return cube(p);
    case SystemKind::Harmonic3D: return oscillator(p);
    case SystemKind::ThreeSphere: check_angles(p); return at_embedding(angles_to_embedding(p));
    }
    return {};
}

cplx Field::cube(const Eigen::Vector3d& p) const
{
    const int K = kmax_;
    cplx e[3][64];
    if (K >= 31) throw std::invalid_argument("cube N too large for evaluator");
    for (int a = 0; a < 3; ++a) {
        const cplx u = std::polar(1.0, p[a]);
        cplx* row = e[a] + K; // row[k] = exp(i k p_a), k in [-K, K]
        row[0] = 1;
        for (int k = 1; k <= K; ++k) {
            row[k] = row[k - 1] * u;
            row[-k] = std::conj(row[k]);
        }
    }
    cplx s = 0;
    for (std::size_t j = 0; j < labels_.size(); ++j) {
        const auto& b = labels_[j];
        s += amps_[j] * (e[0][K + b.l] * e[1][K + b.m] * e[2][K + b.n]);
    }
    return s;
}

cplx Field::oscillator(const Eigen::Vector3d& p) const
{
    const int N = mode_.N;
    double hx[64], hy[64], hz[64];
    if (N >= 63) throw std::invalid_argument("oscillator N too large for evaluator");
    hermite_polynomial_part(N, p[0], hx);
    hermite_polynomial_part(N, p[1], hy);
    hermite_polynomial_part(N, p[2], hz);
    cplx s = 0;
    for (std::size_t j = 0; j < labels_.size(); ++j) {
        const auto& b = labels_[j];
        s += amps_[j] * (hx[b.l] * hy[b.m] * hz[b.n]);
    }
    return s * std::exp(-0.5 * p.squaredNorm());
}

cplx Field::at_embedding(const Eigen::Vector4d& x) const
{
    if (mode_.system != SystemKind::ThreeSphere) throw std::logic_error("at_embedding on a flat system");
    const int N = mode_.N;
    std::vector<cplx> Q((N + 1) * (N + 2) / 2);
    solid_harmonics(N, x[1], x[2], x[3], Q.data());
    cplx s = 0;
    for (int l = 0; l <= N; ++l) {
        const double c = gegenbauer(N - l, double(l + 1), x[0]);
        cplx t = sphere_coef_[l * l + l] * Q[l * (l + 1) / 2];
        for (int m = 1; m <= l; ++m) {
            const cplx q = Q[l * (l + 1) / 2 + m];
            const cplx qneg = (m & 1 ? -1.0 : 1.0) * std::conj(q);
            t += sphere_coef_[l * l + l + m] * q + sphere_coef_[l * l + l - m] * qneg;
        }
        s += c * t;
    }
    return s;
}

cplx evaluate(const RandomSuperposition& sup, const DomainPoint& p) { return Field(sup)(p); }

cplx hyperspherical_harmonic(int N, int l, int m, const Eigen::Vector4d& x)
{
    if (N < 0 || l < 0 || l > N || std::abs(m) > l) throw std::invalid_argument("hyperspherical index out of range");
    std::vector<cplx> Q((l + 1) * (l + 2) / 2);
    solid_harmonics(l, x[1], x[2], x[3], Q.data());
    cplx q = Q[l * (l + 1) / 2 + std::abs(m)];
    if (m < 0) q = (m & 1 ? -1.0 : 1.0) * std::conj(q);
    return hyperspherical_norm(N, l) * gegenbauer(N - l, double(l + 1), x[0]) * q;
}

cplx hyperspherical_harmonic(int N, int l, int m, const DomainPoint& angles)
{
    check_angles(angles);
    return hyperspherical_harmonic(N, l, m, angles_to_embedding(angles));
}

double hermite_mode(int l, int m, int n, const DomainPoint& p)
{
    if (l < 0 || m < 0 || n < 0) throw std::invalid_argument("negative oscillator quantum number");
    const int k = std::max({l, m, n});
    std::vector<double> hx(k + 1), hy(k + 1), hz(k + 1);
    hermite_polynomial_part(k, p[0], hx.data());
    hermite_polynomial_part(k, p[1], hy.data());
    hermite_polynomial_part(k, p[2], hz.data());
    return hx[l] * hy[m] * hz[n] * std::exp(-0.5 * p.squaredNorm());
}

} // namespace vk
