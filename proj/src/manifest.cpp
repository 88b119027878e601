#include "io_util.hpp"
#include "vk/basis.hpp"

#include <ostream>

// Manifest layout:
//
//   # vk-manifest 1
//   system <cube|sphere|ho>
//   N <int>
//   seed <uint64>
//   degeneracy <int>
//   <l> <m> <n> <re> <im>      one row per basis label, in enumeration order
//
// Amplitudes are written in shortest round-trip form, so reading a manifest
// back reproduces the superposition bit for bit.

namespace vk {

static constexpr const char* kManifestHeader = "# vk-manifest 1";

void write_manifest(std::ostream& os, const RandomSuperposition& sup)
{
    os << kManifestHeader << '\n';
    os << "system " << to_string(sup.mode.system) << '\n';
    os << "N " << sup.mode.N << '\n';
    os << "seed " << sup.seed << '\n';
    os << "degeneracy " << sup.mode.degeneracy << '\n';
    for (std::size_t j = 0; j < sup.labels.size(); ++j) {
        const auto& b = sup.labels[j];
        os << b.l << ' ' << b.m << ' ' << b.n << ' ' << io::fmt(sup.amplitudes[j].real()) << ' '
           << io::fmt(sup.amplitudes[j].imag()) << '\n';
    }
}

RandomSuperposition read_manifest(std::istream& is)
{
    io::LineReader in(is);
    std::string line;
    if (!in.next(line) || line != kManifestHeader)
        throw FormatError("not a vk manifest (schema header missing or unsupported)", in.line());

    RandomSuperposition s;
    SystemKind system;
    int N;
    try {
        auto t = io::split_ws(in.expect_data("system"));
        system = parse_system(io::expect_key(t, "system", in.line()));
        t = io::split_ws(in.expect_data("N"));
        N = io::parse_int<int>(io::expect_key(t, "N", in.line()), in.line());
        t = io::split_ws(in.expect_data("seed"));
        s.seed = io::parse_int<std::uint64_t>(io::expect_key(t, "seed", in.line()), in.line());
        s.mode = mode_spec(system, N);
    }
    catch (const std::invalid_argument& e) {
        throw FormatError(e.what(), in.line());
    }
    auto t = io::split_ws(in.expect_data("degeneracy"));
    const int deg = io::parse_int<int>(io::expect_key(t, "degeneracy", in.line()), in.line());
    if (deg != s.mode.degeneracy) throw FormatError("degeneracy does not match the basis", in.line());

    const auto expected = enumerate_basis(system, N);
    for (int j = 0; j < deg; ++j) {
        t = io::split_ws(in.expect_data("label row"));
        if (t.size() != 5) throw FormatError("label row needs 5 fields", in.line());
        BasisLabel b{io::parse_int<int>(t[0], in.line()), io::parse_int<int>(t[1], in.line()),
                     io::parse_int<int>(t[2], in.line())};
        if (b != expected[j]) throw FormatError("basis label out of order or invalid", in.line());
        s.labels.push_back(b);
        s.amplitudes.emplace_back(io::parse_double(t[3], in.line()), io::parse_double(t[4], in.line()));
    }
    if (in.next_data(line)) throw FormatError("trailing data after label table", in.line());
    return s;
}

} // namespace vk
