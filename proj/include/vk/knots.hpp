#pragma once

// Planar crossing diagrams of closed polylines and the invariants computed
// from them: Alexander magnitudes at t = -1, exp(2 pi i/3), i and the
// Vassiliev invariants v2, v3 (Gauss-diagram formulas).

#include "vk/curve.hpp"
#include "vk/exact.hpp"

#include <Eigen/Core>

#include <map>
#include <string>
#include <vector>

namespace vk {

// One passage of the curve through a crossing.
struct Passage {
    int crossing = 0;
    bool over = false;
    int sign = 1;
    bool operator==(const Passage&) const = default;
};

// Crossings in the order met along the curve, from an arbitrary basepoint.
struct KnotDiagram {
    std::vector<Passage> passages;
    Eigen::Vector3d direction = Eigen::Vector3d::UnitZ();

    int crossings() const { return int(passages.size() / 2); }
    void validate() const; // throws std::invalid_argument
};

// Diagram of a closed polyline (first vertex repeated at the end) seen from
// +direction. Throws DegenerateProjection on tangencies, overlaps, vertices on
// other segments, triple points or crossings of equal depth.
KnotDiagram project(const Eigen::Matrix3Xd& closed_polyline, const Eigen::Vector3d& direction);

// Reidemeister I and II eliminations to a fixed point.
KnotDiagram reduce(const KnotDiagram& d);
// Mirror image: crossing signs and over/under flags flipped.
KnotDiagram mirror(const KnotDiagram& d);
// Connected sum by concatenation of Gauss codes.
KnotDiagram connect(const KnotDiagram& a, const KnotDiagram& b);
// Cyclic shift of the basepoint.
KnotDiagram rotate(const KnotDiagram& d, int shift);

// "1O+ 2U+ 3O+ 1U+ 2O+ 3U+" (crossing label, O/U, sign); labels are renumbered
// from 0 in order of first appearance.
KnotDiagram parse_gauss(const std::string& code);
std::string format_gauss(const KnotDiagram& d);

enum class Root { MinusOne, Omega, I };

// Alexander matrix with the last row and column deleted
RingMatrix alexander_matrix(const KnotDiagram& d, Root root);
// |Delta(-1)| for MinusOne, |Delta(t)|^2 otherwise
BigInt alexander_magnitude(const KnotDiagram& d, Root root);

std::int64_t vassiliev_v2(const KnotDiagram& d);
std::int64_t vassiliev_v3(const KnotDiagram& d);

struct InvariantSet {
    BigInt det = 1;
    BigInt a3 = 1;
    BigInt a4 = 1;
    std::int64_t v2 = 0;
    std::int64_t v3 = 0;

    bool operator==(const InvariantSet&) const = default;
    auto operator<=>(const InvariantSet& o) const
    {
        if (det != o.det) return det < o.det ? std::strong_ordering::less : std::strong_ordering::greater;
        if (a3 != o.a3) return a3 < o.a3 ? std::strong_ordering::less : std::strong_ordering::greater;
        if (a4 != o.a4) return a4 < o.a4 ? std::strong_ordering::less : std::strong_ordering::greater;
        if (v2 != o.v2) return v2 <=> o.v2;
        return v3 <=> o.v3;
    }
    bool is_unknot() const { return det == 1 && a3 == 1 && a4 == 1 && v2 == 0 && v3 == 0; }
    bool knotted() const { return !is_unknot(); }
    std::string str() const; // "(det,a3,a4,v2,v3)"
};

InvariantSet invariants(const KnotDiagram& d); // reduces first

struct RobustResult {
    InvariantSet inv;
    int retries = 0; // degenerate directions skipped
    int crossings = 0; // reduced crossing count of the first direction
};

// Invariants from `agree` independent projection directions (default 2) which
// must coincide. Directions come from a low-discrepancy sequence seeded by
// `seed`. Throws PersistentDegeneracy after `max_retries` degenerate
// directions and InvariantDisagreement on a mismatch.
RobustResult robust_invariants(const Eigen::Matrix3Xd& closed_polyline, std::uint64_t seed, int max_retries = 10,
                               int agree = 2);
RobustResult robust_invariants(const VortexCurve& c, int max_retries = 10);

// Lookup table of prime knots up to 10 crossings (both chiralities) and
// composites up to 8 crossings.
struct KnotId {
    std::string name = "unidentified";
    std::vector<std::string> candidates;
    bool composite = false;
    std::string basis = "det,a3,a4,v2,v3"; // invariants used for the match
};

struct KnotTableEntry {
    std::string name;
    int crossings = 0;
    bool composite = false;
    InvariantSet inv;
};

class KnotTable {
public:
    KnotTable() = default;
    explicit KnotTable(std::vector<KnotTableEntry> entries);

    static KnotTable load(const std::string& csv_path);
    static const KnotTable& bundled(); // data/knot_table.csv
    // Builds the table from "name | crossings | gauss | ..." reference lines.
    static KnotTable generate(const std::string& codes_path);
    void write_csv(std::ostream& os) const;

    KnotId classify(const InvariantSet& inv) const;
    const std::vector<KnotTableEntry>& entries() const { return entries_; }

private:
    std::vector<KnotTableEntry> entries_;
    std::multimap<InvariantSet, std::size_t> index_;
};

// name -> Gauss code of the reference diagrams (data/knot_codes.txt)
std::map<std::string, std::string> load_knot_codes(const std::string& path);
std::string data_path(const std::string& file);

} // namespace vk
