#pragma once

// Per-eigenfunction analysis records and the aggregate statistics built from
// them: unknot probability against length with an exponential fit, the
// complexity histogram, knotting probability against energy and symmetry
// audits of single tangles.

#include "vk/basis.hpp"
#include "vk/curve.hpp"
#include "vk/knots.hpp"

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace vk {

// One row of an analysis file.
struct CurveRow {
    int id = 0;
    double length = 0;           // lambda
    double length_classical = 0; // oscillator: inside the classical ball; otherwise = length
    bool closed = true;
    Eigen::Vector3i homology = Eigen::Vector3i::Zero();
    bool eligible = true;
    bool passes_origin = false;
    int partner = -1; // antipodal image, -1 if none or not applicable
    std::optional<InvariantSet> inv;
    std::string knot;                    // table name, "unidentified" or empty
    std::vector<std::string> candidates; // ambiguous table matches
    int retries = 0;
    std::string status = "ok"; // ok | ineligible | error class name

    // det > 1 or v2 != 0 or v3 != 0; false without invariants
    bool knotted() const;
    bool analyzed() const { return inv.has_value(); }
};

struct TangleRecord {
    SystemKind system = SystemKind::PeriodicCube;
    int N = 0;
    std::uint64_t seed = 0;
    double energy = 0;
    double lambda = 1;
    double spacing = 0.1;
    std::vector<CurveRow> rows;

    bool any_knotted() const; // over eligible, analyzed rows
    double total_length() const;
    double total_length_classical() const;
};

void write_analysis(std::ostream& os, const TangleRecord& r);
TangleRecord read_analysis(std::istream& is); // throws FormatError

// ---- unknot probability -------------------------------------------------

struct BinOptions {
    int bins_per_decade = 8;
    int min_count = 10; // curves per bin for a bin to enter the fit
    // fit window in lambda; unset = upper half of the populated bins
    std::optional<double> fit_min;
    std::optional<double> fit_max;
};

struct UnknotBin {
    double lo = 0, hi = 0;
    double mean_length = 0;
    long curves = 0;
    int eigenfunctions = 0; // with at least one curve in the bin
    double p = 0;
    double stderr_ = 0; // over eigenfunctions
    bool in_fit = false;
};

struct FitResult {
    bool ok = false;
    double L0 = std::numeric_limits<double>::infinity();
    double L0_stderr = 0;
    double slope = 0, slope_stderr = 0;
    double intercept = 0, intercept_stderr = 0;
    double L_min = 0, L_max = 0;
    std::vector<long> counts; // curves per fitted bin
};

struct UnknotTable {
    std::vector<UnknotBin> bins;
    FitResult fit;
};

// Eligible, analyzed curves only. P per bin is the mean over eigenfunctions of
// the per-eigenfunction unknotted fraction; ln P is fitted against the mean
// bin length by weighted least squares.
UnknotTable unknot_probability(const std::vector<TangleRecord>& records, const BinOptions& opt = {});

// ---- complexity histogram -----------------------------------------------

double log10_log10(const BigInt& det); // det > 1

struct ComplexityCell {
    BigInt det;
    double y = 0; // log10(log10 det)
    double x_lo = 0, x_hi = 0; // log10 L
    long count = 0;
};

struct ComplexityHistogram {
    std::vector<ComplexityCell> cells; // sorted by (det, x)
    std::vector<std::pair<std::string, double>> markers;
};

ComplexityHistogram complexity_histogram(const std::vector<TangleRecord>& records, int bins_per_decade = 8);

// ---- knotting probability against energy ---------------------------------

struct KnottingRow {
    SystemKind system = SystemKind::PeriodicCube;
    int N = 0;
    double energy = 0;
    int eigenfunctions = 0;
    int knotted = 0;
    double p = 0;
    double stderr_ = 0; // binomial
    std::string parity;
    bool sufficient = true; // at least min_eigenfunctions
};

std::vector<KnottingRow> knotting_probability_vs_energy(const std::vector<TangleRecord>& records,
                                                        int min_eigenfunctions = 10);

// ---- arclength against energy ---------------------------------------------

// Mean total length of a random tangle in lambda from the line density E/3pi:
// cube N^3 pi sqrt(3)/2, 3-sphere (N(N+2))^{3/2}/3, oscillator (inside the
// classical ball, local wavenumber) 4 (2E)^3 / (45 pi).
double expected_total_length(SystemKind s, int N);

struct ArclengthRow {
    SystemKind system = SystemKind::PeriodicCube;
    int N = 0;
    double energy = 0;
    int eigenfunctions = 0;
    double mean = 0, stderr_ = 0; // lambda; oscillator inside the classical ball
    double mean_units = 0;        // in the system's length unit
    double expected = 0;
    bool sufficient = true;
};

struct LinearFit {
    bool ok = false;
    double slope = 0, slope_stderr = 0;
    double intercept = 0, intercept_stderr = 0;
};

struct ArclengthCheck {
    std::vector<ArclengthRow> rows;
    std::vector<std::pair<SystemKind, LinearFit>> fits; // mean_units against E_N
};

ArclengthCheck arclength_energy_check(const std::vector<TangleRecord>& records, int min_eigenfunctions = 20);

// ---- symmetry -------------------------------------------------------------

// Antipodal image of every curve: x -> -x in R^4 on the 3-sphere, r -> -r for
// the oscillator. A curve is matched to the curve holding the majority of the
// image's vertices within `tol` (lambda).
struct AntipodalMatch {
    int partner = -1;         // index into the curve list, -1 if unmatched
    double deviation = 0;     // largest image-vertex distance to the partner, lambda
    bool passes_origin = false; // oscillator: self-antipodal and within one voxel diagonal of 0
};

std::vector<AntipodalMatch> antipodal_partners(const std::vector<VortexCurve>& curves, double spacing);

struct SymmetryReport {
    SystemKind system = SystemKind::PeriodicCube;
    int N = 0;
    std::uint64_t seed = 0;
    bool applicable = false;
    int curves = 0;
    int paired = 0;          // curves whose partner is another curve
    int self_antipodal = 0;
    int unmatched = 0;
    double max_deviation = 0; // lambda
    int origin_curves = 0;
    int expected_origin_curves = -1; // oscillator: N odd ? 1 : 0
    int det_pairs = 0;      // analyzed pairs compared
    int det_mismatches = 0; // pairs whose determinants differ
};

// `record` supplies the determinants for the pair check, rows matched by curve id.
SymmetryReport symmetry_audit(const std::vector<VortexCurve>& curves, const TangleRecord& record);

// ---- plot-data writers ------------------------------------------------------

void write_fig2_main(std::ostream& os, const std::vector<std::pair<SystemKind, UnknotTable>>& tables);
void write_fig2_inset(std::ostream& os, const std::vector<std::pair<SystemKind, ComplexityHistogram>>& hists);
void write_fig3(std::ostream& os, const std::vector<KnottingRow>& rows);
void write_arclength_check(std::ostream& os, const ArclengthCheck& check);
void write_symmetry_audit(std::ostream& os, const std::vector<SymmetryReport>& reports);

} // namespace vk
