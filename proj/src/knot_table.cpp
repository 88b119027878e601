#include "io_util.hpp"
#include "vk/knots.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

// Table layout:
//
//   # vk-knot-table 1
//   name,crossings,composite,det,a3,a4,v2,v3
//   3_1,3,0,3,4,1,1,1
//   ...
//
// "K*" is the mirror image of K; it is listed only when some invariant tells
// the two apart.

namespace vk {

static constexpr const char* kTableHeader = "# vk-knot-table 1";
static constexpr const char* kTableColumns = "name,crossings,composite,det,a3,a4,v2,v3";

std::string data_path(const std::string& file)
{
    if (const char* d = std::getenv("VK_DATA_DIR"); d && *d) return std::string(d) + "/" + file;
    return std::string(VK_DATA_DIR) + "/" + file;
}

KnotTable::KnotTable(std::vector<KnotTableEntry> entries) : entries_(std::move(entries))
{
    for (std::size_t k = 0; k < entries_.size(); ++k) index_.emplace(entries_[k].inv, k);
}

namespace {

std::string trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    for (;;) {
        const std::size_t j = s.find(sep, i);
        out.push_back(trim(std::string_view(s).substr(i, j == std::string::npos ? std::string::npos : j - i)));
        if (j == std::string::npos) break;
        i = j + 1;
    }
    return out;
}

} // namespace

std::map<std::string, std::string> load_knot_codes(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    io::LineReader in(f);
    std::map<std::string, std::string> out;
    std::string line;
    while (in.next_data(line)) {
        const auto cols = split(line, '|');
        if (cols.size() < 3) throw FormatError("knot code line needs 'name | crossings | gauss'", in.line());
        out[cols[0]] = cols[2];
    }
    return out;
}

KnotTable KnotTable::generate(const std::string& codes_path)
{
    const auto codes = load_knot_codes(codes_path);
    std::vector<KnotTableEntry> e;
    e.push_back({"0_1", 0, false, InvariantSet{}});

    // prime knots and their distinguishable mirrors
    std::map<std::string, KnotDiagram> diagram;
    for (const auto& [name, code] : codes) {
        const KnotDiagram d = parse_gauss(code);
        const KnotDiagram m = mirror(d);
        const InvariantSet a = invariants(d), b = invariants(m);
        const int n = d.crossings();
        e.push_back({name, n, false, a});
        diagram[name] = d;
        if (!(a == b)) {
            e.push_back({name + "*", n, false, b});
            diagram[name + "*"] = m;
        }
    }

    // composites with at most 8 crossings in total
    const std::vector<std::pair<std::string, std::string>> parts = {
        {"3_1", "3_1"}, {"3_1", "4_1"}, {"3_1", "5_1"}, {"3_1", "5_2"}, {"4_1", "4_1"}};
    std::set<std::string> seen;
    for (const auto& [p, q] : parts)
        for (const std::string& x : {p, p + "*"})
            for (const std::string& y : {q, q + "*"}) {
                if (!diagram.count(x) || !diagram.count(y)) continue;
                const std::string name = x <= y ? x + "#" + y : y + "#" + x;
                if (!seen.insert(name).second) continue;
                const KnotDiagram d = connect(diagram[x], diagram[y]);
                e.push_back({name, d.crossings(), true, invariants(d)});
            }
    return KnotTable(std::move(e));
}

void KnotTable::write_csv(std::ostream& os) const
{
    os << kTableHeader << '\n' << kTableColumns << '\n';
    for (const auto& t : entries_)
        os << t.name << ',' << t.crossings << ',' << (t.composite ? 1 : 0) << ',' << t.inv.det << ',' << t.inv.a3
           << ',' << t.inv.a4 << ',' << t.inv.v2 << ',' << t.inv.v3 << '\n';
}

KnotTable KnotTable::load(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    io::LineReader in(f);
    std::string line;
    if (!in.next(line) || line != kTableHeader) throw FormatError("not a vk knot table", in.line());
    if (!in.next(line) || line != kTableColumns) throw FormatError("unexpected knot table columns", in.line());
    std::vector<KnotTableEntry> e;
    while (in.next_data(line)) {
        const auto c = split(line, ',');
        if (c.size() != 8) throw FormatError("knot table row needs 8 fields", in.line());
        KnotTableEntry t;
        t.name = c[0];
        t.crossings = io::parse_int<int>(c[1], in.line());
        t.composite = io::parse_int<int>(c[2], in.line()) != 0;
        try {
            t.inv.det = BigInt(c[3]);
            t.inv.a3 = BigInt(c[4]);
            t.inv.a4 = BigInt(c[5]);
        }
        catch (const std::exception&) {
            throw FormatError("bad integer in knot table", in.line());
        }
        t.inv.v2 = io::parse_int<std::int64_t>(c[6], in.line());
        t.inv.v3 = io::parse_int<std::int64_t>(c[7], in.line());
        e.push_back(std::move(t));
    }
    return KnotTable(std::move(e));
}

const KnotTable& KnotTable::bundled()
{
    static const KnotTable t = [] {
        const std::string p = data_path("knot_table.csv");
        if (std::ifstream(p)) return load(p);
        return generate(data_path("knot_codes.txt"));
    }();
    return t;
}

KnotId KnotTable::classify(const InvariantSet& inv) const
{
    KnotId id;
    auto [lo, hi] = index_.equal_range(inv);
    for (auto it = lo; it != hi; ++it) id.candidates.push_back(entries_[it->second].name);
    if (id.candidates.size() == 1) {
        const auto& t = entries_[lo->second];
        id.name = t.name;
        id.composite = t.composite;
    }
    else if (!id.candidates.empty()) {
        for (auto it = lo; it != hi; ++it) id.composite = id.composite || entries_[it->second].composite;
    }
    return id;
}

} // namespace vk
