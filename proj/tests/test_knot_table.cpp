#include "support.hpp"

#include "vk/errors.hpp"
#include "vk/knots.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace vk;

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("bundled table is the generator's output")
{
    const auto generated = KnotTable::generate(data_path("knot_codes.txt"));
    std::stringstream ss;
    generated.write_csv(ss);
    CHECK(ss.str() == slurp(data_path("knot_table.csv")));

    // the command-line generator writes the same bytes
    const auto out = std::filesystem::temp_directory_path() / "vk_knot_table_test.csv";
    const std::string cmd = std::string(VK_TOOLS_DIR) + "/gen_knot_table " + data_path("knot_codes.txt") + " " +
                            out.string() + " > /dev/null";
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(slurp(out.string()) == ss.str());
    std::filesystem::remove(out);

    // and loading it back loses nothing
    const auto loaded = KnotTable::load(data_path("knot_table.csv"));
    REQUIRE(loaded.entries().size() == generated.entries().size());
    for (std::size_t k = 0; k < loaded.entries().size(); ++k) {
        CHECK(loaded.entries()[k].name == generated.entries()[k].name);
        CHECK(loaded.entries()[k].inv == generated.entries()[k].inv);
    }
}

TEST_CASE("table contents")
{
    const auto& t = KnotTable::bundled();
    int primes = 0, composites = 0;
    for (const auto& e : t.entries()) {
        (e.composite ? composites : primes)++;
        CHECK(e.inv.det % 2 == 1);
        if (!e.composite) CHECK(e.crossings <= 10);
        else CHECK(e.crossings <= 8);
    }
    // chiral knots appear twice; amphicheiral knots (v3 = 0 among them) once
    CHECK(primes > 249);
    CHECK(composites > 0);

    const auto refs = test::load_refs();
    for (const auto& r : refs) {
        INFO(r.name);
        const auto o = test::oracle(r);
        bool found = false;
        for (const auto& e : t.entries())
            if (e.name == r.name) {
                found = true;
                CHECK(e.inv.det == o.det);
                CHECK(e.inv.v2 == o.v2);
                CHECK(e.crossings == r.crossings);
            }
        CHECK(found);
    }
}

TEST_CASE("classification")
{
    const auto& t = KnotTable::bundled();
    InvariantSet tre;
    tre.det = 3;
    tre.a3 = 4;
    tre.a4 = 1;
    tre.v2 = 1;
    for (int s : {1, -1}) {
        tre.v3 = s;
        const auto id = t.classify(tre);
        CHECK(id.name.rfind("3_1", 0) == 0);
        CHECK(!id.composite);
    }
    tre.v3 = 1;
    InvariantSet mir = tre;
    mir.v3 = -1;
    CHECK(t.classify(tre).name != t.classify(mir).name);

    CHECK(t.classify(InvariantSet{}).name == "0_1");
    InvariantSet odd;
    odd.det = 100001;
    CHECK(t.classify(odd).name == "unidentified");
    CHECK(t.classify(odd).candidates.empty());

    // granny and square knots
    const auto refs = test::refs_by_name();
    const auto d = parse_gauss(refs.at("3_1").gauss);
    // the granny knot shares every invariant with 8_20
    const auto granny = t.classify(invariants(connect(d, d)));
    CHECK(granny.name == "unidentified");
    CHECK(granny.composite);
    CHECK(granny.candidates.size() == 2);
    CHECK(std::count_if(granny.candidates.begin(), granny.candidates.end(),
                        [](const std::string& n) { return n.rfind("8_20", 0) == 0; }) == 1);
    const auto square = t.classify(invariants(connect(d, mirror(d))));
    CHECK(square.composite);
    CHECK(square.name == "3_1#3_1*");

    // entries sharing all five invariants are reported as candidates
    std::map<InvariantSet, int> mult;
    for (const auto& e : t.entries()) mult[e.inv]++;
    for (const auto& [inv, n] : mult)
        if (n > 1) {
            const auto id = t.classify(inv);
            CHECK(id.name == "unidentified");
            CHECK(int(id.candidates.size()) == n);
            break;
        }
}

TEST_CASE("malformed tables are rejected")
{
    const auto p = std::filesystem::temp_directory_path() / "vk_bad_table.csv";
    std::ofstream(p) << "name,crossings\n3_1,3\n";
    CHECK_THROWS_AS(KnotTable::load(p.string()), FormatError);
    std::filesystem::remove(p);
}
