// Regenerates data/knot_table.csv from the reference Gauss codes.
//
//   gen_knot_table [codes.txt] [out.csv]

#include "vk/knots.hpp"

#include <fstream>
#include <iostream>

int main(int argc, char** argv)
{
    const std::string codes = argc > 1 ? argv[1] : vk::data_path("knot_codes.txt");
    const std::string out = argc > 2 ? argv[2] : vk::data_path("knot_table.csv");
    try {
        const vk::KnotTable t = vk::KnotTable::generate(codes);
        std::ofstream f(out);
        if (!f) {
            std::cerr << "cannot write " << out << '\n';
            return 2;
        }
        t.write_csv(f);
        std::cout << t.entries().size() << " entries written to " << out << '\n';
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
