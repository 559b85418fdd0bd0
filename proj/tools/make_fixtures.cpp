// Regenerates the bundled instance files under data/.
#include <filesystem>
#include <iostream>

#include "cagegen/fixtures.hpp"
#include "cagegen/instance_io.hpp"

using namespace cagegen;

int main(int argc, char** argv) {
    const std::filesystem::path dir = argc > 1 ? argv[1] : "data";
    std::filesystem::create_directories(dir);
    auto put = [&](const char* name, Instance inst, const char* about) {
        inst.stats.insert(inst.stats.begin(), {"fixture", about});
        write_instance(dir / name, inst);
        std::cout << (dir / name).string() << '\n';
    };
    put("methane.cage", fixtures::as_instance(fixtures::ideal_methane()), "ideal_methane");
    put("bent_methane.cage", fixtures::as_instance(fixtures::bent_methane(100.0)), "bent_methane_100");
    put("corridor.cage", fixtures::as_instance(fixtures::corridor().world), "corridor");
    put("constrained.cage", fixtures::as_instance(fixtures::constrained().world), "constrained");
    put("small_cage.cage", fixtures::small_cage(), "small_cage");
    put("walled_endpoint.cage", fixtures::walled_endpoint(), "walled_endpoint");
    return 0;
}
