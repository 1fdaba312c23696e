#include <fstream>
#include <iostream>
#include <string>

#include "auditlab/errors.hpp"
#include "auditlab/harness/dataset.hpp"
#include "auditlab/harness/sweeps.hpp"

using namespace auditlab;

// Regenerates the checked-in fixtures: two 200-row raw datasets and a
// blackbox results file with two algorithms over the default tau sweep.
int main(int argc, char** argv) {
    const std::string dir = argc > 1 ? argv[1] : "tests/fixtures";
    try {
        RngStream rng(20240601);
        {
            std::ofstream f(dir + "/adult_200.csv");
            RngStream r = rng.split(0);
            write_synthetic_adult(f, 200, r);
        }
        {
            std::ofstream f(dir + "/law_200.csv");
            RngStream r = rng.split(1);
            write_synthetic_law(f, 200, r);
        }
        ExperimentConfig c = parse_config(Json{{"mode", "blackbox"},
                                               {"cost_pairs", Json::array({Json::array({0.0, 1.0})})},
                                               {"past_db_size", 100000},
                                               {"threads", 1}},
                                          "");
        emit_results(run_blackbox_sweep(c).rows, dir + "/results_blackbox.csv", ResultFormat::csv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
