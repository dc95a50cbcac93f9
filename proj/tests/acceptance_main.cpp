#include "rsc/acceptance.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

int main(int argc, char** argv) {
    rsc::AcceptanceOptions opts;
    std::string report_path = "acceptance_report.json";
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--report" && i + 1 < argc) {
            report_path = argv[++i];
        } else if (arg == "--only" && i + 1 < argc) {
            opts.only.push_back(std::atoi(argv[++i]));
        } else {
            std::fprintf(stderr, "usage: %s [--only N]... [--report PATH]\n", argv[0]);
            return 2;
        }
    }
    const auto results = rsc::run_acceptance(opts, [](const rsc::CriterionResult& r) {
        std::printf("%s\n", rsc::format_result_line(r).c_str());
        std::fflush(stdout);
    });
    std::ofstream(report_path) << rsc::acceptance_json(results).dump(2) << "\n";
    std::size_t passed = 0;
    for (const auto& r : results) {
        passed += r.passed ? 1 : 0;
    }
    std::printf("%zu/%zu criteria passed; report written to %s\n", passed, results.size(),
                report_path.c_str());
    return passed == results.size() ? EXIT_SUCCESS : EXIT_FAILURE;
}
