// Acceptance suite runner: one pass/fail line per criterion; nonzero exit if
// any criterion fails.

#include <cstdio>
#include <filesystem>

#include "ndsthermo/acceptance.hpp"

int main() {
    std::filesystem::path scratch =
        std::filesystem::temp_directory_path() / "ndsthermo-acceptance-scratch";
    std::filesystem::create_directories(scratch);

    auto results = ndsthermo::run_acceptance(2, scratch);
    bool all = true;
    double total = 0.0;
    for (const auto& r : results) {
        all = all && r.passed;
        total += r.seconds;
        std::printf("[%s] criterion %2d: %s (%.1fs)\n        %s\n", r.passed ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.seconds, r.detail.c_str());
    }
    std::printf("%s: %zu criteria, %.1fs total\n", all ? "ALL PASS" : "FAILURES PRESENT", results.size(),
                total);
    return all ? 0 : 1;
}
