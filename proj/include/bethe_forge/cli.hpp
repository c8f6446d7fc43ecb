#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bethe_forge/bethe.hpp"

namespace bf {

inline constexpr int kSchemaVersion = 1;

// Seeded twist with pairwise distinct nonzero eigenvalues and small rational thetas.
Twist random_twist(SplitMix64& rng, int K, int M, int N);

struct SuiteParams {
    int K = 2, M = 0, N = 2;
    int draws = 3;
    std::uint64_t seed = 1;
    int sMax = 3;
    int aMax = 2;
    std::optional<std::vector<Rat>> x;       // fixed eigenvalues, else drawn per draw
    std::optional<std::vector<Rat>> theta;   // fixed inhomogeneities, else drawn per draw
    bool timing = false;
};

struct CheckRecord {
    std::string suite;
    std::string check;
    nlohmann::ordered_json params;
    bool residual_zero = false;
    std::string max_residual_poly;
    std::string error;   // exception text when the check could not be evaluated
    double wall_ms = 0;
};

const std::vector<std::string>& suite_names();

// All checks of one suite over the seeded draws. Runs in parallel, results in task order.
std::vector<CheckRecord> run_suite(const std::string& suite, const SuiteParams& p);

nlohmann::ordered_json record_json(const CheckRecord& r, bool timing);

// Full command-line entry point. Exit codes: 0 ok, 1 failed identity or spectrum
// check, 2 configuration error, 3 degenerate spectrum.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bf
