#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rnnp/gradients.hpp"
#include "rnnp/training.hpp"

namespace rnnp::cli {

enum ExitCode : int {
    kOk = 0,
    kUnexpected = 1,
    kConfigError = 2,
    kDataError = 3,
    kNumericError = 4,
    kAcceptanceFailure = 5,
};

/// One random gradient-check instance, fully determined by its seed.
struct GradcheckCase {
    std::uint64_t seed = 0;
    RnnSpec spec;
    LossHead head;
    ModelParams params;
    std::vector<Vector> xs;
    double target = 0.0;
};

GradcheckCase make_gradcheck_case(std::uint64_t seed);

struct GradcheckRow {
    std::string engine;  ///< TRRL/RTRL/BPTT against finite differences, or "RTRL~TRRL", "BPTT~TRRL"
    std::uint64_t seed = 0;
    std::size_t tau = 0;
    std::string lag_set;
    double max_rel_err = 0.0;
    double max_abs_err = 0.0;
    bool pass = false;
};

/// Finite-difference tolerance: 1e-5 relative or 1e-7 absolute per coordinate.
/// Cross-engine tolerance: ||a - b||_inf <= 1e-10 (1 + ||b||_inf).
std::vector<GradcheckRow> run_gradcheck(std::uint64_t first_seed, std::size_t seeds);
/// engine,seed,tau,lagset,max_rel_err,max_abs_err
std::string gradcheck_csv(const std::vector<GradcheckRow>& rows);

/// Entry point of the `rnnp` executable; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace rnnp::cli
