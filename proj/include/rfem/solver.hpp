#pragma once

#include <string>
#include <vector>

#include "rfem/assembly.hpp"

namespace rfem {

enum class SolveMethod { Auto, Direct, CG };

std::string to_string(SolveMethod m);
SolveMethod solve_method_from_string(const std::string& s);

struct SolveReport {
    std::vector<double> c;
    double residual_norm = 0.0;     // ||Bc - l||_2
    double relative_residual = 0.0; // residual_norm / ||l||_2
    int iterations = 0;             // 0 for the direct path
    SolveMethod method = SolveMethod::Direct;
};

/// Direct path for systems up to this many DOFs under SolveMethod::Auto.
inline constexpr int kDirectSolveLimit = 20000;
/// Contract: ||Bc - l|| <= kSolveTolerance ||l||.
inline constexpr double kSolveTolerance = 1e-10;
/// CG stopping rule on the relative residual.
inline constexpr double kCgTolerance = 1e-12;

/// Solves the SPD system. Throws SingularSystem (carrying the best residual)
/// when factorisation fails or the contract cannot be met.
SolveReport solve_spd(const SparseSystem& system, SolveMethod method = SolveMethod::Auto);

} // namespace rfem
