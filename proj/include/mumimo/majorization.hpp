#pragma once

#include <Eigen/Dense>

namespace mumimo {

using RealVec = Eigen::VectorXd;

// Majorization comparisons run through eigen-solver output, so they carry an
// absolute-plus-relative tolerance scaled by sum |y|.
inline constexpr double kMajorizationTol = 1e-9;

// True iff x majorizes y: with both vectors rearranged increasingly, every
// proper prefix sum of x is <= the matching prefix sum of y and the totals
// agree. Throws std::invalid_argument on length mismatch.
bool majorizes(const RealVec& x, const RealVec& y, double tol = kMajorizationTol);

// The minimum vector with `zeros` forced zero entries that majorizes the
// nonnegative vector y: the first `zeros` entries vanish, the next block is
// a common average, and the tail copies the largest entries of y. Returned
// in increasing order; callers wanting descending order reverse explicitly.
// Throws std::domain_error for zeros > n, negative entries, or zeros == n
// with a nonzero sum (no such vector exists).
RealVec min_majorizing_vector(const RealVec& y, int zeros);

// Builds a Hermitian (here real symmetric) matrix with prescribed spectrum
// `eigs` and prescribed diagonal `diag`, valid whenever eigs majorizes diag.
// Recursive 2x2 Givens pivots: each rotation fixes one diagonal entry while
// keeping the untouched trailing block diagonal, so the construction needs
// n-1 rotations. Output is not unique; any matrix matching spectrum and
// diagonal is acceptable to callers.
Eigen::MatrixXcd schur_horn(const RealVec& eigs, const RealVec& diag);

}  // namespace mumimo
