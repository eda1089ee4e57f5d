#pragma once

#include "mimo_switch/types.hpp"

namespace mimo_switch::linalg {

// Moore-Penrose inverse via SVD; singular values below rcond * sigma_max are dropped.
CMatrix pinv(const CMatrix& a, double rcond = 1e-12);

// Numerical rank with the same relative cutoff.
int rank(const CMatrix& a, double rcond = 1e-10);

// Solves A X = B for Hermitian positive (semi)definite A.
CMatrix hermitian_solve(const CMatrix& a, const CMatrix& b);

// X A^{-1} for Hermitian positive definite A.
CMatrix right_hermitian_solve(const CMatrix& x, const CMatrix& a);

double trace_real(const CMatrix& a);

// Column-major vec and its inverse.
CVector vec(const CMatrix& a);
CMatrix unvec(const CVector& v, Eigen::Index rows, Eigen::Index cols);

// Rotates v so that its largest-magnitude entry (first one on ties) is real positive.
CVector normalize_phase(const CVector& v);

}  // namespace mimo_switch::linalg
