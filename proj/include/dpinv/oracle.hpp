#pragma once

// Dense direct reference computations for verification at desk scale
// (n up to a few hundred). Nothing here calls the iterative solvers.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dpinv/dense.hpp"
#include "dpinv/sparse.hpp"

namespace dpinv::oracle {

/// Solves (I - P11)^T v = p21 with the last state pinned, appends 1 and
/// normalizes to sum 1. Throws NumericalError on a singular system.
Vector stationary_direct(const DenseMatrix& P);

struct PenroseReport {
    double aba = 0.0;   ///< ||ABA - A|| / ||A||
    double bab = 0.0;   ///< ||BAB - B|| / ||B||
    double ab_sym = 0.0;  ///< ||AB - (AB)^T|| / ||AB||
    double ba_sym = 0.0;  ///< ||BA - (BA)^T|| / ||BA||
    double tol = 0.0;
    bool pass = false;

    double worst() const;
};

/// The four Moore-Penrose conditions as relative Frobenius residuals.
PenroseReport penrose_check(const DenseMatrix& A, const DenseMatrix& B, double tol);

/// h(i, k) for every i by solving the absorbing system with row and column k removed.
Vector hitting_times_direct(const DenseMatrix& P, std::size_t k);

/// N(i, j) = expected visits to j on walks from i absorbed at k: the inverse
/// of (I - P) with row and column k removed, re-embedded with zeros at k.
DenseMatrix visits_direct(const DenseMatrix& P, std::size_t k);

struct MonteCarloResult {
    std::size_t trials = 0;
    double hitting = 0.0;
    double hitting_se = 0.0;
    double commute = 0.0;
    double commute_se = 0.0;
    Vector visits;     ///< per node, counting the start
    Vector visits_se;
};

/// Simulates `trials` walks i -> k -> i. Throws NumericalError when a single
/// walk exceeds 1e7 steps.
MonteCarloResult monte_carlo_walk(const SparseMatrix& P, std::size_t i, std::size_t k,
                                  std::size_t trials, std::uint64_t seed);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi, ascending.
Vector jacobi_eigenvalues(const DenseMatrix& S);

struct SymmetricPartExtremes {
    double lambda_min_s = 0.0;  ///< smallest eigenvalue of (A + A^T)/2
    double two_norm = 0.0;      ///< ||A||_2
};

SymmetricPartExtremes symmetric_part_extremes(const DenseMatrix& A);

/// (I - u u^T/u^T u) (L + alpha u v^T)^{-1} (I - v v^T/v^T v) from a dense LU.
DenseMatrix dense_pinv_reference(const DenseMatrix& L, std::span<const double> u,
                                 std::span<const double> v, double alpha = 1.0);

/// Eigenvalue moduli of a general dense matrix, descending.
Vector spectrum_moduli(const DenseMatrix& A);

}  // namespace dpinv::oracle
