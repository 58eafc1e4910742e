#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpinv/block.hpp"
#include "dpinv/dense.hpp"
#include "dpinv/krylov.hpp"
#include "dpinv/sparse.hpp"
#include "dpinv/stationary.hpp"

namespace dpinv {

enum class LaplacianKind {
    random_walk,   ///< r: Pi - Pi P
    diag_scaled,   ///< d: I - Pi^{1/2} P Pi^{-1/2}
    normalized,    ///< p: I - P
    unnormalized,  ///< a: D - D P
};

/// Accepts "r", "d", "p", "a".
LaplacianKind parse_laplacian_kind(std::string_view code);
std::string_view kind_code(LaplacianKind kind);

/// Builds the requested Laplacian of a transition matrix. `pi` is needed for
/// r and d, `d` (out-degrees) for a; the unused one may be empty.
SparseMatrix build_laplacian(const SparseMatrix& P, std::span<const double> pi,
                             std::span<const double> d, LaplacianKind kind);

struct EulerianCheck {
    bool ok = false;
    double right_residual = 0.0;  ///< ||L w||_inf
    double left_residual = 0.0;   ///< ||L^T w||_inf
};

/// ok iff both residuals are within 1e-8 * max|L| * max|w|.
EulerianCheck check_eulerian(const SparseMatrix& L, std::span<const double> w);

/// max(||L w||_2, ||L^T w||_2) / (||L||_F ||w||_2).
double eulerian_backward_error(const SparseMatrix& L, std::span<const double> w);

/// An Eulerian Laplacian (kind r or d) with its unit null vector u and the
/// rank-one shifted operator C = L + alpha u u^T used for column solves.
/// Construction accepts pi when check_eulerian passes or the backward error
/// is at most 1e-8; otherwise it throws InputError.
class EulerianSystem {
public:
    EulerianSystem(const SparseMatrix& P, Vector pi, LaplacianKind kind, double shift_alpha = 1.0);

    LaplacianKind kind() const noexcept { return kind_; }
    const SparseMatrix& L() const noexcept { return L_; }
    const Vector& u() const noexcept { return u_; }
    const Vector& pi() const noexcept { return pi_; }
    double shift_alpha() const noexcept { return alpha_; }
    std::size_t size() const noexcept { return L_.rows(); }
    const LinearOperator& shifted() const noexcept { return op_; }

private:
    LaplacianKind kind_;
    SparseMatrix L_;
    Vector u_;
    Vector pi_;
    double alpha_;
    LinearOperator op_;
};

struct ColumnSolve {
    Vector column;
    SolveReport report;
};

/// Column j of the pseudo-inverse: x - (u_j / alpha) u with C x = e_j.
ColumnSolve pinv_column(const EulerianSystem& sys, NodeId j, const GmresConfig& cfg = {});

/// M z = C^{-1} z - u (u^T z) / alpha for an arbitrary z.
ColumnSolve pinv_apply(const EulerianSystem& sys, std::span<const double> z,
                       const GmresConfig& cfg = {});

struct PinvBlock {
    std::vector<NodeId> columns;
    ColumnBlock values;  ///< n x |columns|
    std::vector<SolveReport> reports;
};

/// Independent column solves, spread over `threads` workers. The output does
/// not depend on the thread count.
PinvBlock pinv_columns(const EulerianSystem& sys, std::span<const NodeId> J,
                       const GmresConfig& cfg = {}, std::size_t threads = 1);

// Dense maps between a nullity-one matrix's pseudo-inverse and the inverse of
// its leading block. `pivot` is the row/column playing the role of the last
// index; the remaining indices keep their natural order. Defaults to n - 1.

/// Inverse of A with the pivot row and column removed, from B = A^+ and the
/// symmetric null vector u.
DenseMatrix reduced_inverse_from_pinv(const DenseMatrix& B, std::span<const double> u,
                                      std::optional<std::size_t> pivot = std::nullopt);
/// Inverse direction; u is normalized internally.
DenseMatrix pinv_from_reduced(const DenseMatrix& A11_inv, std::span<const double> u,
                              std::optional<std::size_t> pivot = std::nullopt);

/// As above with distinct right (u) and left (v) null vectors.
DenseMatrix reduced_from_pinv_general(const DenseMatrix& B, std::span<const double> u,
                                      std::span<const double> v,
                                      std::optional<std::size_t> pivot = std::nullopt);
DenseMatrix pinv_from_reduced_general(const DenseMatrix& A11_inv, std::span<const double> u,
                                      std::span<const double> v,
                                      std::optional<std::size_t> pivot = std::nullopt);

/// Solves with C = L + alpha u v^T and with C^T.
struct RankOneSolver {
    std::size_t n = 0;
    std::function<Vector(std::span<const double>)> solve;
    std::function<Vector(std::span<const double>)> solve_transpose;
};

RankOneSolver dense_rank_one_solver(const DenseMatrix& L, std::span<const double> u,
                                    std::span<const double> v, double alpha = 1.0);
RankOneSolver iterative_rank_one_solver(const SparseMatrix& L, std::span<const double> u,
                                        std::span<const double> v, double alpha = 1.0,
                                        const GmresConfig& cfg = {});

/// Columns J of (I - u u^T/u^T u) C^{-1} (I - v v^T/v^T v), using one solve per
/// column plus one solve with C and one with C^T.
DenseMatrix pinv_rank1_general(const RankOneSolver& solver, std::span<const double> u,
                               std::span<const double> v, std::span<const NodeId> J);
/// All columns.
DenseMatrix pinv_rank1_general(const RankOneSolver& solver, std::span<const double> u,
                               std::span<const double> v);

struct PropertyReport {
    bool irreducible = false;        ///< (Pa)
    bool sign_pattern = false;       ///< (Pb)
    std::optional<bool> null_vector;  ///< (Pc), when x was supplied
    double null_residual = 0.0;       ///< ||L x||_inf
    std::optional<bool> mmatrix_vector;  ///< (Pc'), when checking an (n-1)-block with w
    std::vector<std::string> failures;

    bool ok() const noexcept { return failures.empty(); }
};

/// (Pa), (Pb) and, when x is given, (Pc): L x = 0 with x > 0.
PropertyReport check_properties(const SparseMatrix& L, std::span<const double> x = {});
/// (Pa), (Pb) and (Pc'): w > 0 with L11 w > 0.
PropertyReport check_mmatrix_properties(const SparseMatrix& L11, std::span<const double> w);

/// A Laplacian satisfying (Pa)-(Pc) together with its positive right null
/// vector. Construction throws InputError naming the first failed property.
class GeneralLaplacian {
public:
    GeneralLaplacian(SparseMatrix L, Vector x);

    const SparseMatrix& L() const noexcept { return L_; }
    const Vector& x() const noexcept { return x_; }
    std::size_t size() const noexcept { return L_.rows(); }

private:
    SparseMatrix L_;
    Vector x_;
};

/// Borders an (n-1) x (n-1) M-matrix with one extra row and column so that
/// [w; 1] is a right null vector and [v1; 1] a left one. v1 defaults to all
/// ones, which needs nonnegative column sums in L11.
GeneralLaplacian embed_mmatrix(const SparseMatrix& L11, std::span<const double> w,
                               std::span<const double> v1 = {});

struct GeneralPinvResult {
    std::vector<NodeId> columns;
    ColumnBlock values;        ///< requested columns of the pseudo-inverse
    Vector pi;                 ///< stationary vector of the rescaled walk
    Vector u;                  ///< right null vector (x)
    Vector v;                  ///< left null vector, scaled so v^T u = 1
    std::size_t pivot = 0;
    StationaryResult stationary;
    std::vector<SolveReport> reports;  ///< per requested column (empty for the pivot)
    SolveReport w_report;              ///< the extra solve
};

struct GeneralPinvOptions {
    GmresConfig gmres;
    SubspaceConfig subspace;
    std::size_t threads = 1;
    std::optional<std::size_t> pivot;  ///< defaults to argmax pi
};

/// Columns J of the pseudo-inverse of a general Laplacian, through the
/// Eulerian rescaling and the bordered-inverse maps.
GeneralPinvResult general_pinv(const GeneralLaplacian& lt, std::span<const NodeId> J,
                               const GeneralPinvOptions& opt = {});

}  // namespace dpinv
