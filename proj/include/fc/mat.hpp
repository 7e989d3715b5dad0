#pragma once

#include <optional>
#include <vector>

#include "fc/witt.hpp"

namespace fc {

/// Dense matrix over a WittRing (row-major).
struct Mat {
    const WittRing* R = nullptr;
    int rows = 0, cols = 0;
    std::vector<WittElem> a;

    Mat() = default;
    Mat(const WittRing* ring, int r, int c)
        : R(ring), rows(r), cols(c), a(size_t(r) * size_t(c), WittElem::zero(ring)) {}

    WittElem& at(int i, int j) { return a[size_t(i) * size_t(cols) + size_t(j)]; }
    const WittElem& at(int i, int j) const { return a[size_t(i) * size_t(cols) + size_t(j)]; }

    static Mat identity(const WittRing* R, int n);
    static Mat diag_p(const WittRing* R, const std::vector<int>& exps);  // diag(p^e_i)
    static Mat from_cols(const WittRing* R, int n, const std::vector<std::vector<WittElem>>& cols);

    Mat operator*(const Mat& o) const;
    Mat operator+(const Mat& o) const;
    Mat operator-(const Mat& o) const;
    bool operator==(const Mat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
    bool operator!=(const Mat& o) const { return !(*this == o); }

    Mat transpose() const;
    Mat scal(const WittElem& s) const;
    Mat mulp(int k) const;
    Mat divp(int k) const;  // exact; throws if some entry has lower valuation
    Mat frobenius(int e = 1) const;  // entrywise sigma^e
    Mat hcat(const Mat& o) const;    // [this | o]
    Mat col(int j) const;
    Mat cols_range(int j0, int j1) const;  // columns [j0, j1)
    std::vector<WittElem> col_vec(int j) const;
    bool is_zero() const;
    int min_val() const;  // min entry valuation (N if zero matrix)

    std::vector<WittElem> apply(const std::vector<WittElem>& v) const;  // this * v
};

/// U*A*V = diag(p^exps), U and V invertible; exps sorted ascending, values in
/// [0, N] (N = indistinguishable from zero at the working precision).
struct SNF {
    Mat U, V;
    std::vector<int> exps;  // length min(rows, cols)
};

SNF smith_normal_form(const Mat& A);

/// Elementary-divisor exponents only (same values, cheaper to call).
std::vector<int> snf_exponents(const Mat& A);

WittElem det(const Mat& A);  // Leibniz; intended for small n

/// Characteristic polynomial det(u*I - A), coefficients c_0..c_n (c_n = 1),
/// via signed sums of principal minors.
std::vector<WittElem> char_poly(const Mat& A);

Mat adjugate(const Mat& A);  // adj(A) with A*adj(A) = det(A)*I

Mat kron(const Mat& A, const Mat& B);  // Kronecker product

/// Column-style Howell canonical form of the column span of A inside the free
/// module (W_N)^rows: two matrices have equal column spans iff their forms are
/// identical. Zero columns are dropped; columns are ordered by pivot row.
Mat howell(const Mat& A);

/// Is v in the column span of A (at the working precision)?
bool in_span(const Mat& A, const std::vector<WittElem>& v);

/// Column span containment / equality at the working precision.
bool span_subset(const Mat& A, const Mat& B);  // colspan(A) subset of colspan(B)
bool span_equal(const Mat& A, const Mat& B);

/// Some x with A x = v, if one exists.
std::optional<std::vector<WittElem>> solve(const Mat& A, const std::vector<WittElem>& v);

/// Kernel of A as a map (W_N)^cols -> (W_N)^rows: columns generate
/// {x | A x = 0 mod p^N}. Always well defined.
Mat kernel_truncation(const Mat& A);

/// Kernel of the map over the untruncated ring, assuming A is the reduction of
/// an integral matrix: only directions certified to be annihilated exactly
/// (elementary divisor >= N) contribute. Divisors within `guard` of N (but
/// below it) are ambiguous and raise PrecisionError.
Mat kernel_saturated(const Mat& A, int guard = 3);

/// Kernel of A modulo p^s (s <= N): {x | A x = 0 mod p^s}, as columns.
Mat kernel_mod(const Mat& A, int s);

/// Restriction of scalars: the Z/p^N-linear map v -> A * sigma^twist(v) on
/// (W_N)^n, written as a (d*n) x (d*n) matrix over W_N(F_p) (same p, N, d=1).
/// Basis: x^j e_i ordered i-major ((i,j) -> i*d + j).
Mat linearize(const Mat& A, int twist);

/// Push a vector through the linearized basis and back.
std::vector<WittElem> to_linear_coords(const WittRing* R1, const std::vector<WittElem>& v);
std::vector<WittElem> from_linear_coords(const WittRing* R, const std::vector<WittElem>& v);

}  // namespace fc
