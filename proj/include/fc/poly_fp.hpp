#pragma once

#include <vector>

#include "fc/zmod.hpp"

namespace fc {

/// Polynomial over F_p, coefficients ascending; normalized (no leading zeros).
struct PolyFp {
    u64 p = 0;
    std::vector<u64> c;

    static PolyFp zero(u64 p) { return {p, {}}; }
    static PolyFp constant(u64 p, u64 a);
    static PolyFp monomial(u64 p, int deg, u64 a);

    bool is_zero() const { return c.empty(); }
    int deg() const { return int(c.size()) - 1; }  // -1 for zero
    bool is_unit() const { return deg() == 0; }
    u64 lead() const { return c.back(); }

    void normalize();
    PolyFp operator+(const PolyFp& o) const;
    PolyFp operator-(const PolyFp& o) const;
    PolyFp operator*(const PolyFp& o) const;
    PolyFp scal(u64 s) const;
    PolyFp monic() const;
    bool operator==(const PolyFp& o) const { return p == o.p && c == o.c; }

    /// Quotient and remainder by a nonzero divisor.
    static void divmod(const PolyFp& a, const PolyFp& b, PolyFp& q, PolyFp& r);
};

PolyFp poly_gcd(PolyFp a, PolyFp b);  // monic gcd

/// Dense matrix over F_p[T].
struct PolyMat {
    u64 p = 0;
    int rows = 0, cols = 0;
    std::vector<PolyFp> a;

    PolyMat() = default;
    PolyMat(u64 pp, int r, int c) : p(pp), rows(r), cols(c), a(size_t(r) * size_t(c), PolyFp::zero(pp)) {}
    PolyFp& at(int i, int j) { return a[size_t(i) * size_t(cols) + size_t(j)]; }
    const PolyFp& at(int i, int j) const { return a[size_t(i) * size_t(cols) + size_t(j)]; }
};

/// Elementary divisors of a matrix over the principal ideal domain F_p[T]:
/// monic polynomials d_1 | d_2 | ... (zero rows/columns dropped; the list has
/// one entry per nonzero invariant factor, i.e. its length is the rank).
std::vector<PolyFp> poly_snf_divisors(PolyMat A);

/// Rank of the matrix over the fraction field F_p(T).
int poly_rank(const PolyMat& A);

}  // namespace fc
