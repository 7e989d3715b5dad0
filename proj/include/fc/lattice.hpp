#pragma once

#include "fc/mat.hpp"

namespace fc {

/// Isomorphism type of a finitely generated module over W_N(F_{p^d}):
/// direct sum of W/p^{e} factors (torsion, each e in [1, N-1]) and free copies.
struct FiniteModule {
    std::vector<int> torsion;  // sorted ascending
    int free_rank = 0;
    int d = 1;  // residue degree of the coefficient ring (for p-order counting)

    bool is_trivial() const { return torsion.empty() && free_rank == 0; }
    bool is_finite() const { return free_rank == 0; }
    /// v_p of the order (requires finiteness).
    int ord_p() const {
        if (free_rank) throw std::domain_error("FiniteModule: infinite module has no order");
        int s = 0;
        for (int e : torsion) s += e;
        return d * s;
    }
    bool operator==(const FiniteModule& o) const {
        return torsion == o.torsion && free_rank == o.free_rank && d == o.d;
    }
};

/// Full-rank lattice p^{offset} * colspan(basis) inside p^{offset}-scaled W^n.
/// The basis is kept in Howell canonical form (n columns, lower triangular).
struct Lattice {
    const WittRing* R = nullptr;
    int n = 0;
    int offset = 0;
    Mat basis;

    static Lattice standard(const WittRing* R, int n, int offset = 0);
    /// Canonicalize a generating matrix; throws PrecisionError if full rank
    /// cannot be certified (fewer than n pivots at the working precision).
    static Lattice make(const WittRing* R, int offset, const Mat& gens);

    Lattice scaled(int r) const;  // p^r * L
    /// Same lattice re-expressed at a different stored offset. Raising the
    /// offset divides the basis (requires divisibility); lowering multiplies.
    Lattice with_offset(int t) const;
    /// Elementary divisor exponents of the basis (pivot valuations), ascending.
    std::vector<int> pivot_exponents() const;
};

bool lattice_equal(const Lattice& a, const Lattice& b);
bool lattice_subset(const Lattice& a, const Lattice& b);  // a inside b
/// Is p^{voff} * v in L?
bool lattice_member(const Lattice& L, int voff, const std::vector<WittElem>& v);

Lattice lattice_intersection(const Lattice& a, const Lattice& b);
Lattice lattice_sum(const Lattice& a, const Lattice& b);

/// big / small as a finite module; requires small inside big (checked).
FiniteModule lattice_quotient(const Lattice& big, const Lattice& small, int guard = 3);

/// Cokernel of the map given by a matrix between free modules W^cols -> W^rows.
FiniteModule cokernel_of_matrix(const Mat& A, int guard = 3);

/// Kernel of the same map at the working precision, reported as a module
/// (torsion from partially-divisible directions, free rank from exact zeros).
FiniteModule kernel_module_of_matrix(const Mat& A, int guard = 3);

}  // namespace fc
