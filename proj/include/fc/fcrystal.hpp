#pragma once

#include <numeric>
#include <string>

#include "fc/lattice.hpp"

namespace fc {

/// Rational slope (reduced fraction).
struct Slope {
    long long num = 0;
    long long den = 1;

    static Slope of(long long n, long long d) {
        if (d < 0) { n = -n; d = -d; }
        long long g = std::gcd(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        return {n, d};
    }
    bool operator==(const Slope& o) const { return num == o.num && den == o.den; }
    bool operator<(const Slope& o) const { return num * o.den < o.num * den; }
};

/// Rank-n crystal over the point: a Frobenius-semilinear map Phi = p^{-rho} P
/// (P integral, invertible after inverting p) acting as v -> Phi * sigma(v).
struct FCrystalPoint {
    const WittRing* R = nullptr;
    int n = 0;
    Mat P;
    int rho = 0;

    static FCrystalPoint make(const WittRing* R, const Mat& P, int rho);
    static FCrystalPoint unit(const WittRing* R, int twist = 0);

    FCrystalPoint tate_twist(int s) const { return {R, n, P, rho + s}; }
    FCrystalPoint dual() const;
    FCrystalPoint tensor(const FCrystalPoint& o) const;
    FCrystalPoint direct_sum(const FCrystalPoint& o) const;

    /// Divide out the common p-power of P (moves it into rho).
    FCrystalPoint normalized() const;
    bool operator==(const FCrystalPoint& o) const;
    /// Equality of the aligned presentations modulo p^k (constructions that
    /// divide by the determinant certify fewer digits than the working ring).
    bool equal_mod(const FCrystalPoint& o, int k) const;

    /// Effective filtration range: N_r = p^{-r}Phi(F*D) for r <= r_min and
    /// N_r = D for r >= r_max (forced p-scaling outside).
    int r_min() const;
    int r_max() const;
};

Lattice filtration_N(const FCrystalPoint& D, int r);
Lattice filtration_M(const FCrystalPoint& D, int r);
/// p^{-r}Phi maps M^r isomorphically onto N_r.
bool filtration_isomorphism_check(const FCrystalPoint& D, int r);

std::vector<int> hodge_polygon(const FCrystalPoint& D);      // ascending slopes
std::vector<Slope> newton_polygon(const FCrystalPoint& D);   // ascending slopes
/// Newton on-or-above Hodge with equal endpoints.
bool newton_above_hodge(const FCrystalPoint& D);

struct SyntomicReport {
    FiniteModule H0, H1, T0;
    int precision = 0;
};
/// H^0/H^1 of the mapping fiber of 1 - Phi.eta : N_0 -> N_{(-inf)}, plus
/// T^0 = N_{(-inf)} / N_0, all as Z_p-modules (restriction of scalars).
SyntomicReport syntomic_point(const FCrystalPoint& D);

FiniteModule hom_unit(const FCrystalPoint& D);
FiniteModule ext_unit(const FCrystalPoint& D);

/// p^{off} * x, a vector in N_{(-inf)}(D).
struct Cocycle {
    std::vector<WittElem> x;
    int off = 0;
};
/// Extension of the unit crystal by D with class x: Phi_E = [[Phi, x],[0, 1]].
FCrystalPoint extension_of_cocycle(const FCrystalPoint& D, const Cocycle& x);
/// Recover the class of an extension whose last row is (0,...,0,1) after
/// clearing denominators (the sub-crystal D in the first n coordinates).
Cocycle cocycle_of_extension(const FCrystalPoint& E);
/// Class equality in H^1: x - x' in (1 - Phi.eta)(N_0).
bool cocycle_classes_equal(const FCrystalPoint& D, const Cocycle& a, const Cocycle& b);

/// O-linear map of crystals p^{-den} A commuting with the Frobenii.
struct CrystalMap {
    Mat A;
    int den = 0;
};

struct ExactnessVerdict {
    bool pass = true;
    int failing_r = 0;
    std::string reason;
};
/// Checks that 0 -> N_r(D') -> N_r(D) -> N_r(D'') -> 0 is exact for every r
/// in the effective range (the condition characterizing exactness of
/// 0 -> D' -> D -> D'' -> 0).
ExactnessVerdict exactness_check(const FCrystalPoint& Dsub, const FCrystalPoint& D,
                                 const FCrystalPoint& Dquot, const CrystalMap& f,
                                 const CrystalMap& g);

struct FrobeniusGauge {
    int r_min = 0, r_max = 0;
    std::vector<Lattice> D_r;  // D_r[i] = level r_min + i
    bool axioms_ok = false;
    std::string detail;
};
/// The ladder D_r = N_r(D) with f = inclusion, v = multiplication by p:
/// checks fv = vf = p, boundary isomorphisms, and the Frobenius
/// identification N_{r_min} = p^{-r_min} Phi(F*D).
FrobeniusGauge gauge_of_crystal(const FCrystalPoint& D);

/// Right-hand sides of the tensor/dual filtration formulas (independently
/// assembled, for cross-checking against filtration_N of the constructions).
Lattice tensor_filtration_rhs(const FCrystalPoint& D, const FCrystalPoint& Dp, int r);
Lattice dual_filtration_rhs(const FCrystalPoint& D, int r);
/// {lambda : lambda(L) in p^c W} as a lattice of column vectors.
Lattice lattice_dual_bound(const Lattice& L, int c);

/// Lattice tensor product (Kronecker basis, offsets add).
Lattice lattice_tensor(const Lattice& a, const Lattice& b);

/// Z_p-lattice of colspan(B): columns x^j * b_c over W(F_p) coordinates.
Mat lin_lattice(const Mat& B);

}  // namespace fc
