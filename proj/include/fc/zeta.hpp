#pragma once

#include <optional>
#include <string>

#include "fc/fcrystal.hpp"

namespace fc {

/// Reciprocal-characteristic polynomial P(u) = det(1 - phi_k u | D), phi_k the
/// d-fold Frobenius iterate made genuinely W(k)-linear; the L-factor is
/// P(u)^{-1}.  Coefficients may have negative valuation (rho-twists).
struct EulerFactor {
    const WittRing* R = nullptr;
    std::vector<PadicScalar> c;  // c[m] multiplies u^m; c[0] = 1
    /// c[m] is certified modulo p^{prec[m]} (denominators eat into the working
    /// precision; dividing a truncated residue leaves garbage digits above).
    std::vector<int> prec;

    int degree() const { return int(c.size()) - 1; }
};

EulerFactor euler_factor(const FCrystalPoint& D);

/// Product of factors (the direct-sum identity's right-hand side).
EulerFactor euler_product(const EulerFactor& a, const EulerFactor& b);

bool euler_equal(const EulerFactor& a, const EulerFactor& b);

/// v_p of P(1) in W(k); nullopt when P(1) is not certifiably nonzero at the
/// working precision (the sum vanishes or sits within `guard` of it).
std::optional<int> euler_value_at_one_val(const EulerFactor& f, int guard = 3);

/// Endomorphism of the finitely generated module W^free_rank (+) W/p^{e_i},
/// free coordinates first.  Entry (i,j) of H is the coefficient of generator i
/// in the image of generator j; the matrix must respect the relations
/// (p^{e_j} H_{ij} = 0 into free rows, valuation >= e_i - e_j into torsion).
struct ModuleEndo {
    const WittRing* R = nullptr;
    int free_rank = 0;
    std::vector<int> torsion;  // exponents e_i in [1, N-1]
    Mat H;

    int gens() const { return free_rank + int(torsion.size()); }
};

/// det(h) = #Coker(h) / #Ker(h) up to units, for h rationally invertible.
/// Valuation and orders are counted over Z_p (restriction of scalars), so the
/// determinant side is d * v(det of the free block).
struct DetLemmaReport {
    int det_ord = 0;    // d * v(det h | free part)
    int coker_ord = 0;  // v_p(#Coker h)
    int ker_ord = 0;    // v_p(#Ker h)
    bool pass = false;
};
DetLemmaReport det_lemma_check(const ModuleEndo& h, int guard = 3);

/// det_{W(k)}(1 - g) = #Coker(a-b) / #Ker(a-b) * #Ker(a) / #Coker(a) up to
/// W(k)-units, where a is linear, b(v) = B sigma(v) is Frobenius-linear (both
/// rationally invertible as required) and g = (b a^{-1})^d with d the residue
/// degree of the ring.  The left side is a W(k)-valuation; the orders are
/// p-exponents of genuine cardinalities (Z_p restriction of scalars).
struct Det2Report {
    int lhs_val = 0;  // v(det(1 - g)) in W(k)
    int coker_ab = 0, ker_ab = 0, coker_a = 0, ker_a = 0;
    bool pass = false;
};
Det2Report det2_lemma_check(const Mat& A, const Mat& B, int guard = 3);

/// Valuation identity behind the class-number formula at a point:
/// v(det(1 - phi_k)) = ord H^1(S) - ord H^0(S) - ord T^0, all orders as
/// p-exponents.  Inapplicable (not failed) when 1 - phi_k is not certifiably
/// invertible or a cohomology module is infinite.
struct ClassNumberReport {
    EulerFactor factor;
    int lhs_valuation = 0;
    int h0_ord = 0, h1_ord = 0, t0_ord = 0;
    bool applicable = false;
    bool verdict = false;
    std::string detail;
};
ClassNumberReport verify_class_number_point(const FCrystalPoint& D);

}  // namespace fc
