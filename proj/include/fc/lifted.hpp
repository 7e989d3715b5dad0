#pragma once

#include <functional>
#include <memory>
#include <string>

#include "fc/homalg.hpp"
#include "fc/poly_fp.hpp"

namespace fc {

struct AffineBase;
using AffineBasePtr = std::shared_ptr<const AffineBase>;

/// Coordinate ring of the base: truncated (Laurent) polynomials over Z/p^N.
/// Degrees tracked in [lo(), hi()]; a nonzero coefficient produced outside the
/// window taints the element instead of being silently dropped.
struct RingElem {
    const AffineBase* B = nullptr;
    std::vector<u64> c;  // index = deg - lo()
    bool taint = false;

    static RingElem zero(const AffineBase* B);
    static RingElem one(const AffineBase* B);
    static RingElem monomial(const AffineBase* B, int deg, u64 a);

    u64 get(int deg) const;
    void set(int deg, u64 a);  // out-of-window nonzero -> taint

    bool is_zero() const;
    int val() const;  // min coefficient p-valuation; N when zero
    int deg_lo() const;  // lowest degree with nonzero coefficient (0 if zero elem)
    int deg_hi() const;

    RingElem operator+(const RingElem& o) const;
    RingElem operator-(const RingElem& o) const;
    RingElem operator-() const;
    RingElem operator*(const RingElem& o) const;
    bool operator==(const RingElem& o) const { return c == o.c; }

    RingElem scal(u64 s) const;
    RingElem mulp(int k) const;  // k >= 0
    RingElem divp(int k) const;  // exact
    RingElem shift(int k) const;  // multiply by T^k
    RingElem inv() const;  // requires constant-term-unit plus p-divisible tail

    RingElem deriv() const;   // d/dT coefficient polynomial
    RingElem theta() const;   // T d/dT
    RingElem dcoef() const;   // coefficient of the base 1-form: deriv on the
                              // affine line, theta on the torus
    RingElem red_mod_p() const;  // coefficients reduced mod p (still mod p^N rep)
    PolyFp to_poly_fp() const;   // reduction mod p; torus: T-power stripped
};

/// The base: affine line or torus over F_p with Frobenius lift F(T) = T^p + p g(T).
struct AffineBase : std::enable_shared_from_this<AffineBase> {
    enum Kind { affine_line, torus };
    Kind kind = affine_line;
    u64 p = 0;
    int N = 0;  // p-precision
    int M = 0;  // degree window radius
    Zmod z;
    WittRingPtr W1;  // W_N(F_p), the scalar ring used for linearization

    RingElem g;      // F(T) = T^p + p g(T)
    RingElem Fpoly;  // F(T)
    RingElem cF;     // F^*(b) = cF * b for the basis 1-form b (dT / dt/t)
    std::vector<RingElem> Fpow;  // F(T)^j for j in [lo, hi] (index j - lo)

    int lo() const { return kind == torus ? -M : 0; }
    int hi() const { return M; }
    int width() const { return hi() - lo() + 1; }

    /// g given as (degree, coefficient) terms.
    static AffineBasePtr make(Kind kind, u64 p, int N, int M,
                              const std::vector<std::pair<int, long long>>& g_terms = {});

    /// f(F(T)); taints when a needed power of F leaves the window.
    RingElem pull(const RingElem& f) const;
};

using RVec = std::vector<RingElem>;

/// Matrix over the coordinate ring.
struct RMat {
    const AffineBase* B = nullptr;
    int rows = 0, cols = 0;
    std::vector<RingElem> a;

    RMat() = default;
    RMat(const AffineBase* B, int r, int c)
        : B(B), rows(r), cols(c), a(size_t(r) * size_t(c), RingElem::zero(B)) {}

    RingElem& at(int i, int j) { return a[size_t(i) * size_t(cols) + size_t(j)]; }
    const RingElem& at(int i, int j) const { return a[size_t(i) * size_t(cols) + size_t(j)]; }

    static RMat identity(const AffineBase* B, int n);
    static RMat from_int(const AffineBase* B, int r, int c, const std::vector<long long>& vals);

    RMat operator*(const RMat& o) const;
    RMat operator+(const RMat& o) const;
    RMat operator-(const RMat& o) const;
    bool operator==(const RMat& o) const { return a == o.a; }
    RMat mulp(int k) const;
    RMat divp(int k) const;
    RMat pull() const;    // entrywise f(F(T))
    RMat dcoef() const;   // entrywise base-form derivation
    RVec apply(const RVec& v) const;
    RVec col_vec(int j) const;
    bool any_taint() const;

    /// Inverse of I + p * B (Newton iteration).
    RMat inv_unipotent() const;
};

/// F-crystal in the lifted situation: Phi = p^{-rho} P with P integral,
/// nabla(e_j) = sum_i nab(i,j) * b (x) e_i for the basis 1-form b.
struct LiftedCrystal {
    AffineBasePtr base;
    int n = 0;
    RMat P;
    int rho = 0;
    RMat nab;

    static LiftedCrystal make(AffineBasePtr base, RMat P, int rho, RMat nab);
    static LiftedCrystal unit(AffineBasePtr base, int r = 0);  // Phi = p^{-r}, nabla = 0

    /// Gauge transform by an invertible U: basis e = U e'; pure change of basis.
    LiftedCrystal gauge(const RMat& U, const RMat& Uinv) const;
};

// ---------- linearization over W_N(F_p) ----------

/// Row index of coefficient (component i, degree d) in the flattened space
/// (W_N)^{n * width}.
int lin_rows(const AffineBase* B, int n);
Mat lin_cols(const AffineBase* B, int n, const std::vector<RVec>& cols);
RVec unlin_col(const AffineBase* B, int n, const Mat& M, int j);
std::vector<WittElem> lin_vec(const AffineBase* B, int n, const RVec& v);

/// Matrix of a linear operator: columns are op(T^d e_i) for d in [dlo, dhi],
/// i in [0, n); column order (i, d) -> i * (dhi-dlo+1) + (d - dlo).
/// Throws WindowOverflow if any image is tainted.
Mat lin_op(const AffineBase* B, int n_in, int n_out, int dlo, int dhi,
           const std::function<RVec(int i, int d)>& op);

/// Howell span of {T^m * g : g in gens, m in [mlo, mhi], product clean};
/// tainted products are skipped.
Mat o_span(const AffineBase* B, int n, const std::vector<RVec>& gens, int mlo, int mhi);

// ---------- submodules ----------

/// Finitely generated submodule of O_Y^n at the working window: `gens` is a
/// small list of module generators, `zspan` the Howell form of ALL module
/// elements supported in degrees [dlo, dhi] (complete for solver-produced
/// modules).
struct SubmodulePresentation {
    AffineBasePtr B;
    int n = 0;
    int dlo = 0, dhi = 0;
    std::vector<RVec> gens;
    Mat zspan;
};

bool submodule_member(const SubmodulePresentation& S, const RVec& v);

// ---------- crystal operations ----------

struct CompatReport {
    bool pass = false;
    bool window_clean = true;
    std::string detail;
};

/// Horizontality of Phi against nabla plus quasi-nilpotence to the given
/// depth (default 4N iterations).
CompatReport check_compatibility(const LiftedCrystal& D, int qn_depth = -1);

/// A^r(D) = {x in D_Y : Phi(eta(x)) in p^r D_Y}; solved degreewise on inputs
/// supported in [dlo, dhi] (defaulted to the largest clean range when dhi < dlo).
SubmodulePresentation filtration_A(const LiftedCrystal& D, int r, int dlo = 0, int dhi = -1);
/// M^r(D) = {y in F^* D_Y : Phi(y) in p^r D_Y}.
SubmodulePresentation filtration_M(const LiftedCrystal& D, int r, int dlo = 0, int dhi = -1);
/// N_r(D) = p^{-r} Phi(M^r(D)) inside D_Y.
SubmodulePresentation filtration_N(const LiftedCrystal& D, int r, int dlo = 0, int dhi = -1);

/// Direct membership test v in A^r(D): evaluates P * pull(v) = 0 mod p^{r+rho}
/// at reduced precision (robust against window overflow of high-valuation tails).
bool in_filtration_A(const LiftedCrystal& D, int r, const RVec& v);

/// nabla(A^r) inside A^{r-1} (x) omega^1; [dlo, dhi] bounds the generator
/// degrees examined (largest clean range when dhi < dlo).
bool griffiths_check(const LiftedCrystal& D, int r, std::string* why = nullptr, int dlo = 0,
                     int dhi = -1);

/// Span equality F^*(A^r) = M^r at the window, same degree-range convention.
bool fstar_A_vs_M(const LiftedCrystal& D, int r, std::string* why = nullptr, int dlo = 0,
                  int dhi = -1);

struct UniformityReport {
    bool certified_nonuniform = false;
    int r = 0;          // level of the witness
    PolyFp witness;     // non-unit elementary divisor over F_p[T]
    std::string note;   // "probably-uniform" or description
};
UniformityReport uniformity_check(const LiftedCrystal& D, int rmin, int rmax);

/// p^{[j]} = p^j / j! (Legendre valuation j - v_p(j!)).
PadicScalar divided_power(const WittRing* R, int j);

/// A^{[i]} = sum_j p^{[j]} A^{i-j}.
SubmodulePresentation filtration_A_bracket(const LiftedCrystal& D, int i, int dlo = 0, int dhi = -1);

// ---------- de Rham complexes ----------

/// Two-term linearized de Rham complex [O^n -> O^n b] with d = del + nab
/// (fstar_side: the pullback bundle with connection pull(nab) * cF).
Complex dr_ambient(const LiftedCrystal& D, bool fstar_side = false);

/// Degreewise generator matrices of the standard subcomplexes, for input
/// degrees [dlo, dhi] in complex degree 0:
std::vector<Mat> a_dr_gens(const LiftedCrystal& D, int r, int dlo, int dhi);
std::vector<Mat> m_dr_gens(const LiftedCrystal& D, int r, int dlo, int dhi);  // [M^r, p M^{r-1}]
std::vector<Mat> n_dr_gens(const LiftedCrystal& D, int r, int dlo, int dhi);

/// Full windowed de Rham as a filtered complex with levels DR(N^l),
/// N^l = N_{-l}(D), l in [-rmax, -rmin]; ext_scale = 1.
FilteredComplex de_rham(const LiftedCrystal& D, int rmin, int rmax, int dlo, int dhi);

/// Tensor with the ideal (T): multiplies degree-0 generators by T (log-pole
/// basis form on the torus; on the affine line the degree-1 part is already
/// the minus-log term).
std::vector<Mat> minus_log(const LiftedCrystal& D, const std::vector<Mat>& gens);

struct EtaReport {
    FiniteModule HA0, HA1, HM0, HM1;
    bool equal = false;  // order/rank equality per degree
};
/// Cohomology of A^r-DR vs M^r-DR at matched windows (A-side degree radius K).
EtaReport eta_cohomology_compare(const LiftedCrystal& D, int r, int K);

// ---------- syntomic ----------

struct LiftedSyntomic {
    Complex fiber;
    FiniteModule H0;
    int lie_rank = 0;  // generic rank of D_Y / A^0 over F_p[T]
};
LiftedSyntomic syntomic_lifted(const LiftedCrystal& D, int K);

/// Syntomic 1-cocycle (x, w b) with x in D_Y, w b in A^{-1} (x) omega^1.
struct LCocycle {
    RVec x;
    RVec w;
};
LiftedCrystal extension_of_cocycle_lifted(const LiftedCrystal& D, const LCocycle& c);
LCocycle cocycle_of_extension_lifted(const LiftedCrystal& E);
/// Same class modulo coboundaries ((1 - Phi eta) y, nabla y), y in A^0 windowed.
bool lifted_class_equal(const LiftedCrystal& D, const LCocycle& a, const LCocycle& b, int K);

// ---------- change of lifting / appendix ----------

RingElem rebase(const RingElem& f, const AffineBase* B2);
RMat rebase(const RMat& A, const AffineBase* B2);

struct ChangeOfLifting {
    RMat eps;          // matrix of eps_{G,F}: G^*E' -> F^*E' (over base F)
    LiftedCrystal DG;  // the same crystal presented over the lifting G
};
/// eps(eta_G(e)) = sum_j p^{[j]} g^j eta_F(del^j e), g = (G - F)/p.
ChangeOfLifting change_of_lifting(const LiftedCrystal& DF, const AffineBasePtr& baseG,
                                  int depth = -1);

/// p^{-1} log(1 + p x), computed so that coefficients of valuation N-1 are
/// kept (they vanish inside log(1 + p x) at working precision).
RingElem log1p_scaled(const RingElem& x);

struct AppendixReport {
    LiftedCrystal DF, DG;
    RingElem delta;  // p^{-1} log(1 + p t^{-p} g)
    bool a = false, b = false, c = false, d = false;
    std::string detail;
};
/// The torus example: nabla e_i = e_{i-1} dt/t, Phi_F(e_i) = p^i e_i, second
/// lifting G(t) = t^p + p g(t).
AppendixReport appendix_example(u64 p, int n_basis, int N, int M,
                                const std::vector<std::pair<int, long long>>& g_terms);

// ---------- Cartier ----------

RingElem cartier1(const RingElem& h);          // on coefficient of b, mod p
RingElem cartier0(const RingElem& f);          // on closed functions mod p
RingElem inverse_cartier1(const RingElem& h);  // p^{-1} F^*(h b) coefficient
RingElem inverse_cartier0(const RingElem& f);  // pull

// ---------- descent ----------

/// E a nabla-stable submodule of F^* E' (E' given by D.base/D.n/D.nab):
/// checks stability, computes eta^{-1}(E), and compares F^*(eta^{-1} E) with E.
bool theorem_descent_check(const LiftedCrystal& D, const std::vector<RVec>& Egens, int K,
                           std::string* why = nullptr);

// ---------- two-variable demonstration ----------

/// Minimal bivariate machinery for the rank-jump semi-decision: module given
/// by generator columns over (Z/p^N)[T1, T2] truncated to degrees [0, M]^2.
struct Poly2 {
    u64 p = 0;
    int N = 0, M = 0;
    std::vector<u64> c;  // (M+1)^2, index d1 * (M+1) + d2

    static Poly2 zero(u64 p, int N, int M);
    static Poly2 monomial(u64 p, int N, int M, int d1, int d2, long long a);
    u64 get(int d1, int d2) const { return c[size_t(d1) * size_t(M + 1) + size_t(d2)]; }
    Poly2 operator*(const Poly2& o) const;  // throws WindowOverflow on escape
    Poly2 operator+(const Poly2& o) const;
    u64 eval(u64 x1, u64 x2) const;
};

struct RankJumpReport {
    std::vector<int> fiber_rank;  // minimal generator count at each point
    int generic_min = 0;          // min over the sampled points
    bool jump = false;
};
/// gens: m columns in (Poly2)^n; syz_deg bounds the degree of syzygy
/// coefficients. fiber rank at a point = m - rank_{F_p}(evaluated syzygies).
RankJumpReport two_variable_rank_jump(int n, const std::vector<std::vector<Poly2>>& gens,
                                      int syz_deg,
                                      const std::vector<std::pair<u64, u64>>& points);

// ---------- random uniform crystals ----------

/// Gauge transform of a constant diagonal crystal diag(p^{a_i}) by
/// U = C (I + pV) (times diag(t^{k_i}) on the torus): uniform by construction.
LiftedCrystal random_uniform_crystal(const AffineBasePtr& base, int n, std::uint64_t seed,
                                     int max_exp = 2, int max_twist = 1);

}  // namespace fc
