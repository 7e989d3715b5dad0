#include "fc/zeta.hpp"

#include <sstream>
#include <stdexcept>

namespace fc {

namespace {

PadicScalar ps_mul(const PadicScalar& a, const PadicScalar& b) {
    if (a.zero || b.zero) return PadicScalar::make_zero(a.zero ? a.u.R : b.u.R);
    PadicScalar r;
    r.zero = false;
    r.v = a.v + b.v;
    r.u = a.u * b.u;
    return r;
}

/// Numerator at denominator p^e: the integral element p^e * value.
WittElem ps_at_denom(const PadicScalar& s, int e) {
    if (s.zero) return WittElem::zero(s.u.R);
    if (s.v + e < 0) throw std::domain_error("euler factor: denominator does not clear");
    return s.u.mulp(s.v + e);
}

int ps_denom(const PadicScalar& s) { return s.zero ? 0 : std::max(0, -s.v); }

}  // namespace

EulerFactor euler_factor(const FCrystalPoint& D) {
    const WittRing* R = D.R;
    int d = R->d;
    // phi_k = Phi^d is W(k)-linear with matrix p^{-d rho} P sigma(P)...sigma^{d-1}(P)
    Mat A = D.P;
    for (int e = 1; e < d; ++e) A = A * D.P.frobenius(e);
    auto ch = char_poly(A);  // det(uI - A), coefficients c_0..c_n, c_n = 1
    EulerFactor f;
    f.R = R;
    f.c.reserve(size_t(D.n) + 1);
    // det(1 - p^{-d rho} A u): coefficient of u^m is ch[n-m] * p^{-m d rho}
    for (int m = 0; m <= D.n; ++m) {
        f.c.push_back(PadicScalar::of_scaled(ch[size_t(D.n - m)], m * d * D.rho));
        f.prec.push_back(R->N - m * d * D.rho);
    }
    return f;
}

EulerFactor euler_product(const EulerFactor& a, const EulerFactor& b) {
    if (a.R != b.R) throw std::invalid_argument("euler_product: ring mismatch");
    EulerFactor r;
    r.R = a.R;
    r.c.assign(size_t(a.degree() + b.degree()) + 1, PadicScalar::make_zero(a.R));
    r.prec.assign(r.c.size(), a.R->N);
    for (size_t m = 0; m < r.c.size(); ++m) {
        int e = 0, pr = a.R->N + 1000;
        for (size_t i = 0; i < a.c.size(); ++i) {
            if (m < i || m - i >= b.c.size()) continue;
            const PadicScalar &x = a.c[i], &y = b.c[m - i];
            e = std::max(e, ps_denom(ps_mul(x, y)));
            // x known mod p^ax, y mod p^by: xy known mod p^{min(ax+vy, by+vx)}
            if (!x.zero && !y.zero)
                pr = std::min(pr, std::min(a.prec[i] + y.v, b.prec[m - i] + x.v));
            else if (!x.zero)
                pr = std::min(pr, b.prec[m - i] + x.v);
            else if (!y.zero)
                pr = std::min(pr, a.prec[i] + y.v);
        }
        WittElem num = WittElem::zero(a.R);
        for (size_t i = 0; i < a.c.size(); ++i)
            if (m >= i && m - i < b.c.size()) num = num + ps_at_denom(ps_mul(a.c[i], b.c[m - i]), e);
        r.c[m] = PadicScalar::of_scaled(num, e);
        r.prec[m] = pr;
    }
    return r;
}

bool euler_equal(const EulerFactor& a, const EulerFactor& b) {
    if (a.R != b.R) return false;
    size_t n = std::max(a.c.size(), b.c.size());
    for (size_t m = 0; m < n; ++m) {
        PadicScalar ca = m < a.c.size() ? a.c[m] : PadicScalar::make_zero(a.R);
        PadicScalar cb = m < b.c.size() ? b.c[m] : PadicScalar::make_zero(a.R);
        int pa = m < a.prec.size() ? a.prec[m] : a.R->N;
        int pb = m < b.prec.size() ? b.prec[m] : a.R->N;
        int e = std::max(ps_denom(ca), ps_denom(cb));
        // values certified mod p^{min(pa, pb)}; numerators at denominator e
        WittElem diff = ps_at_denom(ca, e) - ps_at_denom(cb, e);
        if (!diff.is_zero() && diff.val() < std::min(pa, pb) + e) return false;
    }
    return true;
}

std::optional<int> euler_value_at_one_val(const EulerFactor& f, int guard) {
    int e = 0, pr = f.R->N;
    for (auto& s : f.c) e = std::max(e, ps_denom(s));
    for (size_t m = 0; m < f.c.size(); ++m)
        if (m < f.prec.size()) pr = std::min(pr, f.prec[m]);
    WittElem num = WittElem::zero(f.R);
    for (auto& s : f.c) num = num + ps_at_denom(s, e);
    if (num.is_zero()) return std::nullopt;
    int v = num.val();
    // the value is certified mod p^pr; its valuation v - e must sit clear of that
    if (v - e > pr - guard) return std::nullopt;
    return v - e;
}

DetLemmaReport det_lemma_check(const ModuleEndo& h, int guard) {
    const WittRing* R = h.R;
    int N = R->N;
    int f = h.free_rank, t = int(h.torsion.size()), k = h.gens();
    if (h.H.rows != k || h.H.cols != k) throw std::invalid_argument("det_lemma: shape mismatch");
    for (int e : h.torsion)
        if (e < 1 || e >= N) throw std::invalid_argument("det_lemma: torsion exponent out of range");
    // well-definedness against the relations
    for (int j = 0; j < t; ++j) {
        int ej = h.torsion[size_t(j)];
        for (int i = 0; i < k; ++i) {
            int need = i < f ? N - ej : std::max(0, h.torsion[size_t(i - f)] - ej);
            if (h.H.at(i, f + j).val() < need)
                throw std::invalid_argument("det_lemma: map does not respect the relations");
        }
    }
    DetLemmaReport rep;
    // determinant on the free part (the rational vector space)
    if (f > 0) {
        Mat Hff(R, f, f);
        for (int i = 0; i < f; ++i)
            for (int j = 0; j < f; ++j) Hff.at(i, j) = h.H.at(i, j);
        WittElem dv = det(Hff);
        if (dv.is_zero() || dv.val() > N - guard)
            throw PrecisionError("det_lemma: determinant not certifiably nonzero");
        rep.det_ord = R->d * dv.val();
    }
    // relation columns p^{e_j} g_{f+j}
    Mat Qt(R, k, t);
    for (int j = 0; j < t; ++j) Qt.at(f + j, j) = WittElem::one(R).mulp(h.torsion[size_t(j)]);
    Mat HQ = t > 0 ? h.H.hcat(Qt) : h.H;
    FiniteModule ck = cokernel_of_matrix(HQ, guard);
    if (!ck.is_finite()) throw std::domain_error("det_lemma: h is not rationally surjective");
    rep.coker_ord = ck.ord_p();
    if (t == 0) {
        rep.ker_ord = 0;
    } else {
        // Ker(h) = {x : Hx in im Q} / im Q, via the exact kernel of [H | Q]
        Mat K = kernel_saturated(HQ, guard);
        Mat X(R, k, K.cols);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < K.cols; ++j) X.at(i, j) = K.at(i, j);
        Mat Kspan = howell(X.hcat(Qt));
        Mat Z(R, Kspan.cols, t);
        for (int j = 0; j < t; ++j) {
            auto z = solve(Kspan, Qt.col_vec(j));
            if (!z) throw PrecisionError("det_lemma: relation escapes the kernel span");
            for (int i = 0; i < Kspan.cols; ++i) Z.at(i, j) = (*z)[size_t(i)];
        }
        FiniteModule km = cokernel_of_matrix(Z, guard);
        if (!km.is_finite()) throw PrecisionError("det_lemma: kernel order not certified");
        rep.ker_ord = km.ord_p();
    }
    rep.pass = rep.det_ord == rep.coker_ord - rep.ker_ord;
    return rep;
}

Det2Report det2_lemma_check(const Mat& A, const Mat& B, int guard) {
    const WittRing* R = A.R;
    int N = R->N, d = R->d, n = A.rows;
    if (A.cols != n || B.rows != n || B.cols != n)
        throw std::invalid_argument("det2_lemma: square matrices of equal size required");
    WittElem da = det(A);
    if (da.is_zero() || da.val() > N - guard)
        throw PrecisionError("det2_lemma: alpha not certifiably invertible");
    int va = da.val();
    WittElem ua = da.divp(va);
    // s = b a^{-1}: v -> S sigma(v) with S = B sigma(adj A) / sigma(det A)
    Mat S = (B * adjugate(A).frobenius(1)).scal(ua.frobenius().inv());
    // g = s^d is linear with matrix S sigma(S) ... sigma^{d-1}(S) / p^{d va}
    Mat G = S;
    for (int e = 1; e < d; ++e) G = G * S.frobenius(e);
    int den = d * va;
    // det(1 - g) = det(p^{den} I - G) / p^{n den}
    WittElem dm = det(Mat::identity(R, n).mulp(den) - G);
    if (dm.is_zero() || dm.val() > N - guard)
        throw PrecisionError("det2_lemma: 1 - g not certifiably invertible");
    Det2Report rep;
    rep.lhs_val = dm.val() - n * den;
    // right side: Z_p-linear(ized) alpha and alpha - beta
    Mat La = linearize(A, 0);
    Mat Lab = La - linearize(B, 1);
    FiniteModule cab = cokernel_of_matrix(Lab, guard);
    FiniteModule kab = kernel_module_of_matrix(Lab, guard);
    FiniteModule ca = cokernel_of_matrix(La, guard);
    FiniteModule ka = kernel_module_of_matrix(La, guard);
    if (!cab.is_finite() || !ca.is_finite())
        throw std::domain_error("det2_lemma: hypothesis violated (infinite cokernel)");
    if (kab.free_rank > 0 || ka.free_rank > 0)
        throw std::domain_error("det2_lemma: hypothesis violated (infinite kernel)");
    rep.coker_ab = cab.ord_p();
    rep.ker_ab = kab.ord_p();
    rep.coker_a = ca.ord_p();
    rep.ker_a = ka.ord_p();
    rep.pass = rep.lhs_val == rep.coker_ab - rep.ker_ab - rep.coker_a + rep.ker_a;
    return rep;
}

ClassNumberReport verify_class_number_point(const FCrystalPoint& D) {
    ClassNumberReport rep;
    rep.factor = euler_factor(D);
    rep.detail =
        "sign convention: v(det(1 - phi_k)) = ord H^1(S) - ord H^0(S) - ord T^0, "
        "from L(1) = det(1 - phi_k)^{-1} and the syntomic / unit-root exact sequences";
    auto v = euler_value_at_one_val(rep.factor);
    if (!v) {
        rep.detail = "inapplicable: 1 - phi_k not certifiably invertible; " + rep.detail;
        return rep;
    }
    rep.lhs_valuation = *v;
    SyntomicReport syn;
    try {
        syn = syntomic_point(D);
    } catch (const PrecisionError&) {
        rep.detail = "inapplicable: cohomology orders not certified; " + rep.detail;
        return rep;
    }
    if (!syn.H0.is_finite() || !syn.H1.is_finite() || !syn.T0.is_finite()) {
        rep.detail = "inapplicable: infinite cohomology module; " + rep.detail;
        return rep;
    }
    rep.applicable = true;
    rep.h0_ord = syn.H0.ord_p();
    rep.h1_ord = syn.H1.ord_p();
    rep.t0_ord = syn.T0.ord_p();
    rep.verdict = rep.lhs_valuation == rep.h1_ord - rep.h0_ord - rep.t0_ord;
    return rep;
}

}  // namespace fc
