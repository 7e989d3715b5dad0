#include "fc/fcrystal.hpp"

#include <algorithm>

namespace fc {

FCrystalPoint FCrystalPoint::make(const WittRing* R, const Mat& P, int rho) {
    if (P.rows != P.cols) throw std::invalid_argument("FCrystalPoint: square matrix required");
    if (det(P).is_zero())
        throw PrecisionError("FCrystalPoint: Frobenius not certified invertible over the fraction ring");
    return {R, P.rows, P, rho};
}

FCrystalPoint FCrystalPoint::unit(const WittRing* R, int twist) {
    return {R, 1, Mat::identity(R, 1), twist};
}

FCrystalPoint FCrystalPoint::dual() const {
    WittElem dt = det(P);
    int vd = dt.val();
    if (vd >= R->N) throw PrecisionError("dual: determinant not certified at precision");
    WittElem u = dt.divp(vd);
    Mat Pd = adjugate(P).transpose().scal(u.inv());
    return {R, n, Pd, vd - rho};
}

FCrystalPoint FCrystalPoint::tensor(const FCrystalPoint& o) const {
    return {R, n * o.n, kron(P, o.P), rho + o.rho};
}

FCrystalPoint FCrystalPoint::direct_sum(const FCrystalPoint& o) const {
    // align denominators
    int rr = std::max(rho, o.rho);
    Mat A = P.mulp(rr - rho), B = o.P.mulp(rr - o.rho);
    Mat S(R, n + o.n, n + o.n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) S.at(i, j) = A.at(i, j);
    for (int i = 0; i < o.n; ++i)
        for (int j = 0; j < o.n; ++j) S.at(n + i, n + j) = B.at(i, j);
    return {R, n + o.n, S, rr};
}

FCrystalPoint FCrystalPoint::normalized() const {
    int v = P.min_val();
    if (v == 0) return *this;
    return {R, n, P.divp(v), rho - v};
}

bool FCrystalPoint::operator==(const FCrystalPoint& o) const {
    if (n != o.n) return false;
    // same crystal iff the presentations agree after aligning denominators;
    // p-multiplication is exact at the working precision (division is not)
    int t = rho - o.rho;
    Mat A = P, B = o.P;
    if (t >= 0)
        B = B.mulp(t);
    else
        A = A.mulp(-t);
    return A == B;
}

bool FCrystalPoint::equal_mod(const FCrystalPoint& o, int k) const {
    if (n != o.n || k <= 0) return n == o.n;
    int t = rho - o.rho;
    Mat A = P, B = o.P;
    if (t >= 0)
        B = B.mulp(t);
    else
        A = A.mulp(-t);
    Mat diff = A - B;
    return diff.is_zero() || diff.min_val() >= std::min(k, R->N);
}

int FCrystalPoint::r_min() const {
    auto e = snf_exponents(P);
    return e.front() - rho;
}

int FCrystalPoint::r_max() const {
    auto e = snf_exponents(P);
    int emax = e.back();
    if (emax >= R->N) throw PrecisionError("FCrystalPoint: Frobenius degenerate at precision");
    return emax - rho;
}

Lattice filtration_N(const FCrystalPoint& D, int r) {
    const WittRing* R = D.R;
    int s = r + D.rho;
    auto e = snf_exponents(D.P);
    if (e.back() >= R->N) throw PrecisionError("filtration_N: Frobenius degenerate at precision");
    if (s <= e.front()) return Lattice::make(R, -s, howell(D.P));
    if (s >= e.back()) return Lattice::standard(R, D.n);
    Lattice img = Lattice::make(R, -s, howell(D.P));
    Lattice res = lattice_intersection(Lattice::standard(R, D.n), img);
    return res.with_offset(0);  // N_r is inside W^n
}

Lattice filtration_M(const FCrystalPoint& D, int r) {
    const WittRing* R = D.R;
    int s = r + D.rho;
    SNF sn = smith_normal_form(D.P);
    if (sn.exps.back() >= R->N) throw PrecisionError("filtration_M: Frobenius degenerate at precision");
    std::vector<int> exps;
    for (int ei : sn.exps) exps.push_back(std::max(s - ei, 0));
    return Lattice::make(R, 0, sn.V * Mat::diag_p(R, exps));
}

bool filtration_isomorphism_check(const FCrystalPoint& D, int r) {
    Lattice M = filtration_M(D, r);
    // p^{-r}Phi on x in F*D coordinates: p^{-r-rho} P x
    Mat img = D.P * M.basis;
    Lattice image = Lattice::make(D.R, M.offset - (r + D.rho), img);
    return lattice_equal(image, filtration_N(D, r));
}

std::vector<int> hodge_polygon(const FCrystalPoint& D) {
    int v = D.P.min_val();
    auto e = snf_exponents(D.P.divp(v));
    for (auto& x : e) x += v - D.rho;
    return e;
}

std::vector<Slope> newton_polygon(const FCrystalPoint& D) {
    const WittRing* R = D.R;
    int d = R->d, n = D.n, N = R->N;
    const int guard = 3;
    // phi_k = p^{-d rho} P sigma(P) ... sigma^{d-1}(P), a genuinely linear map
    Mat Pk = D.P;
    for (int i = 1; i < d; ++i) Pk = Pk * D.P.frobenius(i);
    auto coeff = char_poly(Pk);
    // Newton points (j, v(c_j) - d*rho*(n-j)); c_n = 1
    std::vector<std::pair<long long, long long>> pts;
    for (int j = 0; j <= n; ++j) {
        int v = coeff[size_t(j)].val();
        if (v >= N) continue;  // treated as an exact zero coefficient
        if (v > N - guard)
            throw PrecisionError("newton_polygon: coefficient valuation not certified");
        pts.push_back({j, (long long)v - (long long)d * D.rho * (n - j)});
    }
    if (pts.empty() || pts.front().first != 0)
        throw PrecisionError("newton_polygon: constant coefficient vanishes at precision");
    // lower convex hull from x = 0 to x = n
    std::vector<std::pair<long long, long long>> hull;
    for (auto& pt : pts) {
        while (hull.size() >= 2) {
            auto& a = hull[hull.size() - 2];
            auto& b = hull.back();
            // keep convex: slope(a,b) <= slope(b,pt)
            if ((b.second - a.second) * (pt.first - b.first) >
                (pt.second - b.second) * (b.first - a.first))
                hull.pop_back();
            else
                break;
        }
        hull.push_back(pt);
    }
    // hull slopes are the negatives of the eigenvalue valuations
    std::vector<Slope> slopes;
    for (size_t i = 1; i < hull.size(); ++i) {
        long long dx = hull[i].first - hull[i - 1].first;
        long long dy = hull[i].second - hull[i - 1].second;
        for (long long k = 0; k < dx; ++k) slopes.push_back(Slope::of(-dy, dx * d));
    }
    std::reverse(slopes.begin(), slopes.end());
    return slopes;
}

bool newton_above_hodge(const FCrystalPoint& D) {
    auto h = hodge_polygon(D);
    auto nw = newton_polygon(D);
    if (h.size() != nw.size()) return false;
    // compare partial sums with exact rational arithmetic
    long long accn = 0, accd = 1, hs = 0;
    for (size_t k = 0; k < h.size(); ++k) {
        hs += h[k];
        long long nn = accn * nw[k].den + nw[k].num * accd;
        long long dd = accd * nw[k].den;
        long long g = std::gcd(nn < 0 ? -nn : nn, dd);
        if (g > 1) { nn /= g; dd /= g; }
        accn = nn;
        accd = dd;
        bool last = (k + 1 == h.size());
        if (last) {
            if (accn != hs * accd) return false;  // endpoints must match
        } else {
            if (accn < hs * accd) return false;  // Newton below Hodge
        }
    }
    return true;
}

Mat lin_lattice(const Mat& B) {
    const WittRing* R = B.R;
    int d = R->d;
    auto R1 = WittRing::make(R->p, 1, R->N);
    std::vector<std::vector<WittElem>> cols;
    for (int c = 0; c < B.cols; ++c) {
        auto b = B.col_vec(c);
        std::vector<WittElem> xj = b;
        for (int j = 0; j < d; ++j) {
            cols.push_back(to_linear_coords(R1.get(), xj));
            if (j + 1 < d)
                for (auto& w : xj) w = w * WittElem::gen(R);
        }
    }
    return Mat::from_cols(R1.get(), d * B.rows, cols);
}

namespace {

struct SyntomicCore {
    const WittRing* R1 = nullptr;
    Mat Cmap;       // matrix of 1 - Phi.eta : N_0 -> N_{(-inf)} in Z_p bases
    Mat img_cols;   // images of the N_0 basis in p^{-c}-scaled ambient coords
    Mat LBinf;      // Z_p basis of N_{(-inf)} in the same scaled coords
    Mat LB0;        // Z_p basis of N_0 (ambient coords, offset 0)
    int c = 0;      // common ambient offset (everything stored at scale p^{-c})
};

SyntomicCore syntomic_core(const FCrystalPoint& D) {
    const WittRing* R = D.R;
    auto R1p = WittRing::make(R->p, 1, R->N);
    SyntomicCore out;
    out.R1 = R1p.get();
    Lattice N0 = filtration_N(D, 0).with_offset(0);
    Mat Binf = howell(D.P);  // N_{(-inf)} = p^{-rho} colspan(P)
    int c = std::min(0, -D.rho);
    out.c = c;
    // scaled target basis: p^{-c} * p^{-rho} Binf = p^{-rho-c} Binf
    Mat Binf_c = Binf.mulp(-D.rho - c);
    out.LBinf = lin_lattice(Binf_c);
    out.LB0 = lin_lattice(N0.basis);
    // images of each Z_p-generator x^j b of N_0: p^{-c}(v - p^{-rho}P sigma(v))
    int d = R->d;
    std::vector<std::vector<WittElem>> img;
    for (int col = 0; col < N0.basis.cols; ++col) {
        auto b = N0.basis.col_vec(col);
        std::vector<WittElem> xj = b;
        for (int j = 0; j < d; ++j) {
            std::vector<WittElem> sv = xj;
            for (auto& w : sv) w = w.frobenius();
            auto Pv = D.P.apply(sv);
            std::vector<WittElem> w(size_t(D.n), WittElem::zero(R));
            for (int i = 0; i < D.n; ++i)
                w[size_t(i)] = xj[size_t(i)].mulp(-c) - Pv[size_t(i)].mulp(-D.rho - c);
            img.push_back(to_linear_coords(out.R1, w));
            if (j + 1 < d)
                for (auto& x : xj) x = x * WittElem::gen(R);
        }
    }
    out.img_cols = Mat::from_cols(out.R1, d * D.n, img);
    // coordinates of images in the target basis
    Mat C(out.R1, out.LBinf.cols, out.img_cols.cols);
    for (int j = 0; j < out.img_cols.cols; ++j) {
        auto y = solve(out.LBinf, out.img_cols.col_vec(j));
        if (!y) throw PrecisionError("syntomic: image escaped the target lattice at precision");
        for (int i = 0; i < C.rows; ++i) C.at(i, j) = (*y)[size_t(i)];
    }
    out.Cmap = C;
    return out;
}

}  // namespace

SyntomicReport syntomic_point(const FCrystalPoint& D) {
    auto core = syntomic_core(D);
    SyntomicReport rep;
    rep.precision = D.R->N;
    rep.H0 = kernel_module_of_matrix(core.Cmap);
    rep.H1 = cokernel_of_matrix(core.Cmap);
    Lattice Linf{core.R1, core.LBinf.rows, core.c, howell(core.LBinf)};
    Lattice L0{core.R1, core.LB0.rows, 0, howell(core.LB0)};
    rep.T0 = lattice_quotient(Linf, L0);
    return rep;
}

FiniteModule hom_unit(const FCrystalPoint& D) { return syntomic_point(D).H0; }
FiniteModule ext_unit(const FCrystalPoint& D) { return syntomic_point(D).H1; }

FCrystalPoint extension_of_cocycle(const FCrystalPoint& D, const Cocycle& x) {
    const WittRing* R = D.R;
    // x must lie in N_{(-inf)} = p^{-rho} colspan(P)
    Lattice Ninf = Lattice::make(R, -D.rho, howell(D.P));
    if (!lattice_member(Ninf, x.off, x.x))
        throw std::invalid_argument("extension_of_cocycle: class not in N_(-inf)");
    // Phi_E = [[Phi, p^{off} x],[0,1]]; pick the smallest denominator
    // exponent keeping P_E = p^{rho_E} Phi_E integral
    int rhoE = std::max({D.rho, 0, -x.off});
    Mat PE(R, D.n + 1, D.n + 1);
    for (int i = 0; i < D.n; ++i)
        for (int j = 0; j < D.n; ++j) PE.at(i, j) = D.P.at(i, j).mulp(rhoE - D.rho);
    for (int i = 0; i < D.n; ++i) PE.at(i, D.n) = x.x[size_t(i)].mulp(rhoE + x.off);
    PE.at(D.n, D.n) = WittElem::one(R).mulp(rhoE);
    return FCrystalPoint::make(R, PE, rhoE);
}

Cocycle cocycle_of_extension(const FCrystalPoint& E) {
    const WittRing* R = E.R;
    int n = E.n - 1;
    if (E.rho < 0)
        throw std::invalid_argument("cocycle_of_extension: integral presentation with unit quotient needs rho >= 0");
    for (int j = 0; j < n; ++j)
        if (!E.P.at(n, j).is_zero())
            throw std::invalid_argument("cocycle_of_extension: last row not (0,...,0,1)");
    if (E.P.at(n, n) != WittElem::one(R).mulp(E.rho))
        throw std::invalid_argument("cocycle_of_extension: quotient is not the unit crystal");
    // class = Phi_E(e_{n+1}) - e_{n+1} projected to D = p^{-rho} * (top-right column)
    Cocycle c;
    c.off = -E.rho;
    for (int i = 0; i < n; ++i) c.x.push_back(E.P.at(i, n));
    return c;
}

bool cocycle_classes_equal(const FCrystalPoint& D, const Cocycle& a, const Cocycle& b) {
    const WittRing* R = D.R;
    auto core = syntomic_core(D);
    // difference vector in the p^{-c}-scaled ambient coordinates
    int off = std::min(a.off, b.off);
    if (off < core.c)
        throw std::invalid_argument("cocycle_classes_equal: class outside the ambient scale");
    std::vector<WittElem> diff(size_t(D.n), WittElem::zero(R));
    for (int i = 0; i < D.n; ++i)
        diff[size_t(i)] =
            a.x[size_t(i)].mulp(a.off - core.c) - b.x[size_t(i)].mulp(b.off - core.c);
    auto lin = to_linear_coords(core.R1, diff);
    return in_span(core.img_cols, lin);
}

ExactnessVerdict exactness_check(const FCrystalPoint& Dsub, const FCrystalPoint& D,
                                 const FCrystalPoint& Dquot, const CrystalMap& f,
                                 const CrystalMap& g) {
    // morphism preconditions: f Phi' = Phi sigma(f), g Phi = Phi'' sigma(g), g f = 0
    {
        int m1 = std::max(D.rho, Dsub.rho);
        Mat lhs = (f.A * Dsub.P).mulp(m1 - Dsub.rho);
        Mat rhs = (D.P * f.A.frobenius()).mulp(m1 - D.rho);
        if (lhs != rhs) return {false, 0, "f does not commute with the Frobenii"};
        int m2 = std::max(D.rho, Dquot.rho);
        Mat lhs2 = (g.A * D.P).mulp(m2 - D.rho);
        Mat rhs2 = (Dquot.P * g.A.frobenius()).mulp(m2 - Dquot.rho);
        if (lhs2 != rhs2) return {false, 0, "g does not commute with the Frobenii"};
        if (!(g.A * f.A).is_zero()) return {false, 0, "g o f != 0"};
        if (kernel_saturated(f.A).cols != 0) return {false, 0, "f not injective"};
    }
    int lo = std::min({Dsub.r_min(), D.r_min(), Dquot.r_min()}) - 1;
    int hi = std::max({Dsub.r_max(), D.r_max(), Dquot.r_max()}) + 1;
    for (int r = lo; r <= hi; ++r) {
        Lattice Ns = filtration_N(Dsub, r), Nm = filtration_N(D, r), Nq = filtration_N(Dquot, r);
        // surjectivity: g(N_r(D)) = N_r(D'')
        {
            Mat img = g.A * Nm.basis;
            int ioff = Nm.offset - g.den;
            int o = std::min(ioff, Nq.offset);
            if (!span_equal(img.mulp(ioff - o), Nq.basis.mulp(Nq.offset - o)))
                return {false, r, "N_r(D) -> N_r(D'') not surjective"};
        }
        // middle: f(N_r(D')) = ker(g) cap N_r(D)
        {
            Mat gB = g.A * Nm.basis;
            Mat Y = kernel_saturated(gB);
            Mat kerpart = Nm.basis * Y;  // at offset Nm.offset
            Mat fimg = f.A * Ns.basis;   // at offset Ns.offset - f.den
            int ioff = Ns.offset - f.den;
            int o = std::min(ioff, Nm.offset);
            if (!span_equal(fimg.mulp(ioff - o), kerpart.mulp(Nm.offset - o)))
                return {false, r, "middle exactness fails"};
        }
    }
    return {true, 0, ""};
}

FrobeniusGauge gauge_of_crystal(const FCrystalPoint& D) {
    FrobeniusGauge G;
    G.r_min = D.r_min();
    G.r_max = D.r_max();
    for (int r = G.r_min; r <= G.r_max; ++r) G.D_r.push_back(filtration_N(D, r));
    G.axioms_ok = true;
    // f = inclusion D_r -> D_{r+1}, v = p : D_r -> D_{r-1}; fv = vf = p is
    // automatic once the inclusions hold: check p D_{r+1} inside D_r inside D_{r+1}
    for (size_t i = 0; i + 1 < G.D_r.size(); ++i) {
        if (!lattice_subset(G.D_r[i], G.D_r[i + 1])) {
            G.axioms_ok = false;
            G.detail = "N_r not increasing";
            return G;
        }
        if (!lattice_subset(G.D_r[i + 1].scaled(1), G.D_r[i])) {
            G.axioms_ok = false;
            G.detail = "p N_{r+1} not inside N_r";
            return G;
        }
    }
    // boundary: f iso at the top (N_{r_max} = N_{r_max+1}), v iso at the bottom
    if (!lattice_equal(filtration_N(D, G.r_max + 1), G.D_r.back())) {
        G.axioms_ok = false;
        G.detail = "top boundary not stable";
        return G;
    }
    if (!lattice_equal(filtration_N(D, G.r_min - 1), G.D_r.front().scaled(1))) {
        G.axioms_ok = false;
        G.detail = "bottom boundary not p-scaled";
        return G;
    }
    // Frobenius identification: N_{r_min} = p^{-r_min} Phi(F*D)
    Lattice ident = Lattice::make(D.R, -(G.r_min + D.rho), howell(D.P));
    if (!lattice_equal(ident, G.D_r.front())) {
        G.axioms_ok = false;
        G.detail = "end identification fails";
    }
    return G;
}

Lattice lattice_tensor(const Lattice& a, const Lattice& b) {
    return Lattice::make(a.R, a.offset + b.offset, kron(a.basis, b.basis));
}

Lattice tensor_filtration_rhs(const FCrystalPoint& D, const FCrystalPoint& Dp, int r) {
    int lo = r - Dp.r_max(), hi = D.r_max();
    if (lo > hi) lo = hi;
    Lattice acc = lattice_tensor(filtration_N(D, lo), filtration_N(Dp, r - lo));
    for (int i = lo + 1; i <= hi; ++i)
        acc = lattice_sum(acc, lattice_tensor(filtration_N(D, i), filtration_N(Dp, r - i)));
    return acc;
}

Lattice lattice_dual_bound(const Lattice& L, int c) {
    const WittRing* R = L.R;
    WittElem dt = det(L.basis);
    int vd = dt.val();
    if (vd >= R->N) throw PrecisionError("lattice_dual_bound: determinant not certified");
    Mat inv_scaled = adjugate(L.basis).scal(dt.divp(vd).inv());  // = p^{vd} B^{-1}
    return Lattice::make(R, c - L.offset - vd, inv_scaled.transpose());
}

Lattice dual_filtration_rhs(const FCrystalPoint& D, int r) {
    int lo = D.r_min(), hi = D.r_max();
    // functionals carrying N_s(D) into N_{r+s} of the unit crystal
    auto bound = [&](int s) {
        return lattice_dual_bound(filtration_N(D, s), std::max(0, -(r + s)));
    };
    Lattice acc = bound(lo);
    for (int s = lo + 1; s <= hi; ++s) acc = lattice_intersection(acc, bound(s));
    return acc;
}

}  // namespace fc
