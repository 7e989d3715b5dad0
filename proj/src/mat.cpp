#include "fc/mat.hpp"

#include <algorithm>

namespace fc {

Mat Mat::identity(const WittRing* R, int n) {
    Mat m(R, n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = WittElem::one(R);
    return m;
}

Mat Mat::diag_p(const WittRing* R, const std::vector<int>& exps) {
    int n = int(exps.size());
    Mat m(R, n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = WittElem::one(R).mulp(exps[size_t(i)]);
    return m;
}

Mat Mat::from_cols(const WittRing* R, int n, const std::vector<std::vector<WittElem>>& cols) {
    Mat m(R, n, int(cols.size()));
    for (int j = 0; j < m.cols; ++j)
        for (int i = 0; i < n; ++i) m.at(i, j) = cols[size_t(j)][size_t(i)];
    return m;
}

Mat Mat::operator*(const Mat& o) const {
    if (cols != o.rows) throw std::invalid_argument("Mat: dimension mismatch in product");
    Mat r(R, rows, o.cols);
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < cols; ++k) {
            const WittElem& x = at(i, k);
            if (x.is_zero()) continue;
            for (int j = 0; j < o.cols; ++j) r.at(i, j) = r.at(i, j) + x * o.at(k, j);
        }
    return r;
}

Mat Mat::operator+(const Mat& o) const {
    Mat r(R, rows, cols);
    for (size_t i = 0; i < a.size(); ++i) r.a[i] = a[i] + o.a[i];
    return r;
}

Mat Mat::operator-(const Mat& o) const {
    Mat r(R, rows, cols);
    for (size_t i = 0; i < a.size(); ++i) r.a[i] = a[i] - o.a[i];
    return r;
}

Mat Mat::transpose() const {
    Mat r(R, cols, rows);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) r.at(j, i) = at(i, j);
    return r;
}

Mat Mat::scal(const WittElem& s) const {
    Mat r(R, rows, cols);
    for (size_t i = 0; i < a.size(); ++i) r.a[i] = a[i] * s;
    return r;
}

Mat Mat::mulp(int k) const {
    Mat r(R, rows, cols);
    for (size_t i = 0; i < a.size(); ++i) r.a[i] = a[i].mulp(k);
    return r;
}

Mat Mat::divp(int k) const {
    Mat r(R, rows, cols);
    for (size_t i = 0; i < a.size(); ++i) r.a[i] = a[i].divp(k);
    return r;
}

Mat Mat::frobenius(int e) const {
    Mat r(R, rows, cols);
    for (size_t i = 0; i < a.size(); ++i) r.a[i] = a[i].frobenius_iter(e);
    return r;
}

Mat Mat::hcat(const Mat& o) const {
    if (rows != o.rows) throw std::invalid_argument("Mat: hcat row mismatch");
    Mat r(R, rows, cols + o.cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) r.at(i, j) = at(i, j);
        for (int j = 0; j < o.cols; ++j) r.at(i, cols + j) = o.at(i, j);
    }
    return r;
}

Mat Mat::col(int j) const { return cols_range(j, j + 1); }

Mat Mat::cols_range(int j0, int j1) const {
    Mat r(R, rows, j1 - j0);
    for (int i = 0; i < rows; ++i)
        for (int j = j0; j < j1; ++j) r.at(i, j - j0) = at(i, j);
    return r;
}

std::vector<WittElem> Mat::col_vec(int j) const {
    std::vector<WittElem> v;
    v.reserve(size_t(rows));
    for (int i = 0; i < rows; ++i) v.push_back(at(i, j));
    return v;
}

bool Mat::is_zero() const {
    for (auto& x : a)
        if (!x.is_zero()) return false;
    return true;
}

int Mat::min_val() const {
    int v = R->N;
    for (auto& x : a) v = std::min(v, x.val());
    return v;
}

std::vector<WittElem> Mat::apply(const std::vector<WittElem>& v) const {
    if (int(v.size()) != cols) throw std::invalid_argument("Mat: apply size mismatch");
    std::vector<WittElem> r(size_t(rows), WittElem::zero(R));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) r[size_t(i)] = r[size_t(i)] + at(i, j) * v[size_t(j)];
    return r;
}

SNF smith_normal_form(const Mat& A) {
    const WittRing* R = A.R;
    int N = R->N;
    Mat D = A;
    Mat U = Mat::identity(R, A.rows), V = Mat::identity(R, A.cols);
    int m = std::min(A.rows, A.cols);
    std::vector<int> exps(size_t(m), N);
    for (int k = 0; k < m; ++k) {
        // valuation-greedy pivot over the remaining block
        int bi = -1, bj = -1, bv = N;
        for (int i = k; i < D.rows; ++i)
            for (int j = k; j < D.cols; ++j) {
                int v = D.at(i, j).val();
                if (v < bv) { bv = v; bi = i; bj = j; }
            }
        if (bv >= N) break;  // remaining block is zero at precision
        // move pivot to (k, k)
        if (bi != k)
            for (int j = 0; j < D.cols; ++j) std::swap(D.at(k, j), D.at(bi, j));
        if (bi != k)
            for (int j = 0; j < U.cols; ++j) std::swap(U.at(k, j), U.at(bi, j));
        if (bj != k)
            for (int i = 0; i < D.rows; ++i) std::swap(D.at(i, k), D.at(i, bj));
        if (bj != k)
            for (int i = 0; i < V.rows; ++i) std::swap(V.at(i, k), V.at(i, bj));
        // normalize pivot to exactly p^bv
        WittElem uinv = D.at(k, k).divp(bv).inv();
        for (int j = 0; j < D.cols; ++j) D.at(k, j) = D.at(k, j) * uinv;
        for (int j = 0; j < U.cols; ++j) U.at(k, j) = U.at(k, j) * uinv;
        // clear column k below and row k to the right (all vals >= bv)
        for (int i = k + 1; i < D.rows; ++i) {
            if (D.at(i, k).is_zero()) continue;
            WittElem f = D.at(i, k).divp(bv);
            for (int j = 0; j < D.cols; ++j) D.at(i, j) = D.at(i, j) - f * D.at(k, j);
            for (int j = 0; j < U.cols; ++j) U.at(i, j) = U.at(i, j) - f * U.at(k, j);
        }
        for (int j = k + 1; j < D.cols; ++j) {
            if (D.at(k, j).is_zero()) continue;
            WittElem f = D.at(k, j).divp(bv);
            for (int i = 0; i < D.rows; ++i) D.at(i, j) = D.at(i, j) - f * D.at(i, k);
            for (int i = 0; i < V.rows; ++i) V.at(i, j) = V.at(i, j) - f * V.at(i, k);
        }
        exps[size_t(k)] = bv;
    }
    return {U, V, exps};
}

std::vector<int> snf_exponents(const Mat& A) { return smith_normal_form(A).exps; }

namespace {

WittElem det_rec(const Mat& A, const std::vector<int>& rows, unsigned colmask) {
    const WittRing* R = A.R;
    if (rows.empty()) return WittElem::one(R);
    int i = rows[0];
    std::vector<int> rest(rows.begin() + 1, rows.end());
    WittElem acc = WittElem::zero(R);
    int sign = 1;
    for (int j = 0; j < A.cols; ++j) {
        if (!(colmask & (1u << j))) continue;
        if (!A.at(i, j).is_zero()) {
            WittElem sub = det_rec(A, rest, colmask & ~(1u << j));
            WittElem term = A.at(i, j) * sub;
            acc = sign > 0 ? acc + term : acc - term;
        }
        sign = -sign;
    }
    return acc;
}

}  // namespace

WittElem det(const Mat& A) {
    if (A.rows != A.cols) throw std::invalid_argument("det: square matrix required");
    if (A.rows > 16) throw std::invalid_argument("det: matrix too large for expansion");
    std::vector<int> rows(size_t(A.rows));
    for (int i = 0; i < A.rows; ++i) rows[size_t(i)] = i;
    return det_rec(A, rows, (1u << A.rows) - 1u);
}

std::vector<WittElem> char_poly(const Mat& A) {
    if (A.rows != A.cols) throw std::invalid_argument("char_poly: square matrix required");
    const WittRing* R = A.R;
    int n = A.rows;
    // det(uI - A) = sum_k (-1)^k E_k u^{n-k}, E_k = sum of principal k-minors
    std::vector<WittElem> coeff(size_t(n) + 1, WittElem::zero(R));
    coeff[size_t(n)] = WittElem::one(R);
    for (int k = 1; k <= n; ++k) {
        WittElem ek = WittElem::zero(R);
        std::vector<int> idx(size_t(k), 0);
        for (int i = 0; i < k; ++i) idx[size_t(i)] = i;
        while (true) {
            Mat sub(R, k, k);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) sub.at(i, j) = A.at(idx[size_t(i)], idx[size_t(j)]);
            ek = ek + det(sub);
            int t = k - 1;
            while (t >= 0 && idx[size_t(t)] == n - k + t) --t;
            if (t < 0) break;
            ++idx[size_t(t)];
            for (int s = t + 1; s < k; ++s) idx[size_t(s)] = idx[size_t(s - 1)] + 1;
        }
        coeff[size_t(n - k)] = (k % 2) ? -ek : ek;
    }
    return coeff;
}

Mat adjugate(const Mat& A) {
    if (A.rows != A.cols) throw std::invalid_argument("adjugate: square matrix required");
    const WittRing* R = A.R;
    int n = A.rows;
    Mat adj(R, n, n);
    if (n == 1) {
        adj.at(0, 0) = WittElem::one(R);
        return adj;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Mat sub(R, n - 1, n - 1);
            for (int r = 0, rr = 0; r < n; ++r) {
                if (r == i) continue;
                for (int c = 0, cc = 0; c < n; ++c) {
                    if (c == j) continue;
                    sub.at(rr, cc) = A.at(r, c);
                    ++cc;
                }
                ++rr;
            }
            WittElem m = det(sub);
            adj.at(j, i) = ((i + j) % 2) ? -m : m;  // transpose of cofactors
        }
    return adj;
}

Mat kron(const Mat& A, const Mat& B) {
    Mat r(A.R, A.rows * B.rows, A.cols * B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) {
            if (A.at(i, j).is_zero()) continue;
            for (int k = 0; k < B.rows; ++k)
                for (int l = 0; l < B.cols; ++l)
                    r.at(i * B.rows + k, j * B.cols + l) = A.at(i, j) * B.at(k, l);
        }
    return r;
}

namespace {

// coordinatewise reduction mod p^v
WittElem reduce_mod(const WittElem& e, int v) {
    WittElem r = e;
    u64 pv = e.R->z.pk(v);
    for (auto& c : r.c) c %= pv;
    return r;
}

struct HowellPivot {
    int row;
    int val;
    std::vector<WittElem> col;
};

std::vector<HowellPivot> howell_pivots(const Mat& A) {
    const WittRing* R = A.R;
    int n = A.rows, N = R->N;
    std::vector<std::vector<WittElem>> active;
    for (int j = 0; j < A.cols; ++j) {
        auto c = A.col_vec(j);
        bool z = true;
        for (auto& x : c)
            if (!x.is_zero()) z = false;
        if (!z) active.push_back(c);
    }
    std::vector<HowellPivot> pivots;
    for (int i = 0; i < n; ++i) {
        int best = -1, bv = N;
        for (size_t c = 0; c < active.size(); ++c) {
            int v = active[c][size_t(i)].val();
            if (v < bv) { bv = v; best = int(c); }
        }
        if (best < 0) continue;
        std::vector<WittElem> piv = active[size_t(best)];
        active.erase(active.begin() + best);
        // normalize entry at row i to exactly p^bv
        WittElem uinv = piv[size_t(i)].divp(bv).inv();
        for (auto& x : piv) x = x * uinv;
        // eliminate row i from every remaining active column
        for (auto& c : active) {
            if (c[size_t(i)].is_zero()) continue;
            WittElem f = c[size_t(i)].divp(bv);
            for (int r = 0; r < n; ++r) c[size_t(r)] = c[size_t(r)] - f * piv[size_t(r)];
        }
        // Howell closure: p^{N-bv} * pivot has zero at row i but may carry span
        if (bv > 0) {
            std::vector<WittElem> cl(piv);
            for (auto& x : cl) x = x.mulp(N - bv);
            bool z = true;
            for (auto& x : cl)
                if (!x.is_zero()) z = false;
            if (!z) active.push_back(cl);
        }
        // drop dead columns
        for (size_t c = active.size(); c-- > 0;) {
            bool z = true;
            for (auto& x : active[c])
                if (!x.is_zero()) z = false;
            if (z) active.erase(active.begin() + long(c));
        }
        pivots.push_back({i, bv, std::move(piv)});
    }
    // canonical reduction: entries of earlier pivot columns at later pivot rows
    // are reduced modulo the pivot there
    for (size_t j = 0; j < pivots.size(); ++j) {
        int rj = pivots[j].row, vj = pivots[j].val;
        for (size_t c = 0; c < j; ++c) {
            WittElem e = pivots[c].col[size_t(rj)];
            WittElem rem = reduce_mod(e, vj);
            WittElem q = (e - rem).divp(vj);
            if (q.is_zero()) continue;
            for (int r = 0; r < n; ++r)
                pivots[c].col[size_t(r)] = pivots[c].col[size_t(r)] - q * pivots[j].col[size_t(r)];
        }
    }
    return pivots;
}

}  // namespace

Mat howell(const Mat& A) {
    auto pv = howell_pivots(A);
    std::vector<std::vector<WittElem>> cols;
    for (auto& p : pv) cols.push_back(p.col);
    return Mat::from_cols(A.R, A.rows, cols);
}

bool in_span(const Mat& A, const std::vector<WittElem>& v) {
    auto pv = howell_pivots(A);
    std::vector<WittElem> w = v;
    int n = A.rows;
    size_t next = 0;
    for (int i = 0; i < n; ++i) {
        while (next < pv.size() && pv[next].row < i) ++next;
        if (w[size_t(i)].is_zero()) continue;
        if (next >= pv.size() || pv[next].row != i) return false;
        int vi = w[size_t(i)].val();
        if (vi < pv[next].val) return false;
        WittElem f = w[size_t(i)].divp(pv[next].val);
        for (int r = 0; r < n; ++r) w[size_t(r)] = w[size_t(r)] - f * pv[next].col[size_t(r)];
    }
    for (auto& x : w)
        if (!x.is_zero()) return false;
    return true;
}

bool span_subset(const Mat& A, const Mat& B) {
    auto pv = howell_pivots(B);
    Mat H = Mat::from_cols(B.R, B.rows, [&] {
        std::vector<std::vector<WittElem>> cols;
        for (auto& p : pv) cols.push_back(p.col);
        return cols;
    }());
    for (int j = 0; j < A.cols; ++j)
        if (!in_span(H, A.col_vec(j))) return false;
    return true;
}

bool span_equal(const Mat& A, const Mat& B) { return howell(A) == howell(B); }

std::optional<std::vector<WittElem>> solve(const Mat& A, const std::vector<WittElem>& v) {
    const WittRing* R = A.R;
    int N = R->N;
    SNF s = smith_normal_form(A);
    auto c = s.U.apply(v);
    int m = std::min(A.rows, A.cols);
    std::vector<WittElem> y(size_t(A.cols), WittElem::zero(R));
    for (int j = 0; j < A.rows; ++j) {
        int e = j < m ? s.exps[size_t(j)] : N;
        if (e >= N) {
            if (!c[size_t(j)].is_zero()) return std::nullopt;
        } else {
            if (c[size_t(j)].val() < e) return std::nullopt;
            y[size_t(j)] = c[size_t(j)].divp(e);
        }
    }
    return s.V.apply(y);
}

Mat kernel_truncation(const Mat& A) {
    const WittRing* R = A.R;
    int N = R->N;
    SNF s = smith_normal_form(A);
    int m = std::min(A.rows, A.cols);
    std::vector<std::vector<WittElem>> cols;
    for (int j = 0; j < A.cols; ++j) {
        int e = j < m ? s.exps[size_t(j)] : N;
        if (e == 0) continue;  // p^N * column is zero
        auto c = s.V.col_vec(j);
        if (e < N)
            for (auto& x : c) x = x.mulp(N - e);
        cols.push_back(c);
    }
    return Mat::from_cols(R, A.cols, cols);
}

Mat kernel_saturated(const Mat& A, int guard) {
    const WittRing* R = A.R;
    int N = R->N;
    SNF s = smith_normal_form(A);
    int m = std::min(A.rows, A.cols);
    std::vector<std::vector<WittElem>> cols;
    for (int j = 0; j < A.cols; ++j) {
        int e = j < m ? s.exps[size_t(j)] : N;
        if (e >= N) {
            cols.push_back(s.V.col_vec(j));
        } else if (e > N - guard) {
            throw PrecisionError("kernel_saturated: elementary divisor too close to precision");
        }
    }
    return Mat::from_cols(R, A.cols, cols);
}

Mat kernel_mod(const Mat& A, int s) {
    if (s < 0 || s > A.R->N) throw std::invalid_argument("kernel_mod: bad exponent");
    return kernel_truncation(A.mulp(A.R->N - s));
}

Mat linearize(const Mat& A, int twist) {
    const WittRing* R = A.R;
    int d = R->d;
    auto R1p = WittRing::make(R->p, 1, R->N);
    const WittRing* R1 = R1p.get();
    Mat L(R1, d * A.rows, d * A.cols);
    // powers of the generator, twisted
    std::vector<WittElem> xj(size_t(d), WittElem::one(R));
    for (int j = 1; j < d; ++j) xj[size_t(j)] = xj[size_t(j - 1)] * WittElem::gen(R);
    for (auto& w : xj) w = w.frobenius_iter(twist);
    for (int i = 0; i < A.cols; ++i)
        for (int j = 0; j < d; ++j) {
            int colidx = i * d + j;
            for (int r = 0; r < A.rows; ++r) {
                WittElem w = A.at(r, i) * xj[size_t(j)];
                for (int jj = 0; jj < d; ++jj) {
                    WittElem v = WittElem::zero(R1);
                    v.c[0] = w.c[size_t(jj)];
                    L.at(r * d + jj, colidx) = v;
                }
            }
        }
    return L;
}

std::vector<WittElem> to_linear_coords(const WittRing* R1, const std::vector<WittElem>& v) {
    std::vector<WittElem> out;
    for (auto& w : v)
        for (u64 c : w.c) {
            WittElem e = WittElem::zero(R1);
            e.c[0] = c;
            out.push_back(e);
        }
    return out;
}

std::vector<WittElem> from_linear_coords(const WittRing* R, const std::vector<WittElem>& v) {
    int d = R->d;
    if (v.size() % size_t(d) != 0) throw std::invalid_argument("from_linear_coords: size mismatch");
    std::vector<WittElem> out;
    for (size_t i = 0; i < v.size(); i += size_t(d)) {
        WittElem w = WittElem::zero(R);
        for (int j = 0; j < d; ++j) w.c[size_t(j)] = v[i + size_t(j)].c[0];
        out.push_back(w);
    }
    return out;
}

}  // namespace fc
