#include "fc/poly_fp.hpp"

#include <algorithm>
#include <stdexcept>

namespace fc {

namespace {
u64 inv_mod_p(u64 a, u64 p) {
    // Fermat inverse; p prime, a != 0 mod p
    u64 r = 1, b = a % p, e = p - 2;
    while (e) {
        if (e & 1) r = (r * b) % p;
        b = (b * b) % p;
        e >>= 1;
    }
    return r;
}
}  // namespace

PolyFp PolyFp::constant(u64 p, u64 a) {
    PolyFp f{p, {a % p}};
    f.normalize();
    return f;
}

PolyFp PolyFp::monomial(u64 p, int deg, u64 a) {
    if (deg < 0) throw std::invalid_argument("PolyFp::monomial: negative degree");
    PolyFp f{p, std::vector<u64>(size_t(deg) + 1, 0)};
    f.c[size_t(deg)] = a % p;
    f.normalize();
    return f;
}

void PolyFp::normalize() {
    while (!c.empty() && c.back() % p == 0) c.pop_back();
    for (u64& x : c) x %= p;
}

PolyFp PolyFp::operator+(const PolyFp& o) const {
    PolyFp r{p, c};
    if (o.c.size() > r.c.size()) r.c.resize(o.c.size(), 0);
    for (size_t i = 0; i < o.c.size(); ++i) r.c[i] = (r.c[i] + o.c[i]) % p;
    r.normalize();
    return r;
}

PolyFp PolyFp::operator-(const PolyFp& o) const { return *this + o.scal(p - 1); }

PolyFp PolyFp::operator*(const PolyFp& o) const {
    if (is_zero() || o.is_zero()) return zero(p);
    PolyFp r{p, std::vector<u64>(c.size() + o.c.size() - 1, 0)};
    for (size_t i = 0; i < c.size(); ++i)
        for (size_t j = 0; j < o.c.size(); ++j) r.c[i + j] = (r.c[i + j] + c[i] * o.c[j]) % p;
    r.normalize();
    return r;
}

PolyFp PolyFp::scal(u64 s) const {
    PolyFp r{p, c};
    for (u64& x : r.c) x = (x * (s % p)) % p;
    r.normalize();
    return r;
}

PolyFp PolyFp::monic() const {
    if (is_zero()) return *this;
    return scal(inv_mod_p(lead(), p));
}

void PolyFp::divmod(const PolyFp& a, const PolyFp& b, PolyFp& q, PolyFp& r) {
    if (b.is_zero()) throw std::domain_error("PolyFp::divmod: division by zero");
    u64 p = a.p;
    q = zero(p);
    r = a;
    u64 binv = inv_mod_p(b.lead(), p);
    while (!r.is_zero() && r.deg() >= b.deg()) {
        int k = r.deg() - b.deg();
        u64 f = (r.lead() * binv) % p;
        PolyFp t = PolyFp::monomial(p, k, f);
        q = q + t;
        r = r - t * b;
    }
}

PolyFp poly_gcd(PolyFp a, PolyFp b) {
    while (!b.is_zero()) {
        PolyFp q, r;
        PolyFp::divmod(a, b, q, r);
        a = b;
        b = r;
    }
    return a.monic();
}

namespace {

// One reduction pass: make A.at(t,t) divide everything in its row/column.
void snf_reduce(PolyMat& A, int t) {
    u64 p = A.p;
    for (;;) {
        // find a nonzero entry of minimal degree in the remaining block
        int bi = -1, bj = -1, bd = -1;
        for (int i = t; i < A.rows; ++i)
            for (int j = t; j < A.cols; ++j)
                if (!A.at(i, j).is_zero() && (bd < 0 || A.at(i, j).deg() < bd)) {
                    bi = i;
                    bj = j;
                    bd = A.at(i, j).deg();
                }
        if (bd < 0) return;  // block is zero
        // move pivot to (t, t)
        if (bi != t)
            for (int j = 0; j < A.cols; ++j) std::swap(A.at(t, j), A.at(bi, j));
        if (bj != t)
            for (int i = 0; i < A.rows; ++i) std::swap(A.at(i, t), A.at(i, bj));
        bool clean = true;
        // clear column t
        for (int i = t + 1; i < A.rows; ++i) {
            if (A.at(i, t).is_zero()) continue;
            PolyFp q, r;
            PolyFp::divmod(A.at(i, t), A.at(t, t), q, r);
            for (int j = 0; j < A.cols; ++j) A.at(i, j) = A.at(i, j) - q * A.at(t, j);
            if (!A.at(i, t).is_zero()) clean = false;
        }
        if (!clean) continue;
        // clear row t
        for (int j = t + 1; j < A.cols; ++j) {
            if (A.at(t, j).is_zero()) continue;
            PolyFp q, r;
            PolyFp::divmod(A.at(t, j), A.at(t, t), q, r);
            for (int i = 0; i < A.rows; ++i) A.at(i, j) = A.at(i, j) - q * A.at(i, t);
            if (!A.at(t, j).is_zero()) clean = false;
        }
        if (!clean) continue;
        // pivot must divide every remaining entry; otherwise fold a witness in
        bool divides_all = true;
        for (int i = t + 1; i < A.rows && divides_all; ++i)
            for (int j = t + 1; j < A.cols && divides_all; ++j) {
                PolyFp q, r;
                if (A.at(i, j).is_zero()) continue;
                PolyFp::divmod(A.at(i, j), A.at(t, t), q, r);
                if (!r.is_zero()) {
                    for (int jj = 0; jj < A.cols; ++jj) A.at(t, jj) = A.at(t, jj) + A.at(i, jj);
                    divides_all = false;
                }
            }
        if (divides_all) return;
        (void)p;
    }
}

}  // namespace

std::vector<PolyFp> poly_snf_divisors(PolyMat A) {
    int m = std::min(A.rows, A.cols);
    std::vector<PolyFp> out;
    for (int t = 0; t < m; ++t) {
        snf_reduce(A, t);
        if (A.at(t, t).is_zero()) break;
        out.push_back(A.at(t, t).monic());
    }
    return out;
}

int poly_rank(const PolyMat& A) { return int(poly_snf_divisors(A).size()); }

}  // namespace fc
