#pragma once

#include <memory>
#include <vector>

#include "fc/zmod.hpp"

namespace fc {

struct WittRing;
using WittRingPtr = std::shared_ptr<const WittRing>;

/// The ring W_N(F_{p^d}) = (Z/p^N)[x]/(m(x)), m a lift of the first
/// lexicographic monic irreducible polynomial of degree d over F_p.
/// The Frobenius automorphism sigma is stored as the image of the generator,
/// obtained by Hensel lifting a -> a^p from the residue field.
struct WittRing {
    u64 p;
    int d;
    int N;
    Zmod z;                               // Z/p^N scalar arithmetic
    std::vector<u64> modulus;             // c_0..c_{d-1}; m = x^d + sum c_i x^i
    std::vector<std::vector<u64>> sigma;  // sigma[i] = coordinates of s^i, s = sigma(x)

    static WittRingPtr make(u64 p, int d, int N);

    bool same(const WittRing& o) const { return p == o.p && d == o.d && N == o.N; }
};

struct WittElem {
    const WittRing* R = nullptr;
    std::vector<u64> c;  // length d, coordinates in the power basis

    WittElem() = default;
    WittElem(const WittRing* ring, std::vector<u64> coords) : R(ring), c(std::move(coords)) {}

    static WittElem zero(const WittRing* R) { return {R, std::vector<u64>(size_t(R->d), 0)}; }
    static WittElem one(const WittRing* R) {
        auto e = zero(R);
        e.c[0] = 1 % R->z.q;
        return e;
    }
    static WittElem from_int(const WittRing* R, long long v);
    static WittElem gen(const WittRing* R) {
        auto e = zero(R);
        if (R->d == 1) throw std::domain_error("WittElem::gen: d = 1 has no generator");
        e.c[1] = 1;
        return e;
    }

    bool is_zero() const {
        for (u64 a : c)
            if (a) return false;
        return true;
    }

    /// min coordinate valuation; N when zero.
    int val() const {
        int v = R->N;
        for (u64 a : c) v = std::min(v, R->z.val(a));
        return v;
    }
    bool is_unit() const { return val() == 0; }

    WittElem operator+(const WittElem& o) const;
    WittElem operator-(const WittElem& o) const;
    WittElem operator-() const;
    WittElem operator*(const WittElem& o) const;
    bool operator==(const WittElem& o) const { return c == o.c; }
    bool operator!=(const WittElem& o) const { return c != o.c; }

    WittElem scal(u64 s) const;            // multiply by scalar in Z/p^N
    WittElem mulp(int k) const;            // multiply by p^k (k >= 0)
    WittElem divp(int k) const;            // exact division by p^k
    WittElem inv() const;                  // inverse of a unit
    WittElem pow(u64 e) const;
    WittElem frobenius() const;            // sigma
    WittElem frobenius_iter(int e) const;  // sigma^e (e mod d)
};

/// Teichmueller lift of a residue-field element (given as any lift in the ring):
/// iterate w -> w^{p^d} to the fixpoint at precision N.
WittElem teichmuller(const WittElem& a);

/// Representative list of the residue field F_{p^d} (all p^d elements, coords < p).
std::vector<WittElem> residue_field_elements(const WittRing* R);

/// p^val * unit, or zero-at-precision. Negative val allowed.
struct PadicScalar {
    int v = 0;
    WittElem u;  // unit part; ignored when zero
    bool zero = true;

    static PadicScalar make_zero(const WittRing* R) { return {0, WittElem::zero(R), true}; }
    static PadicScalar of(const WittElem& w) {
        if (w.is_zero()) return make_zero(w.R);
        int k = w.val();
        return {k, w.divp(k), false};
    }
    static PadicScalar of_scaled(const WittElem& w, int denom_exp) {
        auto s = of(w);
        if (!s.zero) s.v -= denom_exp;
        return s;
    }
    WittElem integral() const {  // requires v >= 0
        if (zero) return u;      // zero elem
        if (v < 0) throw std::domain_error("PadicScalar: negative valuation not integral");
        return u.mulp(v);
    }
};

}  // namespace fc
