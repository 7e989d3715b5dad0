#include "fc/witt.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>

namespace fc {

namespace {

// --- polynomial helpers over F_p (dense, coefficients 0..p-1) ---

std::vector<u64> fp_polymod(std::vector<u64> a, const std::vector<u64>& m, u64 p) {
    // reduce a modulo monic m
    int dm = int(m.size()) - 1;
    while (int(a.size()) - 1 >= dm) {
        u64 lead = a.back();
        if (lead) {
            int shift = int(a.size()) - 1 - dm;
            for (int i = 0; i < dm; ++i) {
                u64 t = (lead * m[i]) % p;
                u64& ai = a[size_t(i + shift)];
                ai = (ai + p - t) % p;
            }
        }
        a.pop_back();
        while (!a.empty() && a.back() == 0) a.pop_back();
        if (a.empty()) break;
    }
    return a;
}

bool fp_divides(const std::vector<u64>& g, const std::vector<u64>& f, u64 p) {
    // monic g | f over F_p?
    return fp_polymod(f, g, p).empty();
}

bool fp_irreducible(const std::vector<u64>& f, u64 p) {
    int d = int(f.size()) - 1;
    if (d == 1) return true;
    // trial division by all monic polynomials of degree 1..d/2
    for (int e = 1; 2 * e <= d; ++e) {
        u64 count = 1;
        for (int i = 0; i < e; ++i) count *= p;
        for (u64 idx = 0; idx < count; ++idx) {
            std::vector<u64> g(size_t(e) + 1, 0);
            u64 t = idx;
            for (int i = 0; i < e; ++i) { g[size_t(i)] = t % p; t /= p; }
            g[size_t(e)] = 1;
            if (fp_divides(g, f, p)) return false;
        }
    }
    return true;
}

bool is_prime(u64 p) {
    if (p < 2) return false;
    for (u64 q = 2; q * q <= p; ++q)
        if (p % q == 0) return false;
    return true;
}

// multiply in (Z/p^N)[x]/(m), coordinates length d
std::vector<u64> ring_mul(const Zmod& z, const std::vector<u64>& m, const std::vector<u64>& a,
                          const std::vector<u64>& b) {
    int d = int(m.size());
    std::vector<u64> prod(size_t(2 * d - 1), 0);
    for (int i = 0; i < d; ++i) {
        if (!a[size_t(i)]) continue;
        for (int j = 0; j < d; ++j)
            prod[size_t(i + j)] = z.add(prod[size_t(i + j)], z.mul(a[size_t(i)], b[size_t(j)]));
    }
    // reduce by monic x^d + sum m_i x^i
    for (int k = 2 * d - 2; k >= d; --k) {
        u64 lead = prod[size_t(k)];
        if (!lead) continue;
        prod[size_t(k)] = 0;
        for (int i = 0; i < d; ++i)
            prod[size_t(k - d + i)] = z.sub(prod[size_t(k - d + i)], z.mul(lead, m[size_t(i)]));
    }
    prod.resize(size_t(d));
    return prod;
}

std::vector<u64> ring_add(const Zmod& z, const std::vector<u64>& a, const std::vector<u64>& b) {
    std::vector<u64> r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = z.add(a[i], b[i]);
    return r;
}

std::vector<u64> ring_pow(const Zmod& z, const std::vector<u64>& m, std::vector<u64> a, u64 e) {
    int d = int(m.size());
    std::vector<u64> r(size_t(d), 0);
    r[0] = 1 % z.q;
    while (e) {
        if (e & 1) r = ring_mul(z, m, r, a);
        a = ring_mul(z, m, a, a);
        e >>= 1;
    }
    return r;
}

// evaluate polynomial f (coeffs f_0..f_k in Z/p^N) at ring element s
std::vector<u64> ring_eval(const Zmod& z, const std::vector<u64>& m, const std::vector<u64>& f,
                           const std::vector<u64>& s) {
    int d = int(m.size());
    std::vector<u64> r(size_t(d), 0);
    for (int i = int(f.size()) - 1; i >= 0; --i) {
        r = ring_mul(z, m, r, s);
        r[0] = z.add(r[0], f[size_t(i)]);
    }
    return r;
}

}  // namespace

WittRingPtr WittRing::make(u64 p, int d, int N) {
    if (!is_prime(p)) throw std::invalid_argument("WittRing: p must be prime");
    if (d < 1) throw std::invalid_argument("WittRing: d must be >= 1");
    if (N < 1) throw std::invalid_argument("WittRing: N must be >= 1");
    // Rings are interned: construction is deterministic, values are immutable,
    // and keeping them alive lets elements hold plain pointers.
    static std::map<std::tuple<u64, int, int>, WittRingPtr> cache;
    static std::mutex cache_mu;
    {
        std::lock_guard<std::mutex> lk(cache_mu);
        auto it = cache.find({p, d, N});
        if (it != cache.end()) return it->second;
    }
    auto R = std::make_shared<WittRing>();
    R->p = p;
    R->d = d;
    R->N = N;
    R->z = Zmod::make(p, N);

    // first lexicographic monic irreducible of degree d over F_p,
    // coefficients (c_{d-1},...,c_0) counted upward
    std::vector<u64> mod(size_t(d), 0);
    if (d == 1) {
        mod[0] = 0;  // x
    } else {
        u64 total = 1;
        for (int i = 0; i < d; ++i) total *= p;
        bool found = false;
        for (u64 idx = 0; idx < total && !found; ++idx) {
            std::vector<u64> f(size_t(d) + 1, 0);
            u64 t = idx;
            for (int i = d - 1; i >= 0; --i) { f[size_t(i)] = t % p; t /= p; }
            f[size_t(d)] = 1;
            if (fp_irreducible(f, p)) {
                for (int i = 0; i < d; ++i) mod[size_t(i)] = f[size_t(i)];
                found = true;
            }
        }
        if (!found) throw std::logic_error("WittRing: no irreducible polynomial found");
    }
    R->modulus = mod;

    // sigma: Hensel-lift the residue Frobenius.  s_0 = x^p; Newton-iterate
    // s <- s - m(s)/m'(s) against the monic modulus m.
    const Zmod& z = R->z;
    std::vector<u64> gen(size_t(d), 0);
    if (d == 1) {
        R->sigma = {{1 % z.q}};
    } else {
        gen[1] = 1;
        std::vector<u64> s = ring_pow(z, mod, gen, p);
        // m as coefficient list over Z/p^N: c_0..c_{d-1}, 1
        std::vector<u64> mcoef(mod);
        mcoef.push_back(1);
        std::vector<u64> mprime(size_t(d), 0);  // derivative, degree d-1
        for (int i = 1; i <= d; ++i) mprime[size_t(i - 1)] = z.mul(u64(i) % z.q, mcoef[size_t(i)]);
        for (int it = 0; it < 2 * N + 4; ++it) {
            auto ms = ring_eval(z, mod, mcoef, s);
            bool zero = true;
            for (u64 a : ms)
                if (a) zero = false;
            if (zero) break;
            auto mps = ring_eval(z, mod, mprime, s);
            // invert mps (a unit since m is separable mod p)
            WittElem tmp{R.get(), mps};
            auto inv = tmp.inv();
            auto delta = ring_mul(z, mod, ms, inv.c);
            for (int i = 0; i < d; ++i) s[size_t(i)] = z.sub(s[size_t(i)], delta[size_t(i)]);
        }
        // powers of s
        R->sigma.resize(size_t(d));
        std::vector<u64> acc(size_t(d), 0);
        acc[0] = 1 % z.q;
        for (int i = 0; i < d; ++i) {
            R->sigma[size_t(i)] = acc;
            acc = ring_mul(z, mod, acc, s);
        }
        // sanity: sigma^d = id on the generator
        WittElem g{R.get(), gen};
        if (g.frobenius_iter(d) != g) throw std::logic_error("WittRing: sigma^d != id");
    }
    {
        std::lock_guard<std::mutex> lk(cache_mu);
        cache.emplace(std::make_tuple(p, d, N), R);
    }
    return R;
}

WittElem WittElem::from_int(const WittRing* R, long long v) {
    auto e = zero(R);
    long long q = (long long)R->z.q;
    long long r = v % q;
    if (r < 0) r += q;
    e.c[0] = u64(r);
    return e;
}

WittElem WittElem::operator+(const WittElem& o) const { return {R, ring_add(R->z, c, o.c)}; }

WittElem WittElem::operator-(const WittElem& o) const {
    std::vector<u64> r(c.size());
    for (size_t i = 0; i < c.size(); ++i) r[i] = R->z.sub(c[i], o.c[i]);
    return {R, r};
}

WittElem WittElem::operator-() const {
    std::vector<u64> r(c.size());
    for (size_t i = 0; i < c.size(); ++i) r[i] = R->z.neg(c[i]);
    return {R, r};
}

WittElem WittElem::operator*(const WittElem& o) const {
    return {R, ring_mul(R->z, R->modulus, c, o.c)};
}

WittElem WittElem::scal(u64 s) const {
    std::vector<u64> r(c.size());
    for (size_t i = 0; i < c.size(); ++i) r[i] = R->z.mul(c[i], s);
    return {R, r};
}

WittElem WittElem::mulp(int k) const {
    if (k < 0) throw std::invalid_argument("WittElem::mulp: negative exponent");
    return scal(R->z.pk(std::min(k, R->N)));
}

WittElem WittElem::divp(int k) const {
    std::vector<u64> r(c.size());
    for (size_t i = 0; i < c.size(); ++i) r[i] = R->z.divp(c[i], k);
    return {R, r};
}

WittElem WittElem::inv() const {
    if (!is_unit()) throw std::domain_error("WittElem: inverse of non-unit");
    // inverse in the residue field by extended Euclid would do; Newton from a
    // residue inverse is simpler.  Find b with a*b = 1 mod p by scanning the
    // residue field (p^d is tiny), then lift.
    const WittRing* Rg = R;
    WittElem a = *this;
    WittElem b = WittElem::zero(Rg);
    {
        // residue inverse via Fermat in F_{p^d}: b = a^{p^d - 2} mod p
        u64 card = 1;
        for (int i = 0; i < Rg->d; ++i) card *= Rg->p;
        b = a.pow(card - 2);
    }
    WittElem two = WittElem::from_int(Rg, 2);
    for (int k = 1; k < 2 * Rg->N; k *= 2) b = b * (two - a * b);
    return b;
}

WittElem WittElem::pow(u64 e) const {
    WittElem r = one(R), a = *this;
    while (e) {
        if (e & 1) r = r * a;
        a = a * a;
        e >>= 1;
    }
    return r;
}

WittElem WittElem::frobenius() const {
    if (R->d == 1) return *this;
    WittElem r = zero(R);
    for (int i = 0; i < R->d; ++i) {
        if (!c[size_t(i)]) continue;
        for (int j = 0; j < R->d; ++j)
            r.c[size_t(j)] = R->z.add(r.c[size_t(j)], R->z.mul(c[size_t(i)], R->sigma[size_t(i)][size_t(j)]));
    }
    return r;
}

WittElem WittElem::frobenius_iter(int e) const {
    e %= R->d;
    if (e < 0) e += R->d;
    WittElem r = *this;
    for (int i = 0; i < e; ++i) r = r.frobenius();
    return r;
}

WittElem teichmuller(const WittElem& a) {
    const WittRing* R = a.R;
    u64 card = 1;
    for (int i = 0; i < R->d; ++i) card *= R->p;
    WittElem w = a;
    for (int it = 0; it < R->N + 2; ++it) {
        WittElem next = w.pow(card);
        if (next == w) break;
        w = next;
    }
    return w;
}

std::vector<WittElem> residue_field_elements(const WittRing* R) {
    u64 card = 1;
    for (int i = 0; i < R->d; ++i) card *= R->p;
    std::vector<WittElem> out;
    out.reserve(size_t(card));
    for (u64 idx = 0; idx < card; ++idx) {
        auto e = WittElem::zero(R);
        u64 t = idx;
        for (int i = 0; i < R->d; ++i) { e.c[size_t(i)] = t % R->p; t /= R->p; }
        out.push_back(e);
    }
    return out;
}

}  // namespace fc
