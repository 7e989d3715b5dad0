#pragma once

#include <cstdint>
#include <stdexcept>

namespace fc {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

/// Arithmetic in Z/p^N with p^N < 2^63.
struct Zmod {
    u64 p = 0;
    u64 q = 0;  // p^N
    int N = 0;

    static Zmod make(u64 p, int N) {
        if (N < 1) throw std::invalid_argument("Zmod: N must be >= 1");
        Zmod z;
        z.p = p;
        z.N = N;
        u64 q = 1;
        for (int i = 0; i < N; ++i) {
            if (q > (u64(1) << 62) / p) throw std::invalid_argument("Zmod: p^N too large");
            q *= p;
        }
        z.q = q;
        return z;
    }

    u64 add(u64 a, u64 b) const {
        u64 s = a + b;
        return s >= q ? s - q : s;
    }
    u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + q - b; }
    u64 neg(u64 a) const { return a == 0 ? 0 : q - a; }
    u64 mul(u64 a, u64 b) const { return u64((u128(a) * b) % q); }

    u64 pow(u64 a, u64 e) const {
        u64 r = 1 % q;
        a %= q;
        while (e) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }

    /// p-adic valuation in [0, N]; val(0) = N.
    int val(u64 a) const {
        if (a == 0) return N;
        int v = 0;
        while (a % p == 0) { a /= p; ++v; }
        return v;
    }

    bool is_unit(u64 a) const { return a % p != 0; }

    /// Inverse of a unit, by Hensel lifting the inverse mod p.
    u64 inv_unit(u64 a) const {
        if (!is_unit(a)) throw std::domain_error("Zmod: inverse of non-unit");
        // inverse mod p by Fermat
        u64 x = 1;
        {
            u64 b = a % p, e = p - 2, r = 1;
            while (e) {
                if (e & 1) r = (r * b) % p;
                b = (b * b) % p;
                e >>= 1;
            }
            x = r;
        }
        // Newton: x <- x(2 - a x), doubles correct precision each step
        for (int k = 1; k < 2 * N; k *= 2) x = mul(x, sub(2 % q, mul(a, x)));
        return x;
    }

    /// Exact division by p^k (caller guarantees val(a) >= k).
    u64 divp(u64 a, int k) const {
        for (int i = 0; i < k; ++i) {
            if (a % p != 0) throw std::domain_error("Zmod: inexact division by p");
            a /= p;
        }
        return a;
    }

    u64 pk(int k) const {  // p^k for 0 <= k <= N
        u64 r = 1;
        for (int i = 0; i < k; ++i) r *= p;
        return r % q == r ? r : r % q;
    }
};

/// Raised when a result cannot be certified at the working precision.
struct PrecisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a truncated-polynomial computation leaves the degree window.
struct WindowOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fc
