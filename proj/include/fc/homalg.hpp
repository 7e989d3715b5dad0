#pragma once

#include <string>

#include "fc/lattice.hpp"

namespace fc {

/// Bounded complex of free modules over a WittRing: terms C^q for q in
/// [lo, lo + rank.size() - 1], differentials d[i] : C^{lo+i} -> C^{lo+i+1}.
struct Complex {
    const WittRing* R = nullptr;
    int lo = 0;
    std::vector<int> rank;
    std::vector<Mat> d;  // size rank.size() - 1 (empty for a single term)

    int hi() const { return lo + int(rank.size()) - 1; }
    int rank_at(int q) const {
        return (q < lo || q > hi()) ? 0 : rank[size_t(q - lo)];
    }
    /// Differential leaving degree q (zero map if out of range).
    Mat diff(int q) const;

    /// Validates shapes and d∘d = 0.
    static Complex make(const WittRing* R, int lo, std::vector<int> rank, std::vector<Mat> d);
};

/// Degreewise map of complexes commuting with the differentials.
struct ComplexMap {
    Complex src, dst;
    std::vector<Mat> f;  // f[i] : src^{src.lo+i} -> dst^{src.lo+i}

    Mat at(int q) const;
    static ComplexMap make(Complex src, Complex dst, std::vector<Mat> f);
};

/// H^q for q in [C.lo, C.hi()], in the p-torsion-free model: kernels are
/// saturated, so each H^q is ker/im of a complex of free modules.
std::vector<FiniteModule> cohomology(const Complex& C);

/// Mapping fiber (-1 shift of the cone): fiber^q = C^q ⊕ C'^{q-1},
/// d(x, y) = (dx, f(x) - d'y).
Complex mapping_fiber(const ComplexMap& m);

/// Decreasing filtration by subcomplexes with finitely many jumps; levels
/// outside [fmin, fmax] extend constantly.
struct FilteredComplex {
    Complex C;
    int fmin = 0, fmax = 0;
    // levels[l - fmin][q - C.lo] = generator columns of the level-l submodule
    std::vector<std::vector<Mat>> levels;
    // levels above fmax: 0 = constant extension, 1 = multiply by p per step
    // (the pattern of filtrations that keep scaling, needed for dec_infinity)
    int ext_scale = 0;

    Mat level(int l, int q) const;  // clamped below fmin, extended above fmax
    static FilteredComplex make(Complex C, int fmin, std::vector<std::vector<Mat>> levels,
                                int ext_scale = 0);
};

/// Deligne decalage: (Dec^r C)^q = {x in level q+r of C^q : dx in level
/// q+r+1 of C^{q+1}}, with induced differentials, in canonical generator
/// coordinates per degree.
Complex dec(const FilteredComplex& FC, int r);

/// Howell generator matrices of the dec terms inside the ambient C^q.
std::vector<Mat> dec_generators(const FilteredComplex& FC, int r);

/// First r with dec(C, r+1) = p * dec(C, r) termwise; returns that complex
/// and the stabilization level. Throws PrecisionError if none is found
/// before the scan bound.
struct StableDec {
    Complex C;
    int r = 0;  // the returned complex is p^{-r} * Dec^r (as spans)
};
StableDec dec_infinity(const FilteredComplex& FC, int max_r = 64);

/// Subcomplex spanned by the given generator columns per degree, expressed
/// in generator coordinates.
Complex subcomplex(const Complex& C, const std::vector<Mat>& gens);

/// Map of filtered complexes (same degree ranges, f preserving levels).
/// True iff on every filtration level the induced map on each H^q is an
/// isomorphism at the working precision.
bool quasi_iso_check(const FilteredComplex& A, const FilteredComplex& B,
                     const std::vector<Mat>& f, std::string* why = nullptr);

}  // namespace fc
