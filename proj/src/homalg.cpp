#include "fc/homalg.hpp"

#include <algorithm>
#include <stdexcept>

namespace fc {

namespace {

// {y : A y in colspan(H)}, columns; A maps y-space into the ambient of H
Mat preimage_cols(const Mat& A, const Mat& H) {
    if (A.rows == 0 || A.cols == 0 || A.is_zero()) return Mat::identity(A.R, A.cols);
    if (H.cols == 0) return kernel_saturated(A);
    Mat K = kernel_saturated(A.hcat(H.scal(WittElem::zero(A.R) - WittElem::one(A.R))));
    Mat Y(A.R, A.cols, K.cols);
    for (int i = 0; i < A.cols; ++i)
        for (int j = 0; j < K.cols; ++j) Y.at(i, j) = K.at(i, j);
    return Y;
}

// coordinates of each column of B in the column space of A (throws if outside)
Mat coords_in(const Mat& A, const Mat& B, const char* what) {
    Mat X(A.R, A.cols, B.cols);
    for (int j = 0; j < B.cols; ++j) {
        auto y = solve(A, B.col_vec(j));
        if (!y) throw PrecisionError(std::string(what) + ": column escapes the target span");
        for (int i = 0; i < A.cols; ++i) X.at(i, j) = (*y)[size_t(i)];
    }
    return X;
}

}  // namespace

Mat Complex::diff(int q) const {
    if (q >= lo && q < hi()) return d[size_t(q - lo)];
    return Mat(R, rank_at(q + 1), rank_at(q));
}

Complex Complex::make(const WittRing* R, int lo, std::vector<int> rank, std::vector<Mat> d) {
    Complex C{R, lo, std::move(rank), std::move(d)};
    if (C.rank.empty()) throw std::invalid_argument("Complex: empty degree range");
    if (C.d.size() + 1 != C.rank.size())
        throw std::invalid_argument("Complex: differential count mismatch");
    for (size_t i = 0; i < C.d.size(); ++i) {
        if (C.d[i].rows != C.rank[i + 1] || C.d[i].cols != C.rank[i])
            throw std::invalid_argument("Complex: differential shape mismatch");
        if (i + 1 < C.d.size() && C.rank[i] > 0 && C.rank[i + 2] > 0 &&
            !(C.d[i + 1] * C.d[i]).is_zero())
            throw std::invalid_argument("Complex: d o d != 0");
    }
    return C;
}

Mat ComplexMap::at(int q) const {
    if (q >= src.lo && q <= src.hi()) return f[size_t(q - src.lo)];
    return Mat(src.R, dst.rank_at(q), src.rank_at(q));
}

ComplexMap ComplexMap::make(Complex src, Complex dst, std::vector<Mat> f) {
    ComplexMap m{std::move(src), std::move(dst), std::move(f)};
    if (m.f.size() != m.src.rank.size())
        throw std::invalid_argument("ComplexMap: component count mismatch");
    for (int q = m.src.lo; q <= m.src.hi(); ++q) {
        const Mat& fq = m.f[size_t(q - m.src.lo)];
        if (fq.rows != m.dst.rank_at(q) || fq.cols != m.src.rank_at(q))
            throw std::invalid_argument("ComplexMap: component shape mismatch");
        Mat lhs = m.dst.diff(q) * fq;
        Mat rhs = m.at(q + 1) * m.src.diff(q);
        if (lhs != rhs) throw std::invalid_argument("ComplexMap: does not commute with d");
    }
    return m;
}

namespace {

// certified rational rank and finite elementary divisors of a matrix viewed
// as the reduction of an integral map of free modules
struct RankData {
    int rank = 0;
    std::vector<int> torsion;  // divisors e with 0 < e <= N - guard
};

RankData rank_data(const Mat& A, int guard = 3) {
    RankData rd;
    if (A.rows == 0 || A.cols == 0) return rd;
    int N = A.R->N;
    for (int e : snf_exponents(A)) {
        if (e >= N) continue;  // indistinguishable from zero: no rank
        if (e > N - guard)
            throw PrecisionError("cohomology: elementary divisor too close to precision");
        ++rd.rank;
        if (e > 0) rd.torsion.push_back(e);
    }
    return rd;
}

}  // namespace

std::vector<FiniteModule> cohomology(const Complex& C) {
    // complex of free modules: H^q has torsion = finite elementary divisors of
    // d^{q-1} and free rank n_q - rank(d^q) - rank(d^{q-1})
    std::vector<FiniteModule> H;
    for (int q = C.lo; q <= C.hi(); ++q) {
        FiniteModule h;
        h.d = C.R->d;
        auto prev = rank_data(C.diff(q - 1));
        auto cur = rank_data(C.diff(q));
        h.torsion = prev.torsion;
        std::sort(h.torsion.begin(), h.torsion.end());
        h.free_rank = C.rank_at(q) - cur.rank - prev.rank;
        if (h.free_rank < 0)
            throw PrecisionError("cohomology: inconsistent ranks at precision");
        H.push_back(h);
    }
    return H;
}

Complex mapping_fiber(const ComplexMap& m) {
    const Complex &A = m.src, &B = m.dst;
    const WittRing* R = A.R;
    int lo = std::min(A.lo, B.lo + 1), hi = std::max(A.hi(), B.hi() + 1);
    std::vector<int> rank;
    for (int q = lo; q <= hi; ++q) rank.push_back(A.rank_at(q) + B.rank_at(q - 1));
    std::vector<Mat> d;
    for (int q = lo; q < hi; ++q) {
        int ra = A.rank_at(q), rb = B.rank_at(q - 1);
        int ra1 = A.rank_at(q + 1), rb1 = B.rank_at(q);
        Mat dq(R, ra1 + rb1, ra + rb);
        Mat dA = A.diff(q), fq = m.at(q), dB = B.diff(q - 1);
        for (int i = 0; i < ra1; ++i)
            for (int j = 0; j < ra; ++j) dq.at(i, j) = dA.at(i, j);
        for (int i = 0; i < rb1; ++i) {
            for (int j = 0; j < ra; ++j) dq.at(ra1 + i, j) = fq.at(i, j);
            for (int j = 0; j < rb; ++j)
                dq.at(ra1 + i, ra + j) = WittElem::zero(R) - dB.at(i, j);
        }
        d.push_back(dq);
    }
    return Complex::make(R, lo, rank, d);
}

Mat FilteredComplex::level(int l, int q) const {
    if (q < C.lo || q > C.hi()) return Mat(C.R, 0, 0);
    if (l < fmin) l = fmin;
    int extra = 0;
    if (l > fmax) {
        extra = (l - fmax) * ext_scale;
        l = fmax;
    }
    Mat G = levels[size_t(l - fmin)][size_t(q - C.lo)];
    return extra ? G.mulp(extra) : G;
}

FilteredComplex FilteredComplex::make(Complex C, int fmin,
                                      std::vector<std::vector<Mat>> levels, int ext_scale) {
    FilteredComplex FC{std::move(C), fmin, fmin + int(levels.size()) - 1, std::move(levels),
                       ext_scale};
    if (FC.levels.empty()) throw std::invalid_argument("FilteredComplex: no levels");
    for (size_t l = 0; l < FC.levels.size(); ++l) {
        if (int(FC.levels[l].size()) != int(FC.C.rank.size()))
            throw std::invalid_argument("FilteredComplex: level term count mismatch");
        for (int q = FC.C.lo; q <= FC.C.hi(); ++q) {
            const Mat& G = FC.levels[l][size_t(q - FC.C.lo)];
            if (G.rows != FC.C.rank_at(q))
                throw std::invalid_argument("FilteredComplex: level ambient mismatch");
            // decreasing filtration
            if (l > 0 && !span_subset(G, FC.levels[l - 1][size_t(q - FC.C.lo)]))
                throw std::invalid_argument("FilteredComplex: filtration not decreasing");
            // d preserves the level
            Mat dG = FC.C.diff(q) * G;
            if (q < FC.C.hi() && !span_subset(dG, FC.levels[l][size_t(q + 1 - FC.C.lo)]))
                throw std::invalid_argument("FilteredComplex: level not a subcomplex");
        }
    }
    return FC;
}

std::vector<Mat> dec_generators(const FilteredComplex& FC, int r) {
    const Complex& C = FC.C;
    std::vector<Mat> out;
    for (int q = C.lo; q <= C.hi(); ++q) {
        Mat G = FC.level(q + r, q);
        if (G.cols == 0) {
            out.push_back(Mat(C.R, C.rank_at(q), 0));
            continue;
        }
        Mat Y = preimage_cols(C.diff(q) * G, FC.level(q + r + 1, q + 1));
        out.push_back(howell(G * Y));
    }
    return out;
}

Complex subcomplex(const Complex& C, const std::vector<Mat>& gens) {
    std::vector<int> rank;
    for (const Mat& G : gens) rank.push_back(G.cols);
    std::vector<Mat> d;
    for (int q = C.lo; q < C.hi(); ++q) {
        const Mat& G = gens[size_t(q - C.lo)];
        const Mat& G1 = gens[size_t(q + 1 - C.lo)];
        if (G.cols == 0 || G1.cols == 0) {
            d.push_back(Mat(C.R, G1.cols, G.cols));
            // if the image is nonzero it must land in a zero term
            if (G.cols > 0 && !(C.diff(q) * G).is_zero())
                throw std::invalid_argument("subcomplex: d escapes the generators");
            continue;
        }
        d.push_back(coords_in(G1, C.diff(q) * G, "subcomplex"));
    }
    return Complex::make(C.R, C.lo, rank, d);
}

Complex dec(const FilteredComplex& FC, int r) { return subcomplex(FC.C, dec_generators(FC, r)); }

StableDec dec_infinity(const FilteredComplex& FC, int max_r) {
    auto prev = dec_generators(FC, 0);
    for (int r = 0; r < max_r; ++r) {
        auto next = dec_generators(FC, r + 1);
        bool stable = true;
        for (size_t i = 0; i < prev.size(); ++i)
            if (!span_equal(next[i], prev[i].mulp(1))) {
                stable = false;
                break;
            }
        if (stable) return {subcomplex(FC.C, prev), r};
        prev = std::move(next);
    }
    throw PrecisionError("dec_infinity: no stabilization before the scan bound");
}

namespace {

// f induces isomorphisms on every H^q iff its mapping fiber is acyclic
bool induces_cohomology_iso(const ComplexMap& m, std::string* why) {
    auto H = cohomology(mapping_fiber(m));
    for (size_t i = 0; i < H.size(); ++i)
        if (!H[i].is_trivial()) {
            if (why)
                *why = "mapping fiber not acyclic in degree " +
                       std::to_string(std::min(m.src.lo, m.dst.lo + 1) + int(i));
            return false;
        }
    return true;
}

}  // namespace

bool quasi_iso_check(const FilteredComplex& A, const FilteredComplex& B,
                     const std::vector<Mat>& f, std::string* why) {
    if (A.C.lo != B.C.lo || A.C.rank.size() != B.C.rank.size())
        throw std::invalid_argument("quasi_iso_check: degree ranges differ");
    int lmin = std::min(A.fmin, B.fmin), lmax = std::max(A.fmax, B.fmax);
    for (int l = lmin; l <= lmax; ++l) {
        std::vector<Mat> gA, gB, comp;
        for (int q = A.C.lo; q <= A.C.hi(); ++q) {
            gA.push_back(howell(A.level(l, q)));
            gB.push_back(howell(B.level(l, q)));
        }
        Complex subA = subcomplex(A.C, gA), subB = subcomplex(B.C, gB);
        for (int q = A.C.lo; q <= A.C.hi(); ++q) {
            size_t i = size_t(q - A.C.lo);
            const Mat& fq = f[i];
            Mat img = fq * gA[i];
            // f must preserve the filtration level
            if (img.cols > 0 && gB[i].cols == 0 && !img.is_zero()) {
                if (why) *why = "map does not preserve filtration level " + std::to_string(l);
                return false;
            }
            if (gB[i].cols > 0 && !span_subset(img, gB[i])) {
                if (why) *why = "map does not preserve filtration level " + std::to_string(l);
                return false;
            }
            comp.push_back(gB[i].cols > 0 ? coords_in(gB[i], img, "quasi_iso_check")
                                          : Mat(A.C.R, 0, gA[i].cols));
        }
        auto m = ComplexMap::make(subA, subB, comp);
        if (!induces_cohomology_iso(m, why)) return false;
    }
    return true;
}

}  // namespace fc
