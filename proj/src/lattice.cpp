#include "fc/lattice.hpp"

#include <algorithm>

namespace fc {

Lattice Lattice::standard(const WittRing* R, int n, int offset) {
    return {R, n, offset, Mat::identity(R, n)};
}

Lattice Lattice::make(const WittRing* R, int offset, const Mat& gens) {
    Mat H = howell(gens);
    if (H.cols != gens.rows)
        throw PrecisionError("Lattice: generators do not certify full rank at this precision");
    return {R, gens.rows, offset, H};
}

Lattice Lattice::scaled(int r) const { return {R, n, offset + r, basis}; }

Lattice Lattice::with_offset(int t) const {
    if (t == offset) return *this;
    Mat B = t < offset ? basis.mulp(offset - t) : basis.divp(t - offset);
    return Lattice::make(R, t, B);
}

std::vector<int> Lattice::pivot_exponents() const {
    // basis is lower triangular after Howell with pivots on the diagonal
    std::vector<int> e;
    for (int i = 0; i < n; ++i) e.push_back(basis.at(i, i).val());
    std::sort(e.begin(), e.end());
    return e;
}

namespace {

// rescale both to a common offset; returns (o, B_a, B_b)
std::tuple<int, Mat, Mat> common_offset(const Lattice& a, const Lattice& b) {
    if (a.R != b.R || a.n != b.n) throw std::invalid_argument("Lattice: ambient mismatch");
    int o = std::min(a.offset, b.offset);
    return {o, a.basis.mulp(a.offset - o), b.basis.mulp(b.offset - o)};
}

}  // namespace

bool lattice_equal(const Lattice& a, const Lattice& b) {
    auto [o, A, B] = common_offset(a, b);
    return span_equal(A, B);
}

bool lattice_subset(const Lattice& a, const Lattice& b) {
    auto [o, A, B] = common_offset(a, b);
    return span_subset(A, B);
}

bool lattice_member(const Lattice& L, int voff, const std::vector<WittElem>& v) {
    int o = std::min(L.offset, voff);
    Mat B = L.basis.mulp(L.offset - o);
    std::vector<WittElem> w = v;
    for (auto& x : w) x = x.mulp(voff - o);
    return in_span(B, w);
}

Lattice lattice_intersection(const Lattice& a, const Lattice& b) {
    auto [o, A, B] = common_offset(a, b);
    // solutions of A x = B y over the untruncated ring; saturated kernel keeps
    // the computation faithful to the p-torsion-free model
    Mat K = kernel_saturated(A.hcat(B.scal(-WittElem::one(a.R))));
    Mat X = Mat(a.R, A.cols, K.cols);
    for (int i = 0; i < A.cols; ++i)
        for (int j = 0; j < K.cols; ++j) X.at(i, j) = K.at(i, j);
    return Lattice::make(a.R, o, A * X);
}

Lattice lattice_sum(const Lattice& a, const Lattice& b) {
    auto [o, A, B] = common_offset(a, b);
    return Lattice::make(a.R, o, A.hcat(B));
}

FiniteModule lattice_quotient(const Lattice& big, const Lattice& small, int guard) {
    auto [o, A, B] = common_offset(big, small);
    // relative matrix C with A C = B
    Mat C(big.R, big.n, big.n);
    for (int j = 0; j < big.n; ++j) {
        auto x = solve(A, B.col_vec(j));
        if (!x) throw std::invalid_argument("lattice_quotient: second lattice not contained");
        for (int i = 0; i < big.n; ++i) C.at(i, j) = (*x)[size_t(i)];
    }
    return cokernel_of_matrix(C, guard);
}

FiniteModule cokernel_of_matrix(const Mat& A, int guard) {
    const WittRing* R = A.R;
    int N = R->N;
    auto exps = snf_exponents(A);
    FiniteModule m;
    m.d = R->d;
    int mm = std::min(A.rows, A.cols);
    for (int j = 0; j < mm; ++j) {
        int e = exps[size_t(j)];
        if (e == 0) continue;
        if (e >= N) {
            ++m.free_rank;
        } else if (e > N - guard) {
            throw PrecisionError("cokernel: elementary divisor too close to precision");
        } else {
            m.torsion.push_back(e);
        }
    }
    m.free_rank += A.rows - mm;
    std::sort(m.torsion.begin(), m.torsion.end());
    return m;
}

FiniteModule kernel_module_of_matrix(const Mat& A, int guard) {
    // kernel in the torsion-free model: A is the reduction of a map of free
    // modules over the untruncated ring, whose kernel is free; divisors p^e
    // with 0 < e < N are truncation artifacts, not kernel
    const WittRing* R = A.R;
    int N = R->N;
    auto exps = snf_exponents(A);
    FiniteModule m;
    m.d = R->d;
    int mm = std::min(A.rows, A.cols);
    for (int j = 0; j < mm; ++j) {
        int e = exps[size_t(j)];
        if (e >= N) {
            ++m.free_rank;
        } else if (e > N - guard) {
            throw PrecisionError("kernel: elementary divisor too close to precision");
        }
    }
    m.free_rank += A.cols - mm;
    return m;
}

}  // namespace fc
