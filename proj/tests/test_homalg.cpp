#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "fc/fcrystal.hpp"
#include "fc/homalg.hpp"

using namespace fc;

namespace {

Mat random_nonsingular(const WittRing* R, int n, std::mt19937_64& rng, int max_det_val = 5) {
    for (;;) {
        Mat A(R, n, n);
        for (auto& x : A.a)
            for (auto& c : x.c) c = rng() % R->z.q;
        WittElem dt = det(A);
        if (!dt.is_zero() && dt.val() <= max_det_val) return A;
    }
}

Complex two_term(const WittRing* R, const Mat& A) {
    return Complex::make(R, 0, {A.cols, A.rows}, {A});
}

int euler_ord(const std::vector<FiniteModule>& H) {
    int s = 0, sign = 1;
    for (const auto& h : H) {
        REQUIRE(h.is_finite());
        s += sign * h.ord_p();
        sign = -sign;
    }
    return s;
}

}  // namespace

TEST_CASE("cohomology of basic complexes") {
    auto R = WittRing::make(2, 1, 10);
    SUBCASE("two-term p^2 map") {
        Mat A(R.get(), 1, 1);
        A.at(0, 0) = WittElem::one(R.get()).mulp(2);
        auto H = cohomology(two_term(R.get(), A));
        CHECK(H[0].is_trivial());
        CHECK(H[1].ord_p() == 2);
    }
    SUBCASE("exact complex is acyclic") {
        // [W -(1,0)^T-> W^2 -(0,1)-> W]
        Mat d0(R.get(), 2, 1), d1(R.get(), 1, 2);
        d0.at(0, 0) = WittElem::one(R.get());
        d1.at(0, 1) = WittElem::one(R.get());
        auto H = cohomology(Complex::make(R.get(), 0, {1, 2, 1}, {d0, d1}));
        for (const auto& h : H) CHECK(h.is_trivial());
    }
    SUBCASE("single free term") {
        Mat z(R.get(), 0, 2);
        auto H = cohomology(Complex::make(R.get(), 0, {2}, {}));
        CHECK(H[0].free_rank == 2);
        CHECK(H[0].torsion.empty());
    }
}

TEST_CASE("mapping fiber") {
    auto R = WittRing::make(3, 1, 10);
    std::mt19937_64 rng(41);
    SUBCASE("identity map gives an acyclic fiber") {
        for (int t = 0; t < 5; ++t) {
            Mat A = random_nonsingular(R.get(), 2, rng);
            auto C = two_term(R.get(), A);
            auto m = ComplexMap::make(C, C, {Mat::identity(R.get(), 2), Mat::identity(R.get(), 2)});
            for (const auto& h : cohomology(mapping_fiber(m))) CHECK(h.is_trivial());
        }
    }
    SUBCASE("zero map gives the direct sum of shifted cohomologies") {
        Mat A(R.get(), 1, 1), B(R.get(), 1, 1);
        A.at(0, 0) = WittElem::one(R.get()).mulp(1);
        B.at(0, 0) = WittElem::one(R.get()).mulp(2);
        auto C = two_term(R.get(), A), Cp = two_term(R.get(), B);
        auto m = ComplexMap::make(C, Cp, {Mat(R.get(), 1, 1), Mat(R.get(), 1, 1)});
        auto H = cohomology(mapping_fiber(m));
        // fiber degrees 0..2: H^0 = H^0(C), H^1 = H^1(C) + H^0(C'), H^2 = H^1(C')
        CHECK(H[0].is_trivial());
        CHECK(H[1].ord_p() == 1);
        CHECK(H[2].ord_p() == 2);
    }
    SUBCASE("multiplication by p on [W]") {
        auto C = Complex::make(R.get(), 0, {1}, {});
        Mat f(R.get(), 1, 1);
        f.at(0, 0) = WittElem::one(R.get()).mulp(1);
        auto m = ComplexMap::make(C, C, {f});
        auto H = cohomology(mapping_fiber(m));
        CHECK(H[0].is_trivial());
        CHECK(H[1] == FiniteModule{{1}, 0, 1});
    }
    SUBCASE("long exact sequence: alternating orders cancel") {
        for (int t = 0; t < 10; ++t) {
            int n = 1 + int(rng() % 3);
            Mat A = random_nonsingular(R.get(), n, rng, 4);
            auto C = two_term(R.get(), A);
            // a matrix commuting with A: a polynomial in A
            Mat M = Mat::identity(R.get(), n).scal(WittElem::from_int(R.get(), (long long)(rng() % 9)));
            Mat A2 = A * A;
            M = M + A.scal(WittElem::from_int(R.get(), (long long)(rng() % 9)));
            M = M + A2.scal(WittElem::from_int(R.get(), (long long)(rng() % 9)));
            auto m = ComplexMap::make(C, C, {M, M});
            auto H = cohomology(mapping_fiber(m));
            bool finite = true;
            for (const auto& h : H) finite = finite && h.is_finite();
            if (!finite) continue;  // fiber of a non-injective map; identity not applicable
            CHECK(euler_ord(H) == 0);
        }
    }
}

TEST_CASE("decalage") {
    auto R = WittRing::make(2, 1, 10);
    Mat dp(R.get(), 1, 1);
    dp.at(0, 0) = WittElem::one(R.get()).mulp(1);
    auto C = two_term(R.get(), dp);  // [W -p-> W]
    auto I1 = Mat::identity(R.get(), 1);
    SUBCASE("trivial filtration is fixed by dec") {
        auto FC = FilteredComplex::make(C, 0, {{I1, I1}});
        for (int r = -2; r <= 0; ++r) {
            auto gens = dec_generators(FC, r);
            CHECK(span_equal(gens[0], I1));
            CHECK(span_equal(gens[1], I1));
        }
    }
    SUBCASE("two-step filtration C > pC, continuing p-scaled") {
        auto FC = FilteredComplex::make(C, 0, {{I1, I1}, {I1.mulp(1), I1.mulp(1)}}, 1);
        auto gens = dec_generators(FC, 0);
        CHECK(span_equal(gens[0], I1));           // p x is always in pW
        CHECK(span_equal(gens[1], I1.mulp(1)));   // level 1 in degree 1
        auto D0 = dec(FC, 0);
        auto H = cohomology(D0);
        CHECK(H[0].is_trivial());  // d: W -> pW is onto in the subcomplex coords
        CHECK(H[1].is_trivial());
        auto stable = dec_infinity(FC);
        CHECK(stable.r == 0);
    }
    SUBCASE("shifted filtration identity") {
        auto FC = FilteredComplex::make(C, 0, {{I1, I1}, {I1.mulp(1), I1.mulp(1)}}, 1);
        // dec^r of the original = dec^0 of the filtration shifted by r
        for (int r = 0; r <= 3; ++r) {
            std::vector<std::vector<Mat>> shifted;
            for (int l = 0; l <= 1; ++l)
                shifted.push_back({FC.level(l + r, 0), FC.level(l + r, 1)});
            auto B = FilteredComplex::make(C, 0, shifted, 1);
            auto g1 = dec_generators(FC, r), g2 = dec_generators(B, 0);
            CHECK(span_equal(g1[0], g2[0]));
            CHECK(span_equal(g1[1], g2[1]));
        }
    }
}

TEST_CASE("quasi-isomorphism checks") {
    auto R = WittRing::make(2, 1, 10);
    Mat dp(R.get(), 1, 1);
    dp.at(0, 0) = WittElem::one(R.get()).mulp(1);
    auto C = two_term(R.get(), dp);
    auto I1 = Mat::identity(R.get(), 1);
    auto FC = FilteredComplex::make(C, 0, {{I1, I1}, {I1.mulp(1), I1.mulp(1)}});
    SUBCASE("identity is a filtered quasi-isomorphism") {
        CHECK(quasi_iso_check(FC, FC, {I1, I1}));
    }
    SUBCASE("inclusion of pC is not") {
        std::string why;
        CHECK(!quasi_iso_check(FC, FC, {I1.mulp(1), I1.mulp(1)}, &why));
        CHECK(!why.empty());
    }
    SUBCASE("unit scalar is") {
        Mat u = I1.scal(WittElem::from_int(R.get(), 3));
        CHECK(quasi_iso_check(FC, FC, {u, u}));
    }
}

TEST_CASE("fiber of 1 - Frobenius agrees with the point computation") {
    auto R = WittRing::make(2, 1, 10);
    auto check_crystal = [&](const FCrystalPoint& D) {
        // assemble the fiber independently over Z_p coordinates (d = 1 here)
        Lattice N0 = filtration_N(D, 0).with_offset(0);
        int c = std::min(0, -D.rho);
        Mat Binf = howell(D.P).mulp(-D.rho - c);
        int n = D.n;
        Mat Cmap(R.get(), n, n);
        for (int j = 0; j < n; ++j) {
            auto b = N0.basis.col_vec(j);
            auto Pb = D.P.apply(b);
            std::vector<WittElem> w(size_t(n), WittElem::zero(R.get()));
            for (int i = 0; i < n; ++i)
                w[size_t(i)] = b[size_t(i)].mulp(-c) - Pb[size_t(i)].mulp(-D.rho - c);
            auto y = solve(Binf, w);
            REQUIRE(y);
            for (int i = 0; i < n; ++i) Cmap.at(i, j) = (*y)[size_t(i)];
        }
        auto src = Complex::make(R.get(), 0, {n}, {});
        auto dst = Complex::make(R.get(), 0, {n}, {});
        auto H = cohomology(mapping_fiber(ComplexMap::make(src, dst, {Cmap})));
        auto rep = syntomic_point(D);
        CHECK(H[0] == rep.H0);
        CHECK(H[1] == rep.H1);
    };
    for (int r = 0; r <= 2; ++r) check_crystal(FCrystalPoint::unit(R.get(), r));
    Mat P(R.get(), 2, 2);
    P.at(0, 0) = WittElem::from_int(R.get(), 5);
    P.at(1, 1) = WittElem::from_int(R.get(), 6);
    check_crystal(FCrystalPoint::make(R.get(), P, 0));
}
