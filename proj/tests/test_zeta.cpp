#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "fc/zeta.hpp"

using namespace fc;

namespace {

WittElem rand_elem(const WittRing* R, std::mt19937_64& rng) {
    auto x = WittElem::zero(R);
    for (auto& c : x.c) c = rng() % R->z.q;
    return x;
}

FCrystalPoint random_crystal(const WittRing* R, int n, std::mt19937_64& rng, int vden = 2) {
    Mat P(R, n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            auto x = rand_elem(R, rng);
            if (rng() % 3 == 0) x = x.mulp(int(rng() % 3));
            P.at(i, j) = x;
        }
    return FCrystalPoint::make(R, P, int(rng() % (2 * vden + 1)) - vden);
}

PadicScalar ps_int(const WittRing* R, long long v) {
    return PadicScalar::of(WittElem::from_int(R, v));
}

EulerFactor lin_factor(const WittRing* R, const PadicScalar& c1) {
    EulerFactor f;
    f.R = R;
    f.c = {ps_int(R, 1), c1};
    f.prec = {R->N, R->N};
    return f;
}

}  // namespace

TEST_CASE("euler factor on basic crystals") {
    auto R = WittRing::make(5, 1, 10);
    SUBCASE("unit crystal gives 1 - u") {
        auto f = euler_factor(FCrystalPoint::unit(R.get()));
        CHECK(euler_equal(f, lin_factor(R.get(), ps_int(R.get(), -1))));
    }
    SUBCASE("twisted unit gives 1 - p^{-r} u") {
        auto f = euler_factor(FCrystalPoint::unit(R.get(), 2));
        PadicScalar c1 = PadicScalar::of_scaled(WittElem::from_int(R.get(), -1), 2);
        CHECK(euler_equal(f, lin_factor(R.get(), c1)));
        CHECK(f.c[1].v == -2);
    }
    SUBCASE("companion to u^2 - a u + p gives 1 - a u + p u^2") {
        Mat P(R.get(), 2, 2);
        P.at(0, 1) = WittElem::from_int(R.get(), -5);
        P.at(1, 0) = WittElem::one(R.get());
        P.at(1, 1) = WittElem::from_int(R.get(), 2);
        auto f = euler_factor(FCrystalPoint::make(R.get(), P, 0));
        EulerFactor want;
        want.R = R.get();
        want.c = {ps_int(R.get(), 1), ps_int(R.get(), -2), ps_int(R.get(), 5)};
        want.prec = {10, 10, 10};
        CHECK(euler_equal(f, want));
    }
    SUBCASE("constant coefficient is 1") {
        std::mt19937_64 rng(3);
        for (int it = 0; it < 30; ++it) {
            auto f = euler_factor(random_crystal(R.get(), 1 + int(rng() % 3), rng));
            CHECK(f.c[0].v == 0);
            CHECK(f.c[0].u == WittElem::one(R.get()));
        }
    }
    SUBCASE("residue degree 2 unit crystal: phi_k = Phi^2 = 1") {
        auto R2 = WittRing::make(3, 2, 8);
        auto f = euler_factor(FCrystalPoint::unit(R2.get()));
        CHECK(euler_equal(f, lin_factor(R2.get(), ps_int(R2.get(), -1))));
    }
}

TEST_CASE("euler factor is multiplicative over direct sums") {
    std::mt19937_64 rng(7);
    for (u64 p : {2, 3}) {
        for (int d = 1; d <= 2; ++d) {
            auto R = WittRing::make(p, d, 10);
            for (int it = 0; it < 25; ++it) {
                auto A = random_crystal(R.get(), 1 + int(rng() % 2), rng);
                auto B = random_crystal(R.get(), 1 + int(rng() % 2), rng);
                auto lhs = euler_factor(A.direct_sum(B));
                auto rhs = euler_product(euler_factor(A), euler_factor(B));
                CHECK(euler_equal(lhs, rhs));
            }
        }
    }
}

TEST_CASE("determinant-vs-orders identity for module endomorphisms") {
    auto R = WittRing::make(3, 1, 10);
    SUBCASE("p times identity on a free rank-2 module") {
        ModuleEndo h{R.get(), 2, {}, Mat::identity(R.get(), 2).mulp(1)};
        auto rep = det_lemma_check(h);
        CHECK(rep.det_ord == 2);
        CHECK(rep.coker_ord == 2);
        CHECK(rep.ker_ord == 0);
        CHECK(rep.pass);
    }
    SUBCASE("(p, id) on free plus p^3-torsion: both sides p") {
        Mat H(R.get(), 2, 2);
        H.at(0, 0) = WittElem::one(R.get()).mulp(1);
        H.at(1, 1) = WittElem::one(R.get());
        ModuleEndo h{R.get(), 1, {3}, H};
        auto rep = det_lemma_check(h);
        CHECK(rep.det_ord == 1);
        CHECK(rep.coker_ord == 1);
        CHECK(rep.ker_ord == 0);
        CHECK(rep.pass);
    }
    SUBCASE("multiplication by p on pure p^3-torsion: kernel balances cokernel") {
        Mat H(R.get(), 1, 1);
        H.at(0, 0) = WittElem::one(R.get()).mulp(1);
        ModuleEndo h{R.get(), 0, {3}, H};
        auto rep = det_lemma_check(h);
        CHECK(rep.det_ord == 0);
        CHECK(rep.coker_ord == 1);
        CHECK(rep.ker_ord == 1);
        CHECK(rep.pass);
    }
}

TEST_CASE("determinant-vs-orders identity on random modules") {
    std::mt19937_64 rng(11);
    int done = 0, attempts = 0;
    while (done < 200 && attempts < 4000) {
        ++attempts;
        u64 p = (done % 3 == 0) ? 2 : (done % 3 == 1 ? 3 : 5);
        auto R = WittRing::make(p, 1, 12);
        int f = int(rng() % 3), t = int(rng() % 3);
        if (f + t == 0) continue;
        std::vector<int> tors;
        for (int i = 0; i < t; ++i) tors.push_back(1 + int(rng() % 3));
        int k = f + t;
        Mat H(R.get(), k, k);
        for (int j = 0; j < k; ++j)
            for (int i = 0; i < k; ++i) {
                if (j >= f && i < f) continue;  // torsion cannot map to free
                auto x = rand_elem(R.get(), rng);
                if (rng() % 2) x = x.mulp(int(rng() % 3));
                if (j >= f && i >= f)
                    x = x.mulp(std::max(0, tors[size_t(i - f)] - tors[size_t(j - f)]));
                H.at(i, j) = x;
            }
        ModuleEndo h{R.get(), f, tors, H};
        try {
            auto rep = det_lemma_check(h);
            CHECK(rep.pass);
            ++done;
        } catch (const PrecisionError&) {
        } catch (const std::domain_error&) {
        }
    }
    CHECK(done == 200);
}

TEST_CASE("twisted determinant identity for a linear and a Frobenius-linear map") {
    SUBCASE("alpha = id, beta = 0") {
        auto R = WittRing::make(3, 1, 10);
        auto rep = det2_lemma_check(Mat::identity(R.get(), 2), Mat(R.get(), 2, 2));
        CHECK(rep.lhs_val == 0);
        CHECK(rep.coker_ab == 0);
        CHECK(rep.ker_ab == 0);
        CHECK(rep.coker_a == 0);
        CHECK(rep.ker_a == 0);
        CHECK(rep.pass);
    }
    SUBCASE("lattice inclusion against Frobenius for the once-twisted unit crystal") {
        // alpha: N_0 -> N_{(-inf)} is multiplication by p in the natural bases,
        // beta is Phi eta, acting as 1; det(1 - p^{-1}) has valuation -1 and the
        // only nontrivial order is #Coker(alpha) = p.
        auto R = WittRing::make(3, 1, 10);
        Mat A(R.get(), 1, 1), B(R.get(), 1, 1);
        A.at(0, 0) = WittElem::one(R.get()).mulp(1);
        B.at(0, 0) = WittElem::one(R.get());
        auto rep = det2_lemma_check(A, B);
        CHECK(rep.lhs_val == -1);
        CHECK(rep.coker_ab == 0);
        CHECK(rep.ker_ab == 0);
        CHECK(rep.coker_a == 1);
        CHECK(rep.ker_a == 0);
        CHECK(rep.pass);
    }
    SUBCASE("random pairs over the degree-2 Witt ring") {
        auto R = WittRing::make(2, 2, 12);
        std::mt19937_64 rng(13);
        int done = 0, attempts = 0;
        while (done < 100 && attempts < 3000) {
            ++attempts;
            int n = 1 + int(rng() % 3);
            Mat A(R.get(), n, n), B(R.get(), n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    A.at(i, j) = rand_elem(R.get(), rng);
                    if (rng() % 3 == 0) A.at(i, j) = A.at(i, j).mulp(1);
                    B.at(i, j) = rand_elem(R.get(), rng);
                    if (rng() % 3 == 0) B.at(i, j) = B.at(i, j).mulp(int(rng() % 2));
                }
            Det2Report rep;
            try {
                rep = det2_lemma_check(A, B);
            } catch (const PrecisionError&) {
                continue;
            } catch (const std::domain_error&) {
                continue;
            }
            CHECK(rep.pass);
            ++done;
        }
        CHECK(done == 100);
    }
}

TEST_CASE("class-number valuation identity at a point") {
    SUBCASE("twisted unit crystals") {
        for (u64 p : {2, 5}) {
            auto R = WittRing::make(p, 1, 12);
            for (int r = 1; r <= 2; ++r) {
                auto rep = verify_class_number_point(FCrystalPoint::unit(R.get(), r));
                CHECK(rep.applicable);
                CHECK(rep.lhs_valuation == -r);
                CHECK(rep.h0_ord == 0);
                CHECK(rep.h1_ord == 0);
                CHECK(rep.t0_ord == r);
                CHECK(rep.verdict);
            }
        }
    }
    SUBCASE("anomalous ordinary rank-2 crystal forces H^1") {
        // trace 1 at p = 5: det(1 - phi_k at u = 1) = 1 - 1 + 5 has valuation 1
        auto R = WittRing::make(5, 1, 12);
        Mat P(R.get(), 2, 2);
        P.at(0, 1) = WittElem::from_int(R.get(), -5);
        P.at(1, 0) = WittElem::one(R.get());
        P.at(1, 1) = WittElem::one(R.get());
        auto rep = verify_class_number_point(FCrystalPoint::make(R.get(), P, 0));
        CHECK(rep.applicable);
        CHECK(rep.lhs_valuation == 1);
        CHECK(rep.h1_ord >= 1);
        CHECK(rep.verdict);
    }
    SUBCASE("random admissible crystals") {
        std::mt19937_64 rng(17);
        int done = 0, attempts = 0;
        while (done < 50 && attempts < 2000) {
            ++attempts;
            u64 p = (attempts % 2) ? 2 : 7;
            int d = 1 + int(rng() % 2);
            auto R = WittRing::make(p, d, 12);
            auto D = random_crystal(R.get(), 1 + int(rng() % 3), rng, 1);
            ClassNumberReport rep;
            try {
                rep = verify_class_number_point(D);
            } catch (const PrecisionError&) {
                continue;
            }
            if (!rep.applicable) continue;
            CHECK(rep.verdict);
            ++done;
        }
        CHECK(done == 50);
    }
}
