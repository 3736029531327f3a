#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bsn/detection.hpp"
#include "bsn/rng.hpp"

using namespace bsn;

namespace {
CVector random_cvec(int n, RandomSource& rng) {
    CVector v(n);
    for (int i = 0; i < n; ++i) v(i) = cplx(rng.normal(), rng.normal());
    return v;
}

CMatrix random_cmat(int r, int c, RandomSource& rng) {
    CMatrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = cplx(rng.normal(), rng.normal());
    return m;
}
}  // namespace

TEST_CASE("mrc operator") {
    CVector xi(2);
    xi << cplx(1, 0), cplx(0, 1);
    CHECK((mrc_operator(xi) - xi).norm() == 0.0);
    CHECK_THROWS_AS(mrc_operator(CVector::Zero(3)), DegenerateChannelError);

    SUBCASE("matched filter SINR is ||xi||^2 / sigma^2") {
        CVector a = mrc_operator(xi);
        auto s = instantaneous_sinr(a, xi, {}, std::vector<CMatrix>{}, 2.0);
        CHECK(s.sinr == doctest::Approx(xi.squaredNorm() / 2.0).epsilon(1e-12));
    }
    SUBCASE("scaling xi leaves MRC SINR unchanged") {
        RandomSource rng(3);
        CVector x = random_cvec(4, rng);
        auto s1 = instantaneous_sinr(mrc_operator(x), x, {}, std::vector<CMatrix>{}, 0.7);
        CVector x2 = 2.0 * x;
        // with interference present the ratio structure still cancels the operator scale
        CVector intra = random_cvec(4, rng);
        auto i1 = instantaneous_sinr(mrc_operator(x), x, {intra}, std::vector<CMatrix>{}, 0.7);
        auto i2 = instantaneous_sinr(mrc_operator(x2), x, {intra}, std::vector<CMatrix>{}, 0.7);
        CHECK(i1.sinr == doctest::Approx(i2.sinr).epsilon(1e-12));
        CHECK(s1.signal / s1.noise == doctest::Approx(x.squaredNorm() / 0.7).epsilon(1e-12));
    }
}

TEST_CASE("zf operator") {
    RandomSource rng(17);
    SUBCASE("single column pseudo-inverse") {
        CVector xi = random_cvec(4, rng);
        CMatrix p(4, 1);
        p.col(0) = xi;
        ZfOperator op = zf_operator(p, 0);
        CHECK_FALSE(op.rank_deficient);
        CHECK((op.a - xi / xi.squaredNorm()).norm() < 1e-12);
        CHECK(std::abs(op.a.dot(xi) - cplx(1, 0)) < 1e-12);
    }
    SUBCASE("orthonormal columns return the column itself") {
        CMatrix q = random_cmat(4, 2, rng);
        Eigen::HouseholderQR<CMatrix> qr(q);
        CMatrix p = CMatrix(qr.householderQ()).leftCols(2);
        for (int j = 0; j < 2; ++j) {
            ZfOperator op = zf_operator(p, j);
            CHECK((op.a - p.col(j)).norm() < 1e-12);
        }
    }
    SUBCASE("null space cancellation on random full-rank 4x2") {
        for (int trial = 0; trial < 50; ++trial) {
            CMatrix p = random_cmat(4, 2, rng);
            ZfOperator op = zf_operator(p, 0);
            CHECK_FALSE(op.rank_deficient);
            CHECK(std::abs(op.a.dot(p.col(1))) <= 1e-10 * p.norm());
            CHECK(std::abs(op.a.dot(p.col(0)) - cplx(1, 0)) < 1e-10);
        }
    }
    SUBCASE("rank deficiency flagged, not masked") {
        CVector xi = random_cvec(4, rng);
        CMatrix p(4, 2);
        p.col(0) = xi;
        p.col(1) = 2.0 * xi;
        ZfOperator op = zf_operator(p, 0);
        CHECK(op.rank_deficient);
        CHECK(op.a.allFinite());
    }
}

TEST_CASE("instantaneous SINR") {
    SUBCASE("no interferers, unit everything") {
        CVector e = CVector::Zero(4);
        e(0) = 1.0;
        auto s = instantaneous_sinr(e, e, {}, std::vector<CMatrix>{}, 1.0);
        CHECK(s.sinr == doctest::Approx(1.0));
        CHECK(s.intra == 0.0);
        CHECK(s.inter == 0.0);
    }
    SUBCASE("two-tag scalar hand case: 4/(1+1) = 2") {
        CVector a = CVector::Ones(1), xi = 2.0 * CVector::Ones(1), other = CVector::Ones(1);
        auto s = instantaneous_sinr(a, xi, {other}, std::vector<CMatrix>{}, 1.0);
        CHECK(s.signal == doctest::Approx(4.0));
        CHECK(s.intra == doctest::Approx(1.0));
        CHECK(s.noise == doctest::Approx(1.0));
        CHECK(s.sinr == doctest::Approx(2.0));
    }
    SUBCASE("nonpositive noise rejected") {
        CVector a = CVector::Ones(1);
        CHECK_THROWS_AS(instantaneous_sinr(a, a, {}, std::vector<CMatrix>{}, 0.0),
                        std::domain_error);
    }
    SUBCASE("components consistent and nonnegative") {
        RandomSource rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            CVector a = random_cvec(4, rng), xi = random_cvec(4, rng);
            CMatrix m = random_cmat(4, 4, rng);
            CMatrix cov = m * m.adjoint();  // Hermitian PSD
            auto s = instantaneous_sinr(a, xi, {random_cvec(4, rng)}, {cov}, 0.3);
            CHECK(s.signal >= 0.0);
            CHECK(s.intra >= 0.0);
            CHECK(s.inter >= 0.0);
            CHECK(s.noise > 0.0);
            CHECK(s.sinr ==
                  doctest::Approx(s.signal / (s.intra + s.inter + s.noise)).epsilon(1e-12));
        }
    }
    SUBCASE("invariant under complex scaling of the operator") {
        RandomSource rng(6);
        CVector a = random_cvec(4, rng), xi = random_cvec(4, rng);
        std::vector<CVector> intra = {random_cvec(4, rng), random_cvec(4, rng)};
        CMatrix m = random_cmat(4, 4, rng);
        std::vector<CMatrix> covs = {m * m.adjoint()};
        double base = instantaneous_sinr(a, xi, intra, covs, 0.9).sinr;
        for (int i = 0; i < 100; ++i) {
            cplx scale = cplx(rng.normal(), rng.normal());
            if (std::abs(scale) < 1e-3) continue;
            double s = instantaneous_sinr(scale * a, xi, intra, covs, 0.9).sinr;
            CHECK(std::abs(s - base) < 1e-10 * base);
        }
    }
    SUBCASE("ZF with N_R >= K_bc removes the intra term") {
        RandomSource rng(8);
        for (int trial = 0; trial < 30; ++trial) {
            CMatrix p = random_cmat(4, 3, rng);
            ZfOperator op = zf_operator(p, 1);
            std::vector<CVector> intra = {p.col(0), p.col(2)};
            auto s = instantaneous_sinr(op.a, p.col(1), intra, std::vector<CMatrix>{}, 1e-3);
            CHECK(s.intra <= 1e-10 * s.signal);
        }
    }
    SUBCASE("K_bc = 1: ZF and MRC SINR coincide") {
        RandomSource rng(9);
        CVector xi = random_cvec(4, rng);
        CMatrix p(4, 1);
        p.col(0) = xi;
        CMatrix m = random_cmat(4, 4, rng);
        std::vector<CMatrix> covs = {m * m.adjoint()};
        double zf = instantaneous_sinr(zf_operator(p, 0).a, xi, {}, covs, 0.2).sinr;
        double mrc = instantaneous_sinr(mrc_operator(xi), xi, {}, covs, 0.2).sinr;
        CHECK(zf == doctest::Approx(mrc).epsilon(1e-9));
    }
}

TEST_CASE("symbol decisions") {
    CVector a = CVector::Ones(1);
    SUBCASE("sign of the real part, ties to +1") {
        std::vector<CVector> frames = {CVector::Constant(1, cplx(0.5, -3.0)),
                                       CVector::Constant(1, cplx(-0.2, 5.0)),
                                       CVector::Constant(1, cplx(0.0, 1.0))};
        CHECK(detect_symbols(a, frames) == std::vector<int>{1, -1, 1});
    }
    SUBCASE("noiseless MRC recovers x = -1") {
        RandomSource rng(2);
        CVector xi(3);
        for (int i = 0; i < 3; ++i) xi(i) = cplx(rng.normal(), rng.normal());
        std::vector<CVector> frames = {-xi};
        CHECK(detect_symbols(mrc_operator(xi), frames) == std::vector<int>{-1});
    }
    SUBCASE("high-SINR BER below the Gaussian tail bound") {
        // scalar channel, SINR = 100: BER oracle Q(sqrt(2*100)) ~ 7.7e-24, so
        // any error at all fails; allow the Monte Carlo slack of a few counts
        RandomSource rng(4);
        const int n = 10000;
        double sinr = 100.0, noise_var = 1.0;
        double amp = std::sqrt(sinr * noise_var);
        int errors = 0;
        std::vector<CVector> frames(1, CVector::Zero(1));
        CVector a = CVector::Ones(1);
        for (int i = 0; i < n; ++i) {
            int x = rng.uniform() < 0.5 ? 1 : -1;
            frames[0](0) = cplx(amp * x + std::sqrt(noise_var / 2.0) * rng.normal(),
                                std::sqrt(noise_var / 2.0) * rng.normal());
            errors += detect_symbols(a, frames)[0] != x;
        }
        double q_bound = 0.5 * std::erfc(std::sqrt(2.0 * sinr) / std::sqrt(2.0));
        CHECK(static_cast<double>(errors) / n <= q_bound + 3.0 / n);
    }
}
