#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bsn/channel.hpp"

using namespace bsn;
using std::numbers::pi;

TEST_CASE("path gain") {
    SUBCASE("hand values") {
        // (0.3456 / 4pi)^2 with the first factor equal to 1
        double ref = std::pow(0.3456 / (4.0 * pi), 2.0);
        CHECK(path_gain(1.0, 2.1, 0.3456, 1.0) == doctest::Approx(ref).epsilon(1e-12));
        CHECK(ref == doctest::Approx(7.5636e-4).epsilon(2e-3));
        CHECK(path_gain(2.0, 2.1, 0.3456, 1.0) ==
              doctest::Approx(ref * std::pow(2.0, -2.1)).epsilon(1e-12));
    }
    SUBCASE("d = d0 boundary") {
        CHECK(path_gain(3.0, 2.1, 0.5, 3.0) ==
              doctest::Approx(std::pow(0.5 / (4.0 * pi * 3.0), 2.0)).epsilon(1e-12));
    }
    SUBCASE("d below d0 rejected") { CHECK_THROWS_AS(path_gain(0.5, 2.1, 0.3456, 1.0), std::domain_error); }
}

TEST_CASE("steering vector") {
    SUBCASE("broadside") {
        CVector e = steering_vector(0.0, 4);
        for (int p = 0; p < 4; ++p) CHECK(std::abs(e(p) - cplx(1.0, 0.0)) < 1e-14);
    }
    SUBCASE("single antenna") {
        CHECK(std::abs(steering_vector(1.234, 1)(0) - cplx(1.0, 0.0)) < 1e-14);
    }
    SUBCASE("endfire two antennas") {
        CVector e = steering_vector(pi / 2.0, 2);
        CHECK(std::abs(e(0) - cplx(1.0, 0.0)) < 1e-12);
        CHECK(std::abs(e(1) - cplx(-1.0, 0.0)) < 1e-12);
    }
    SUBCASE("unit modulus everywhere") {
        CVector e = steering_vector(0.7, 8);
        for (int p = 0; p < 8; ++p) CHECK(std::abs(e(p)) == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("rician sampling statistics") {
    RandomSource rng(123);
    SUBCASE("kappa -> inf collapses on the mean") {
        LinkStats s{1.0, 1e12, steering_vector(0.3, 4)};
        CVector h = sample_rician(s, rng);
        CVector mean = std::sqrt(s.kappa / (s.kappa + 1.0)) * s.steering;
        CHECK((h - mean).norm() / mean.norm() < 1e-5);
    }
    SUBCASE("kappa = 0 zero mean within 4 sigma") {
        const int n = 4, draws = 100000;
        LinkStats s{1.0, 0.0, steering_vector(0.3, n)};
        CVector acc = CVector::Zero(n);
        for (int i = 0; i < draws; ++i) acc += sample_rician(s, rng);
        acc /= draws;
        CHECK(acc.norm() <= 4.0 / std::sqrt(static_cast<double>(draws)) * std::sqrt(n));
    }
    SUBCASE("kappa = 10 dB scattered variance 1/11 within 5%") {
        const int n = 2, draws = 100000;
        double kappa = std::pow(10.0, 1.0);
        LinkStats s{1.0, kappa, steering_vector(0.1, n)};
        CVector mean = std::sqrt(kappa / (kappa + 1.0)) * s.steering;
        double acc = 0.0;
        for (int i = 0; i < draws; ++i) acc += (sample_rician(s, rng) - mean).squaredNorm();
        double per_entry_var = acc / draws / n;
        CHECK(per_entry_var == doctest::Approx(1.0 / 11.0).epsilon(0.05));
    }
}

namespace {
NetworkConfig scalar_config() {
    NetworkConfig cfg;
    cfg.cores = 1;
    cfg.tags = 1;
    cfg.tx_antennas = 1;
    cfg.rx_antennas = 4;
    cfg.tx_power_dBm = watt_to_dbm(1.0);
    cfg.scatter_efficiency = 0.2;
    cfg.gamma0 = 1.01;
    cfg.gamma1 = 0.0;
    cfg.symbol_period_s = 1e-4;
    return cfg;
}

ChannelRealization fixed_realization(const NetworkConfig& cfg, double phi) {
    ChannelRealization real;
    real.h_dl.assign(cfg.cores, std::vector<CVector>(cfg.tags, CVector::Ones(cfg.tx_antennas)));
    CVector h_ul = CVector::Zero(cfg.rx_antennas);
    h_ul(0) = 1.0;
    real.h_ul.assign(cfg.tags, std::vector<CVector>(cfg.cores, h_ul));
    real.phi.setConstant(cfg.tags, cfg.cores, phi);
    return real;
}
}  // namespace

TEST_CASE("compound channel hand values") {
    NetworkConfig cfg = scalar_config();
    SUBCASE("phi = pi/2 kills the channel") {
        auto real = fixed_realization(cfg, pi / 2.0);
        CHECK(compound_channel(real, 0, 0, cfg).norm() < 1e-18);
    }
    SUBCASE("phi = 0 hand evaluation") {
        auto real = fixed_realization(cfg, 0.0);
        CVector xi = compound_channel(real, 0, 0, cfg);
        double expect = (2.0 / pi) * 0.2 * 1.01 * std::sqrt(5e-5);
        CHECK(std::abs(xi(0).real() - expect) < 1e-8);
        CHECK(expect == doctest::Approx(9.093e-4).epsilon(1e-3));
        for (int p = 1; p < 4; ++p) CHECK(std::abs(xi(p)) < 1e-18);
    }
    SUBCASE("doubling the reflection gap doubles the norm") {
        auto real = fixed_realization(cfg, 0.4);
        double n1 = compound_channel(real, 0, 0, cfg).norm();
        cfg.gamma0 = 2.02;
        double n2 = compound_channel(real, 0, 0, cfg).norm();
        CHECK(n2 == doctest::Approx(2.0 * n1).epsilon(1e-12));
    }
}

TEST_CASE("analytic xi covariance") {
    SUBCASE("eta = 0 gives the zero matrix") {
        NetworkConfig cfg = scalar_config();
        LinkModel links;
        links.dl = {{LinkStats{1.0, 0.0, steering_vector(0, 1)}}};
        links.ul = {{LinkStats{1.0, 0.0, steering_vector(0, 4)}}};
        cfg.scatter_efficiency = 1e-300;  // validate() forbids exactly 0
        CMatrix c = xi_covariance_analytic(0, 0, links, cfg);
        CHECK(c.norm() < 1e-100);
    }
    SUBCASE("scalar Rayleigh reduction") {
        NetworkConfig cfg = scalar_config();
        cfg.rx_antennas = 1;
        double sd2 = 0.3, su2 = 0.7;
        LinkModel links;
        links.dl = {{LinkStats{sd2, 0.0, steering_vector(0, 1)}}};
        links.ul = {{LinkStats{su2, 0.0, steering_vector(0, 1)}}};
        CMatrix c = xi_covariance_analytic(0, 0, links, cfg);
        double dg = cfg.gamma_delta() * cfg.scatter_efficiency;
        double expect = (cfg.symbol_period_s / 4.0) * std::pow(2.0 / pi, 2.0) * dg * dg *
                        cfg.tx_power_w() * sd2 * su2;
        CHECK(c(0, 0).real() == doctest::Approx(expect).epsilon(1e-12));
        CHECK(std::abs(c(0, 0).imag()) < 1e-30);
    }
    SUBCASE("Hermitian positive semidefinite") {
        NetworkConfig cfg = scalar_config();
        LinkModel links;
        links.dl = {{LinkStats{0.5, 10.0, steering_vector(0.4, 1)}}};
        links.ul = {{LinkStats{0.5, 10.0, steering_vector(0.4, 4)}}};
        CMatrix c = xi_covariance_analytic(0, 0, links, cfg);
        CHECK((c - c.adjoint()).norm() < 1e-15 * c.norm());
        Eigen::SelfAdjointEigenSolver<CMatrix> es(c);
        CHECK(es.eigenvalues().minCoeff() >= -1e-15 * c.norm());
    }
}

TEST_CASE("empirical covariance basics") {
    SUBCASE("constant zero sampler") {
        CMatrix c = xi_covariance_empirical([] { return CVector::Zero(3); }, 100);
        CHECK(c.norm() == 0.0);
    }
    SUBCASE("scalar +-1 sampler has unit variance") {
        RandomSource rng(7);
        const int n = 40000;
        CMatrix c = xi_covariance_empirical(
            [&] {
                CVector x(1);
                x(0) = rng.uniform() < 0.5 ? -1.0 : 1.0;
                return x;
            },
            n);
        CHECK(std::abs(c(0, 0).real() - 1.0) <= 3.0 / std::sqrt(static_cast<double>(n)) + 1e-12);
    }
}

TEST_CASE("empirical covariance matches the analytic formula (multi-core)") {
    // Two cores with different downlink stats. Each core's illumination is
    // rotated by an independent uniform phase per draw: distinct cores' LOS
    // paths carry unrelated propagation phases, which is the incoherent
    // power-addition assumption behind the analytic cross-core sum.
    NetworkConfig cfg = scalar_config();
    cfg.cores = 2;
    cfg.rx_antennas = 3;
    LinkModel links;
    links.dl = {{LinkStats{0.8, 4.0, steering_vector(0.2, 1)}},
                {LinkStats{0.3, 9.0, steering_vector(-0.7, 1)}}};
    links.ul = {{LinkStats{0.8, 4.0, steering_vector(0.2, 3)},
                 LinkStats{0.3, 9.0, steering_vector(-0.7, 3)}}};

    CMatrix analytic = xi_covariance_analytic(0, 0, links, cfg);

    RandomSource rng(99);
    auto los_phase = [&] { return std::polar(1.0, rng.uniform(0.0, 2.0 * pi)); };
    auto sampler = [&] {
        ChannelRealization real;
        real.h_dl.assign(2, std::vector<CVector>(1));
        real.h_dl[0][0] = los_phase() * sample_rician(links.dl[0][0], rng);
        real.h_dl[1][0] = los_phase() * sample_rician(links.dl[1][0], rng);
        real.h_ul.assign(1, std::vector<CVector>(2));
        real.h_ul[0][0] = sample_rician(links.ul[0][0], rng);
        real.h_ul[0][1] = sample_rician(links.ul[0][1], rng);
        real.phi.setConstant(1, 2, rng.uniform(0.0, 2.0 * pi));
        return compound_channel(real, 0, 0, cfg);
    };
    CMatrix empirical = xi_covariance_empirical(sampler, 200000);
    CHECK((empirical - analytic).norm() / analytic.norm() < 0.05);
}

TEST_CASE("xi sparsity and zero mean over the compound table") {
    NetworkConfig cfg;
    cfg.cores = 2;
    cfg.tags = 6;
    cfg.subchannels = 3;
    cfg.training_sequences = 2;
    cfg.tx_antennas = 1;
    cfg.rx_antennas = 2;
    RandomSource rng(5);
    Topology topo = build_cellular_topology(cfg, rng);
    LinkModel links = build_link_model(topo, cfg);
    ChannelRealization real = realize_channels(topo, links, cfg, rng);
    std::vector<int> alloc = {0, 1, 2, 0, 1, 2};
    CompoundChannelTable table = build_compound_table(real, alloc, topo, cfg);

    // the xi vector stored for tag k lives on alloc[k]; the frame synthesis
    // places it only on that subchannel
    Eigen::MatrixXd sym = Eigen::MatrixXd::Ones(6, 1);
    BasebandFrame frame = synthesize_baseband(table, sym, cfg.subchannels, 0.0, rng);
    for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 3; ++c) {
            CVector expect = CVector::Zero(2);
            for (int k = 0; k < 6; ++k)
                if (alloc[k] == c) expect += table.xi[k][b];
            CHECK((frame.r[b][c][0] - expect).norm() < 1e-15);
        }
}

TEST_CASE("baseband synthesis hand cases") {
    NetworkConfig cfg = scalar_config();
    auto real = fixed_realization(cfg, 0.0);
    CompoundChannelTable table = {{{compound_channel(real, 0, 0, cfg)}}, {0}};
    RandomSource rng(1);

    SUBCASE("one tag, x = +1, zero noise reproduces xi") {
        Eigen::MatrixXd sym(1, 2);
        sym << 1.0, -1.0;
        BasebandFrame frame = synthesize_baseband(table, sym, 2, 0.0, rng);
        CHECK((frame.r[0][0][0] - table.xi[0][0]).norm() < 1e-18);
        CHECK((frame.r[0][0][1] + table.xi[0][0]).norm() < 1e-18);
        // empty subchannel stays silent
        CHECK(frame.r[0][1][0].norm() == 0.0);
    }
    SUBCASE("two tags superpose") {
        CompoundChannelTable two;
        two.allocation = {0, 0};
        CVector xi1 = CVector::Ones(4), xi2 = 2.0 * CVector::Ones(4);
        two.xi = {{xi1}, {xi2}};
        Eigen::MatrixXd sym(2, 1);
        sym << 1.0, -1.0;
        BasebandFrame frame = synthesize_baseband(two, sym, 1, 0.0, rng);
        CHECK((frame.r[0][0][0] - (xi1 - xi2)).norm() < 1e-15);
    }
}

TEST_CASE("reciprocal large-scale gain") {
    NetworkConfig cfg;
    cfg.cores = 3;
    cfg.tags = 9;
    RandomSource rng(11);
    Topology topo = build_cellular_topology(cfg, rng);
    LinkModel links = build_link_model(topo, cfg);
    for (int b = 0; b < 3; ++b)
        for (int k = 0; k < 9; ++k)
            CHECK(links.dl[b][k].sigma2 == links.ul[k][b].sigma2);
}
