#include "bsn/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bsn {

using std::numbers::pi;

double path_gain(double d, double nu, double lambda, double d0) {
    if (d0 <= 0.0) throw std::domain_error("path_gain: d0 must be > 0");
    if (d < d0) throw std::domain_error("path_gain: d < d0 is outside the model's validity");
    double ref = lambda / (4.0 * pi * d0);
    return std::pow(d0 / d, nu) * ref * ref;
}

CVector steering_vector(double angle, int n) {
    CVector e(n);
    double s = std::sin(angle);
    for (int p = 0; p < n; ++p) e(p) = std::polar(1.0, -pi * p * s);
    return e;
}

CVector sample_rician(const LinkStats& stats, RandomSource& rng) {
    const int n = static_cast<int>(stats.steering.size());
    const double sigma = std::sqrt(stats.sigma2);
    const double mean_scale = std::sqrt(stats.kappa / (stats.kappa + 1.0)) * sigma;
    const double dev = sigma / std::sqrt(2.0 * (stats.kappa + 1.0));  // per real dimension
    CVector h(n);
    for (int p = 0; p < n; ++p)
        h(p) = mean_scale * stats.steering(p) + cplx(dev * rng.normal(), dev * rng.normal());
    return h;
}

LinkModel build_link_model(const Topology& topology, const NetworkConfig& cfg) {
    const int B = topology.cores(), K = topology.tags();
    LinkModel links;
    links.dl.assign(B, std::vector<LinkStats>(K));
    links.ul.assign(K, std::vector<LinkStats>(B));
    for (int b = 0; b < B; ++b) {
        for (int k = 0; k < K; ++k) {
            double d = std::max(topology.distances(k, b), cfg.reference_distance_m);
            double nu = topology.cell_of[k] == b ? cfg.pathloss_exponent
                                                 : cfg.pathloss_exponent_cross;
            double s2 = path_gain(d, nu, cfg.wavelength_m, cfg.reference_distance_m);
            // azimuth core b -> tag k, reused as AoD and AoA
            double ang = std::atan2(topology.tag_positions[k][1] - topology.core_positions[b][1],
                                    topology.tag_positions[k][0] - topology.core_positions[b][0]);
            links.dl[b][k] = {s2, cfg.rician_dl(), steering_vector(ang, cfg.tx_antennas)};
            links.ul[k][b] = {s2, cfg.rician_ul(), steering_vector(ang, cfg.rx_antennas)};
        }
    }
    return links;
}

ChannelRealization realize_channels(const Topology& topology, const LinkModel& links,
                                    const NetworkConfig& cfg, RandomSource& rng,
                                    bool serving_only) {
    const int B = topology.cores(), K = topology.tags();
    ChannelRealization real;
    real.h_dl.assign(B, std::vector<CVector>(K));
    real.h_ul.assign(K, std::vector<CVector>(B));
    real.phi.setZero(K, B);
    for (int b = 0; b < B; ++b)
        for (int k = 0; k < K; ++k) real.h_dl[b][k] = sample_rician(links.dl[b][k], rng);
    for (int k = 0; k < K; ++k) {
        for (int b = 0; b < B; ++b) {
            if (serving_only && topology.cell_of[k] != b) continue;
            real.h_ul[k][b] = sample_rician(links.ul[k][b], rng);
            real.phi(k, b) = rng.uniform(0.0, 2.0 * pi);
        }
    }
    return real;
}

CVector scatter_gain(const ChannelRealization& real, int k, int b, const NetworkConfig& cfg) {
    const int B = static_cast<int>(real.h_dl.size());
    cplx downlink_sum = 0.0;
    for (int bp = 0; bp < B; ++bp)
        downlink_sum += std::sqrt(cfg.tx_power_w() / cfg.tx_antennas) * real.h_dl[bp][k].sum();
    cplx scale = (2.0 / pi) * downlink_sum * cfg.scatter_efficiency * cfg.gamma_delta();
    return scale * real.h_ul[k][b];
}

CVector compound_channel(const ChannelRealization& real, int k, int b, const NetworkConfig& cfg) {
    return scatter_gain(real, k, b, cfg) *
           (std::sqrt(cfg.symbol_period_s / 2.0) * std::cos(real.phi(k, b)));
}

CMatrix xi_covariance_analytic(int k, int b, const LinkModel& links, const NetworkConfig& cfg) {
    const int B = static_cast<int>(links.dl.size());
    const double p_per_ant = cfg.tx_power_w() / cfg.tx_antennas;

    // E|D|^2 for D = sum_b' sqrt(P/N_T) 1^T h^d_b'k. Illumination from distinct
    // cores adds in power: the LOS components of different cores carry
    // independent propagation phases, so their cross products average to zero.
    double e_abs_d2 = 0.0;
    for (int bp = 0; bp < B; ++bp) {
        const LinkStats& s = links.dl[bp][k];
        e_abs_d2 += p_per_ant * s.sigma2 *
                    (s.kappa * std::norm(s.steering.sum()) + cfg.tx_antennas) / (s.kappa + 1.0);
    }

    const LinkStats& u = links.ul[k][b];
    CMatrix ul_corr = (u.sigma2 / (u.kappa + 1.0)) *
                      (u.kappa * u.steering * u.steering.adjoint() +
                       CMatrix::Identity(cfg.rx_antennas, cfg.rx_antennas));

    double eta_dg = cfg.scatter_efficiency * cfg.gamma_delta();
    double prefactor = (cfg.symbol_period_s / 4.0) * (2.0 / pi) * (2.0 / pi) * eta_dg * eta_dg;
    return prefactor * e_abs_d2 * ul_corr;
}

CMatrix xi_covariance_empirical(const std::function<CVector()>& sampler, int n_samples) {
    if (n_samples < 1) throw std::invalid_argument("xi_covariance_empirical: n_samples < 1");
    CVector first = sampler();
    const int n = static_cast<int>(first.size());
    CMatrix acc = CMatrix::Zero(n, n);
    CVector mean = CVector::Zero(n);
    double scale2 = 0.0;
    auto take = [&](const CVector& x) {
        acc.noalias() += x * x.adjoint();
        mean += x;
        scale2 += x.squaredNorm();
    };
    take(first);
    for (int i = 1; i < n_samples; ++i) take(sampler());
    mean /= n_samples;
    double rms = std::sqrt(scale2 / n_samples);
    if (rms > 0.0 && mean.norm() > 0.05 * rms * std::sqrt(static_cast<double>(n)) &&
        n_samples >= 10000)
        throw std::runtime_error("xi_covariance_empirical: sample mean is not negligible");
    return acc / static_cast<double>(n_samples);
}

CompoundChannelTable build_compound_table(const ChannelRealization& real,
                                          const std::vector<int>& allocation,
                                          const Topology& topology, const NetworkConfig& cfg,
                                          bool serving_only) {
    const int B = topology.cores(), K = topology.tags();
    CompoundChannelTable table;
    table.allocation = allocation;
    table.xi.assign(K, std::vector<CVector>(B));
    for (int k = 0; k < K; ++k)
        for (int b = 0; b < B; ++b) {
            if (serving_only && topology.cell_of[k] != b) continue;
            table.xi[k][b] = compound_channel(real, k, b, cfg);
        }
    return table;
}

BasebandFrame synthesize_baseband(const CompoundChannelTable& table,
                                  const Eigen::MatrixXd& symbols, int subchannels,
                                  double noise_var, RandomSource& rng) {
    const int K = static_cast<int>(table.xi.size());
    const int B = K > 0 ? static_cast<int>(table.xi[0].size()) : 0;
    const int M = static_cast<int>(symbols.cols());
    if (symbols.rows() != K)
        throw std::invalid_argument("synthesize_baseband: symbol matrix must be K x M");

    int n_r = 0;
    for (int k = 0; k < K && n_r == 0; ++k)
        for (int b = 0; b < B && n_r == 0; ++b) n_r = static_cast<int>(table.xi[k][b].size());

    const double dev = std::sqrt(noise_var / 2.0);
    BasebandFrame frame;
    frame.noise_var = noise_var;
    frame.r.assign(B, std::vector<std::vector<CVector>>(
                          subchannels, std::vector<CVector>(M, CVector::Zero(n_r))));
    for (int b = 0; b < B; ++b) {
        for (int c = 0; c < subchannels; ++c) {
            for (int i = 0; i < M; ++i) {
                CVector& r = frame.r[b][c][i];
                for (int k = 0; k < K; ++k) {
                    if (table.allocation[k] != c || table.xi[k][b].size() == 0) continue;
                    r += table.xi[k][b] * symbols(k, i);
                }
                if (noise_var > 0.0)
                    for (int p = 0; p < n_r; ++p)
                        r(p) += cplx(dev * rng.normal(), dev * rng.normal());
            }
        }
    }
    return frame;
}

}  // namespace bsn
