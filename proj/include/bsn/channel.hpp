#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "bsn/config.hpp"
#include "bsn/rng.hpp"
#include "bsn/topology.hpp"

namespace bsn {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// (d0/d)^nu * (lambda / (4 pi d0))^2; throws std::domain_error for d < d0.
double path_gain(double d, double nu, double lambda, double d0);

// Half-wavelength ULA response, entry p = exp(-j pi p sin(angle)).
CVector steering_vector(double angle, int n);

// Second-order statistics of one Rician link.
struct LinkStats {
    double sigma2 = 1.0;  // normalized channel power, linear
    double kappa = 0.0;   // Rician factor, linear
    CVector steering;     // unit-modulus, length N_T or N_R
};

// CN( sqrt(kappa/(kappa+1)) sigma e,  sigma^2/(kappa+1) I )
CVector sample_rician(const LinkStats& stats, RandomSource& rng);

// One coherence-interval draw of every link in the network.
struct ChannelRealization {
    // h_dl[b][k]: core b -> tag k, length N_T
    std::vector<std::vector<CVector>> h_dl;
    // h_ul[k][b]: tag k -> core b, length N_R; may be left empty for cores a
    // caller never detects at (lean sampling keeps the measurement loop cheap)
    std::vector<std::vector<CVector>> h_ul;
    Eigen::MatrixXd phi;  // K x B tag-core phase mismatch in [0, 2pi)
};

// Per-link statistics derived from the topology (reciprocal sigma^2, geometric
// steering angles).
struct LinkModel {
    std::vector<std::vector<LinkStats>> dl;  // [b][k]
    std::vector<std::vector<LinkStats>> ul;  // [k][b]
};

LinkModel build_link_model(const Topology& topology, const NetworkConfig& cfg);

// serving_only: sample uplinks and phases only at each tag's serving core.
ChannelRealization realize_channels(const Topology& topology, const LinkModel& links,
                                    const NetworkConfig& cfg, RandomSource& rng,
                                    bool serving_only = false);

// g_kb = (2/pi) sum_b' sqrt(P_b'/N_T) (1^T h^d_b'k) eta (G0-G1) h^u_kb
CVector scatter_gain(const ChannelRealization& real, int k, int b, const NetworkConfig& cfg);

// xi_kb = g_kb sqrt(T/2) cos(Phi_kb)
CVector compound_channel(const ChannelRealization& real, int k, int b, const NetworkConfig& cfg);

// Analytic covariance of xi_kb over fading and Phi. Distinct cores' LOS
// illumination terms carry independent propagation phases, so their powers
// add: E|D|^2 = sum_b' (P_b'/N_T) sigma^2 (kappa |1^T e|^2 + N_T)/(kappa+1).
CMatrix xi_covariance_analytic(int k, int b, const LinkModel& links, const NetworkConfig& cfg);

// Sample covariance of independent draws from `sampler`. Asserts the
// empirical mean is small first (the analytic mean vanishes, E cos Phi = 0).
CMatrix xi_covariance_empirical(const std::function<CVector()>& sampler, int n_samples);

// xi vectors of every tag at every core under one allocation; xi is nonzero
// only on the tag's own subchannel.
struct CompoundChannelTable {
    std::vector<std::vector<CVector>> xi;  // [k][b]
    std::vector<int> allocation;           // tag -> subchannel in [0, C)
};

CompoundChannelTable build_compound_table(const ChannelRealization& real,
                                          const std::vector<int>& allocation,
                                          const Topology& topology, const NetworkConfig& cfg,
                                          bool serving_only = false);

// r_{b,i}^{(c)} = sum_{k in K_C(c)} xi_kb x_{k,i} + n,  n ~ CN(0, noise_var I)
struct BasebandFrame {
    // r[b][c][i], each an N_R vector
    std::vector<std::vector<std::vector<CVector>>> r;
    double noise_var = 0.0;
};

BasebandFrame synthesize_baseband(const CompoundChannelTable& table,
                                  const Eigen::MatrixXd& symbols,  // K x M of +/-1
                                  int subchannels, double noise_var, RandomSource& rng);

}  // namespace bsn
