#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bsn/channel.hpp"
#include "bsn/config.hpp"

namespace bsn {

struct DegenerateChannelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// a = xi; throws on a zero channel.
CVector mrc_operator(const CVector& xi);

struct ZfOperator {
    CVector a;
    bool rank_deficient = false;  // cancellation not guaranteed when set
};

// SVD pseudo-inverse with cutoff maxdim * eps * sigma_max; sets the flag when
// the input is column-rank deficient.
CMatrix pseudo_inverse(const CMatrix& m, bool* rank_deficient = nullptr);

// a^H = q-th row of pinv(P). Rank decided by SVD with cutoff
// maxdim * eps * sigma_max.
ZfOperator zf_operator(const CMatrix& in_cell_channels, int q);

struct SinrBreakdown {
    double signal = 0.0;  // |a^H xi_k|^2
    double intra = 0.0;   // I^1
    double inter = 0.0;   // I^2
    double noise = 0.0;   // sigma^2 ||a||^2
    double sinr = 0.0;
};

SinrBreakdown instantaneous_sinr(const CVector& a, const CVector& xi_k,
                                 const std::vector<CVector>& intra_xis,
                                 const std::vector<CMatrix>& inter_covs, double noise_var);

// Variant taking the pre-summed inter-cell covariance (the quadratic form is
// linear in the covariance, so the sum can be shared across operators).
SinrBreakdown instantaneous_sinr(const CVector& a, const CVector& xi_k,
                                 const std::vector<CVector>& intra_xis,
                                 const CMatrix& inter_cov_sum, double noise_var);

// sign(Re(a^H r_i)) with exact zeros resolved to +1.
std::vector<int> detect_symbols(const CVector& a, const std::vector<CVector>& frames);

}  // namespace bsn
