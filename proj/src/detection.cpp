#include "bsn/detection.hpp"

#include <cmath>
#include <limits>

namespace bsn {

CVector mrc_operator(const CVector& xi) {
    if (xi.size() == 0 || xi.norm() == 0.0)
        throw DegenerateChannelError("mrc_operator: zero compound channel");
    return xi;
}

CMatrix pseudo_inverse(const CMatrix& m, bool* rank_deficient) {
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    double cutoff = std::max(m.rows(), m.cols()) * std::numeric_limits<double>::epsilon() *
                    (sv.size() > 0 ? sv(0) : 0.0);
    int rank = 0;
    Eigen::VectorXd inv_sv = Eigen::VectorXd::Zero(sv.size());
    for (int i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) {
            inv_sv(i) = 1.0 / sv(i);
            ++rank;
        }
    }
    if (rank_deficient) *rank_deficient = rank < std::min(m.rows(), m.cols());
    return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().adjoint();
}

ZfOperator zf_operator(const CMatrix& in_cell_channels, int q) {
    const int cols = static_cast<int>(in_cell_channels.cols());
    if (cols < 1 || q < 0 || q >= cols)
        throw std::invalid_argument("zf_operator: column index out of range");
    ZfOperator op;
    bool deficient = false;
    CMatrix pinv = pseudo_inverse(in_cell_channels, &deficient);
    op.a = pinv.row(q).adjoint();  // a such that a^H = [pinv]_{q,:}
    op.rank_deficient = deficient || in_cell_channels.rows() < cols;
    return op;
}

namespace {

SinrBreakdown finish(const CVector& a, const CVector& xi_k,
                     const std::vector<CVector>& intra_xis, double inter, double noise_var) {
    if (noise_var <= 0.0) throw std::domain_error("instantaneous_sinr: noise_var must be > 0");
    SinrBreakdown s;
    s.signal = std::norm(a.dot(xi_k));  // Eigen dot conjugates the first argument
    for (const auto& xi : intra_xis) s.intra += std::norm(a.dot(xi));
    s.inter = inter;
    s.noise = noise_var * a.squaredNorm();
    s.sinr = s.signal / (s.intra + s.inter + s.noise);
    return s;
}

double quad_form(const CVector& a, const CMatrix& c) {
    cplx v = a.dot(c * a);
    // Hermitian form; any imaginary residue is roundoff
    return std::max(v.real(), 0.0);
}

}  // namespace

SinrBreakdown instantaneous_sinr(const CVector& a, const CVector& xi_k,
                                 const std::vector<CVector>& intra_xis,
                                 const std::vector<CMatrix>& inter_covs, double noise_var) {
    double inter = 0.0;
    for (const auto& c : inter_covs) inter += quad_form(a, c);
    return finish(a, xi_k, intra_xis, inter, noise_var);
}

SinrBreakdown instantaneous_sinr(const CVector& a, const CVector& xi_k,
                                 const std::vector<CVector>& intra_xis,
                                 const CMatrix& inter_cov_sum, double noise_var) {
    double inter = inter_cov_sum.size() > 0 ? quad_form(a, inter_cov_sum) : 0.0;
    return finish(a, xi_k, intra_xis, inter, noise_var);
}

std::vector<int> detect_symbols(const CVector& a, const std::vector<CVector>& frames) {
    std::vector<int> out;
    out.reserve(frames.size());
    for (const auto& r : frames) out.push_back(a.dot(r).real() < 0.0 ? -1 : +1);
    return out;
}

}  // namespace bsn
