#include "bsn/measurement.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "bsn/detection.hpp"

namespace bsn {

FrequencyAllocation frame_allocation(int n_tags, int n_channels, int frame_index,
                                     std::uint64_t seed) {
    FrequencyAllocation alloc;
    alloc.channel_of.resize(n_tags);
    const int block = frame_index / n_channels;
    const int slot = frame_index % n_channels;
    std::vector<int> perm(n_channels);
    for (int k = 0; k < n_tags; ++k) {
        RandomSource rng(derive_seed(seed, static_cast<std::uint64_t>(k),
                                     static_cast<std::uint64_t>(block)));
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = n_channels - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.index(i + 1)]);
        alloc.channel_of[k] = perm[slot];
    }
    return alloc;
}

std::vector<CMatrix> all_xi_covariances(const Topology& topology, const LinkModel& links,
                                        const NetworkConfig& cfg) {
    const int B = topology.cores(), K = topology.tags();
    std::vector<CMatrix> cov(static_cast<std::size_t>(K) * B);
    for (int k = 0; k < K; ++k)
        for (int b = 0; b < B; ++b) cov[k * B + b] = xi_covariance_analytic(k, b, links, cfg);
    return cov;
}

std::vector<double> frame_sinrs(const Topology& topology, const NetworkConfig& cfg,
                                const LinkModel& links, const std::vector<CMatrix>& xi_cov,
                                const ChannelRealization& real,
                                const FrequencyAllocation& alloc, DetectorKind detector) {
    (void)links;
    const int B = topology.cores(), K = topology.tags(), C = cfg.subchannels;
    const int n_r = cfg.rx_antennas;
    const double noise = cfg.noise_var();

    // serving-core compound channels
    std::vector<CVector> xi(K);
    for (int k = 0; k < K; ++k) xi[k] = compound_channel(real, k, topology.cell_of[k], cfg);

    // members[b][c]: cell-b tags on subchannel c
    std::vector<std::vector<std::vector<int>>> members(
        B, std::vector<std::vector<int>>(C));
    for (int k = 0; k < K; ++k)
        members[topology.cell_of[k]][alloc.channel_of[k]].push_back(k);

    // inter(b,c) = sum of xi covariances of other-cell tags on c, seen at b
    std::vector<std::vector<CMatrix>> inter(B, std::vector<CMatrix>(C));
    for (int b = 0; b < B; ++b) {
        for (int c = 0; c < C; ++c) {
            CMatrix sum = CMatrix::Zero(n_r, n_r);
            for (int k = 0; k < K; ++k)
                if (alloc.channel_of[k] == c && topology.cell_of[k] != b)
                    sum += xi_cov[k * B + b];
            inter[b][c] = std::move(sum);
        }
    }

    std::vector<double> out(K, 0.0);
    std::vector<CVector> intra;
    for (int b = 0; b < B; ++b) {
        for (int c = 0; c < C; ++c) {
            const auto& cell_tags = members[b][c];
            if (cell_tags.empty()) continue;
            CMatrix p_mat(n_r, static_cast<int>(cell_tags.size()));
            for (std::size_t q = 0; q < cell_tags.size(); ++q) p_mat.col(q) = xi[cell_tags[q]];
            CMatrix pinv;  // one decomposition shared by all tags on (b, c)
            if (detector == DetectorKind::ZF) pinv = pseudo_inverse(p_mat);
            for (std::size_t q = 0; q < cell_tags.size(); ++q) {
                int k = cell_tags[q];
                if (xi[k].norm() == 0.0) continue;  // cos(Phi) hit zero, SINR is 0
                CVector a;
                if (detector == DetectorKind::MRC) {
                    a = mrc_operator(xi[k]);
                } else {
                    a = pinv.row(static_cast<int>(q)).adjoint();
                    if (a.norm() == 0.0) continue;
                }
                intra.clear();
                for (int kp : cell_tags)
                    if (kp != k) intra.push_back(xi[kp]);
                out[k] = instantaneous_sinr(a, xi[k], intra, inter[b][c], noise).sinr;
            }
        }
    }
    return out;
}

SinrTable run_measurement_phase(const Topology& topology, const NetworkConfig& cfg,
                                int frames, DetectorKind detector, std::uint64_t seed) {
    const int K = topology.tags(), C = cfg.subchannels;
    LinkModel links = build_link_model(topology, cfg);
    std::vector<CMatrix> xi_cov = all_xi_covariances(topology, links, cfg);

    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(K, C);
    Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(K, C);
    const std::uint64_t alloc_seed = derive_seed(seed, 0xA110CULL);
    for (int j = 0; j < frames; ++j) {
        RandomSource frame_rng(derive_seed(seed, static_cast<std::uint64_t>(j) + 1));
        ChannelRealization real =
            realize_channels(topology, links, cfg, frame_rng, /*serving_only=*/true);
        FrequencyAllocation alloc = frame_allocation(K, C, j, alloc_seed);
        std::vector<double> sinrs = frame_sinrs(topology, cfg, links, xi_cov, real, alloc, detector);
        for (int k = 0; k < K; ++k) {
            sum(k, alloc.channel_of[k]) += sinrs[k];
            counts(k, alloc.channel_of[k]) += 1;
        }
    }

    SinrTable table;
    table.counts = counts;
    table.avg = Eigen::MatrixXd::Zero(K, C);
    for (int k = 0; k < K; ++k)
        for (int c = 0; c < C; ++c)
            if (counts(k, c) > 0) table.avg(k, c) = sum(k, c) / counts(k, c);
    return table;
}

std::string sinr_table_csv(const SinrTable& table, const Topology& topology) {
    std::ostringstream os;
    os.precision(12);
    os << "tag,core,subchannel,count,avg_linear,avg_dB\n";
    for (int k = 0; k < table.avg.rows(); ++k)
        for (int c = 0; c < table.avg.cols(); ++c)
            os << k << "," << topology.cell_of[k] << "," << c << "," << table.counts(k, c)
               << "," << table.avg(k, c) << ","
               << (table.avg(k, c) > 0 ? linear_to_db(table.avg(k, c)) : -INFINITY) << "\n";
    return os.str();
}

Weights build_weights(const SinrTable& table, const Topology& topology, int cell,
                      GKind g_kind) {
    Weights weights;
    weights.g_kind = g_kind;
    weights.tag_ids = topology.tags_of_cell(cell);
    const int n = static_cast<int>(weights.tag_ids.size());
    const int C = static_cast<int>(table.avg.cols());
    weights.w.resize(n, C);
    for (int i = 0; i < n; ++i) {
        int k = weights.tag_ids[i];
        for (int c = 0; c < C; ++c) {
            if (table.counts(k, c) == 0) {
                std::ostringstream os;
                os << "SINR table has no measurement for tag " << k << ", subchannel " << c;
                throw ConstraintViolation(os.str());
            }
            double v = table.avg(k, c);
            weights.w(i, c) = (g_kind == GKind::Identity) ? v : std::log1p(v);
        }
    }
    return weights;
}

}  // namespace bsn
