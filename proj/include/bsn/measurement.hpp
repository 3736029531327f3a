#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bsn/allocator.hpp"
#include "bsn/channel.hpp"
#include "bsn/config.hpp"
#include "bsn/topology.hpp"

namespace bsn {

struct FrequencyAllocation {
    std::vector<int> channel_of;  // tag -> subchannel in [0, C)
};

// Average SINR estimate per (tag, subchannel) with the visit counts behind it.
struct SinrTable {
    Eigen::MatrixXd avg;     // K x C, linear
    Eigen::MatrixXi counts;  // |J_kb^(c)|
};

// Balanced per-frame allocation: each tag follows a private random permutation
// of the C channels, redrawn every C frames, so visit counts per (k,c) over J
// frames land in {floor(J/C), ceil(J/C)}.
FrequencyAllocation frame_allocation(int n_tags, int n_channels, int frame_index,
                                     std::uint64_t seed);

SinrTable run_measurement_phase(const Topology& topology, const NetworkConfig& cfg,
                                int frames, DetectorKind detector, std::uint64_t seed);

// Single-frame SINR of every tag at its serving core (shared by the
// measurement loop and tests).
std::vector<double> frame_sinrs(const Topology& topology, const NetworkConfig& cfg,
                                const LinkModel& links,
                                const std::vector<CMatrix>& xi_cov,  // [k*B + b]
                                const ChannelRealization& real,
                                const FrequencyAllocation& alloc, DetectorKind detector);

// Precomputed analytic covariances for every (tag, core) pair, k*B + b layout.
std::vector<CMatrix> all_xi_covariances(const Topology& topology, const LinkModel& links,
                                        const NetworkConfig& cfg);

// rows: tag, core, subchannel, count, avg_linear, avg_dB
std::string sinr_table_csv(const SinrTable& table, const Topology& topology);

Weights build_weights(const SinrTable& table, const Topology& topology, int cell,
                      GKind g_kind);

}  // namespace bsn
