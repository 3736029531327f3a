#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "bsn/config.hpp"
#include "bsn/rng.hpp"

namespace bsn {

struct FeasibilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Point3 = std::array<double, 3>;

// Orthogonal +/-1 training sequences; columns of a Sylvester Hadamard matrix.
struct TrainingSet {
    Eigen::MatrixXd sequences;  // M_tr x M_tr, column m is x^(m)
};

TrainingSet hadamard_training_set(int m_tr);

// Network geometry plus the cell / training-group partition. Immutable after
// construction; safe to share read-only across workers.
struct Topology {
    std::vector<Point3> core_positions;
    std::vector<Point3> tag_positions;
    Eigen::MatrixXd distances;       // K x B, d_kb in meters
    std::vector<int> cell_of;        // tag -> serving core (argmin distance)
    std::vector<int> group_of;       // tag -> training index m in [0, M_tr)
    std::vector<double> subcarriers_hz;  // f^(c) = l_c / T

    int cores() const { return static_cast<int>(core_positions.size()); }
    int tags() const { return static_cast<int>(tag_positions.size()); }

    std::vector<int> tags_of_cell(int b) const;
    // K_bm members, indexed [m]; local tag ids are global.
    std::vector<std::vector<int>> groups_of_cell(int b, int m_tr) const;
};

// Hex-lattice cores (center plus rings, neighbor spacing sqrt(3)*R_core),
// tags uniform on the serving core's disk, K/B per core with the remainder
// spread round-robin.
Topology build_cellular_topology(const NetworkConfig& config, RandomSource& rng);

// Round-robin distribution of each cell's tags over the M_tr groups; throws
// FeasibilityError naming (b, m) when some group exceeds C.
void assign_training_groups(Topology& topology, int m_tr, int subchannels);

// Plain-text table (tag id, position, cell, group) for inspection.
std::string topology_table(const Topology& topology);

}  // namespace bsn
