#include "bsn/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bsn {

TrainingSet hadamard_training_set(int m_tr) {
    if (m_tr < 1 || (m_tr & (m_tr - 1)) != 0)
        throw ConfigError("hadamard_training_set: size " + std::to_string(m_tr) +
                          " is not a power of two");
    Eigen::MatrixXd h(1, 1);
    h(0, 0) = 1.0;
    while (h.rows() < m_tr) {
        Eigen::MatrixXd next(2 * h.rows(), 2 * h.cols());
        next << h, h, h, -h;
        h = std::move(next);
    }
    return TrainingSet{std::move(h)};
}

std::vector<int> Topology::tags_of_cell(int b) const {
    std::vector<int> out;
    for (int k = 0; k < tags(); ++k)
        if (cell_of[k] == b) out.push_back(k);
    return out;
}

std::vector<std::vector<int>> Topology::groups_of_cell(int b, int m_tr) const {
    std::vector<std::vector<int>> groups(m_tr);
    for (int k = 0; k < tags(); ++k)
        if (cell_of[k] == b) groups[group_of[k]].push_back(k);
    return groups;
}

namespace {

// Hex lattice points sorted by ring then angle; neighbor spacing `s`.
std::vector<Point3> hex_core_layout(int count, double s, double height) {
    struct Cand {
        int ring;
        double angle;
        double x, y;
    };
    std::vector<Cand> cands;
    int max_ring = 1;
    while (1 + 3 * max_ring * (max_ring + 1) < count) ++max_ring;
    const double ux = s, uy = 0.0;
    const double wx = 0.5 * s, wy = 0.5 * std::sqrt(3.0) * s;
    for (int p = -max_ring; p <= max_ring; ++p) {
        for (int q = -max_ring; q <= max_ring; ++q) {
            int ring = (std::abs(p) + std::abs(q) + std::abs(p + q)) / 2;
            if (ring > max_ring) continue;
            double x = p * ux + q * wx;
            double y = p * uy + q * wy;
            cands.push_back({ring, std::atan2(y, x), x, y});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.ring != b.ring) return a.ring < b.ring;
        return a.angle < b.angle;
    });
    std::vector<Point3> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back({cands[i].x, cands[i].y, height});
    return out;
}

double dist3(const Point3& a, const Point3& b) {
    double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace

Topology build_cellular_topology(const NetworkConfig& config, RandomSource& rng) {
    config.validate();
    Topology t;
    const double spacing = std::sqrt(3.0) * config.cell_radius_m;
    t.core_positions = hex_core_layout(config.cores, spacing, config.core_height_m);

    // K/B tags per core, remainder round-robin over the first cores.
    t.tag_positions.resize(config.tags);
    for (int k = 0; k < config.tags; ++k) {
        int home = k % config.cores;
        const Point3& c = t.core_positions[home];
        double r = config.cell_radius_m * std::sqrt(rng.uniform());
        double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
        double h = rng.uniform(config.tag_height_min_m, config.tag_height_max_m);
        t.tag_positions[k] = {c[0] + r * std::cos(theta), c[1] + r * std::sin(theta), h};
    }

    t.distances.resize(config.tags, config.cores);
    t.cell_of.resize(config.tags);
    for (int k = 0; k < config.tags; ++k) {
        int best = 0;
        for (int b = 0; b < config.cores; ++b) {
            t.distances(k, b) = dist3(t.tag_positions[k], t.core_positions[b]);
            if (t.distances(k, b) < t.distances(k, best)) best = b;
        }
        t.cell_of[k] = best;  // argmin wins even if the tag drifted off its home disk
    }

    t.subcarriers_hz.resize(config.subchannels);
    for (int c = 0; c < config.subchannels; ++c)
        t.subcarriers_hz[c] = config.subcarrier_step * (c + 1) / config.symbol_period_s;

    assign_training_groups(t, config.training_sequences, config.subchannels);
    return t;
}

void assign_training_groups(Topology& topology, int m_tr, int subchannels) {
    topology.group_of.assign(topology.tags(), 0);
    for (int b = 0; b < topology.cores(); ++b) {
        int pos = 0;
        for (int k = 0; k < topology.tags(); ++k) {
            if (topology.cell_of[k] != b) continue;
            topology.group_of[k] = pos % m_tr;
            ++pos;
        }
        // |K_bm| <= C or problem (11) has no feasible point for this cell
        int full = pos / m_tr, extra = pos % m_tr;
        int largest = full + (extra > 0 ? 1 : 0);
        if (largest > subchannels) {
            int m_bad = 0;  // round-robin puts the overflow in group 0 first
            std::ostringstream os;
            os << "training group (b=" << b << ", m=" << m_bad << ") has " << largest
               << " tags but only " << subchannels << " subchannels exist";
            throw FeasibilityError(os.str());
        }
    }
}

std::string topology_table(const Topology& topology) {
    std::ostringstream os;
    os << "# tag x y z cell group\n";
    for (int k = 0; k < topology.tags(); ++k) {
        const auto& p = topology.tag_positions[k];
        os << k << " " << p[0] << " " << p[1] << " " << p[2] << " " << topology.cell_of[k]
           << " " << topology.group_of[k] << "\n";
    }
    return os.str();
}

}  // namespace bsn
