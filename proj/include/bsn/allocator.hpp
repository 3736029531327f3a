#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bsn/config.hpp"
#include "bsn/rng.hpp"
#include "bsn/topology.hpp"

namespace bsn {

struct ConstraintViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class GKind { Identity, Log1p };

// Per-cell problem data: w(k, c) = g(avg SINR) for the cell's tags (rows are
// cell-local indices), and the training groups as lists of local row indices.
struct Weights {
    Eigen::MatrixXd w;             // n_tags x C
    std::vector<int> tag_ids;      // local row -> global tag id
    GKind g_kind = GKind::Identity;

    int n_tags() const { return static_cast<int>(w.rows()); }
    int n_channels() const { return static_cast<int>(w.cols()); }
};

using Groups = std::vector<std::vector<int>>;  // K_bm as local row indices

// v_kc in row form: channel_of[row] = assigned subchannel.
struct Assignment {
    std::vector<int> channel_of;
    bool repaired = false;
};

// phi / rho / chi messages of Algorithm 1, all n_tags x C.
struct MessageState {
    Eigen::MatrixXd phi, rho, chi;
    int n = 0;

    static MessageState zero(int n_tags, int n_channels);
};

struct TraceRow {
    int iteration;
    double nmae;
    double objective;
    bool feasible;
    bool repaired;
};

struct ConvergenceTrace {
    std::vector<TraceRow> rows;
    bool converged = false;  // NMAE < epsilon before n_max
    int iterations = 0;
};

struct MaxSumResult {
    Assignment assignment;
    ConvergenceTrace trace;
};

// One synchronous sweep of Algorithm 1 lines 4-11 (phi update + damping, then
// rho update + damping) followed by the chi recomputation of line 13.
void max_sum_iterate(MessageState& state, const Weights& weights, const Groups& groups,
                     double alpha);

// Line 14 plus the repair rule: per tag argmin chi (ties -> lowest channel),
// contested groups re-solved exactly. Always feasible when |K_bm| <= C.
Assignment extract_assignment(const MessageState& state, const Weights& weights,
                              const Groups& groups);

// max|chi_n - chi_prev| / max|chi_n|; 0/0 -> 0, x/0 -> +inf.
double nmae(const MessageState& state_n, const MessageState& state_prev);

MaxSumResult run_max_sum(const Weights& weights, const Groups& groups,
                         const SolverParams& params);

// Hungarian method per training group; the per-core problem decomposes over
// groups because the (m,c) uniqueness constraint couples only tags of one K_bm.
Assignment exact_optimal(const Weights& weights, const Groups& groups);

// Uniform random injective tag -> channel map per group.
Assignment random_orthogonal_allocation(const Groups& groups, int n_tags, int n_channels,
                                        RandomSource& rng);

// Sum of selected weights; throws ConstraintViolation naming the violated
// constraint if the assignment is infeasible.
double objective_value(const Weights& weights, const Groups& groups,
                       const Assignment& assignment);

// Additive uniform perturbation in [0, rel_magnitude * max|w|] per entry,
// making the optimum generically unique.
Weights apply_uniqueness_jitter(const Weights& weights, double rel_magnitude,
                                RandomSource& rng);

void check_groups_feasible(const Groups& groups, int n_channels);

std::string trace_csv(const ConvergenceTrace& trace);

}  // namespace bsn
