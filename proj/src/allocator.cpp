#include "bsn/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace bsn {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Hungarian method (potentials formulation) for rectangular min-cost
// assignment with rows <= cols; every row gets a column.
std::vector<int> hungarian_min_cost(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, kInf);
        std::vector<char> used(m + 1, false);
        do {
            used[j0] = true;
            int i0 = p[j0], j1 = 0;
            double delta = kInf;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= m; ++j)
        if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

// Max-weight saturating matching for the rows of `rows` within one group.
void solve_group_exact(const Eigen::MatrixXd& w, const std::vector<int>& rows,
                       std::vector<int>& channel_of) {
    if (rows.empty()) return;
    if (rows.size() == 1) {
        int best = 0;
        w.row(rows[0]).maxCoeff(&best);
        channel_of[rows[0]] = best;
        return;
    }
    Eigen::MatrixXd cost(rows.size(), w.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) cost.row(i) = -w.row(rows[i]);
    auto match = hungarian_min_cost(cost);
    for (std::size_t i = 0; i < rows.size(); ++i) channel_of[rows[i]] = match[i];
}

}  // namespace

void check_groups_feasible(const Groups& groups, int n_channels) {
    for (std::size_t m = 0; m < groups.size(); ++m) {
        if (static_cast<int>(groups[m].size()) > n_channels) {
            std::ostringstream os;
            os << "group m=" << m << " has " << groups[m].size() << " tags but only "
               << n_channels << " subchannels";
            throw FeasibilityError(os.str());
        }
    }
}

MessageState MessageState::zero(int n_tags, int n_channels) {
    MessageState s;
    s.phi = Eigen::MatrixXd::Zero(n_tags, n_channels);
    s.rho = Eigen::MatrixXd::Zero(n_tags, n_channels);
    s.chi = Eigen::MatrixXd::Zero(n_tags, n_channels);
    return s;
}

void max_sum_iterate(MessageState& state, const Weights& weights, const Groups& groups,
                     double alpha) {
    const int n_tags = weights.n_tags();
    const int n_ch = weights.n_channels();
    const Eigen::MatrixXd& w = weights.w;

    // phi_kc = max_{c' != c} ( w_kc' - rho_kc'^{(n-1)} ), via best/second best
    Eigen::MatrixXd phi_new(n_tags, n_ch);
    for (int k = 0; k < n_tags; ++k) {
        double best = -kInf, second = -kInf;
        int best_c = -1;
        for (int c = 0; c < n_ch; ++c) {
            double s = w(k, c) - state.rho(k, c);
            if (s > best) {
                second = best;
                best = s;
                best_c = c;
            } else if (s > second) {
                second = s;
            }
        }
        for (int c = 0; c < n_ch; ++c) phi_new(k, c) = (c == best_c) ? second : best;
    }
    state.phi = alpha * state.phi + (1.0 - alpha) * phi_new;

    // rho_kc = [ max_{k' in K_bm \ k} ( w_k'c - phi_k'c ) ]^+  with the fresh phi
    Eigen::MatrixXd rho_new = Eigen::MatrixXd::Zero(n_tags, n_ch);
    for (const auto& group : groups) {
        if (group.size() < 2) continue;  // empty max -> -inf -> clamped to 0
        for (int c = 0; c < n_ch; ++c) {
            double best = -kInf, second = -kInf;
            int best_k = -1;
            for (int k : group) {
                double s = w(k, c) - state.phi(k, c);
                if (s > best) {
                    second = best;
                    best = s;
                    best_k = k;
                } else if (s > second) {
                    second = s;
                }
            }
            for (int k : group) {
                double v = (k == best_k) ? second : best;
                rho_new(k, c) = std::max(v, 0.0);
            }
        }
    }
    state.rho = alpha * state.rho + (1.0 - alpha) * rho_new;

    state.chi = state.phi + state.rho - w;
    ++state.n;
}

Assignment extract_assignment(const MessageState& state, const Weights& weights,
                              const Groups& groups) {
    const int n_tags = weights.n_tags();
    const int n_ch = weights.n_channels();

    Assignment out;
    out.channel_of.assign(n_tags, -1);

    // line 14: v_kc = 1 iff chi_kc <= 0
    bool clean = true;
    for (int k = 0; k < n_tags; ++k) {
        int marked = -1, n_marked = 0;
        for (int c = 0; c < n_ch; ++c) {
            if (state.chi(k, c) <= 0.0) {
                marked = c;
                ++n_marked;
            }
        }
        if (n_marked == 1) {
            out.channel_of[k] = marked;
        } else {
            clean = false;
        }
    }
    if (clean) {
        bool unique = true;
        for (const auto& group : groups) {
            std::vector<char> seen(n_ch, false);
            for (int k : group) {
                if (seen[out.channel_of[k]]) unique = false;
                seen[out.channel_of[k]] = true;
            }
        }
        if (unique) return out;
    }

    // repair: argmin chi per tag, then exact re-solve of contested groups
    out.repaired = true;
    for (int k = 0; k < n_tags; ++k) {
        int best = 0;
        for (int c = 1; c < n_ch; ++c)
            if (state.chi(k, c) < state.chi(k, best)) best = c;
        out.channel_of[k] = best;
    }
    for (const auto& group : groups) {
        std::vector<char> seen(n_ch, false);
        bool conflict = false;
        for (int k : group) {
            if (seen[out.channel_of[k]]) conflict = true;
            seen[out.channel_of[k]] = true;
        }
        if (conflict) solve_group_exact(weights.w, group, out.channel_of);
    }
    return out;
}

double nmae(const MessageState& state_n, const MessageState& state_prev) {
    double num = (state_n.chi - state_prev.chi).cwiseAbs().maxCoeff();
    double den = state_n.chi.cwiseAbs().maxCoeff();
    if (den == 0.0) return num == 0.0 ? 0.0 : kInf;
    return num / den;
}

MaxSumResult run_max_sum(const Weights& weights, const Groups& groups,
                         const SolverParams& params) {
    params.validate();
    const int n_ch = weights.n_channels();
    check_groups_feasible(groups, n_ch);

    MaxSumResult result;
    if (n_ch == 1) {
        // only one feasible point; nothing to iterate
        result.assignment.channel_of.assign(weights.n_tags(), 0);
        double obj = objective_value(weights, groups, result.assignment);
        result.trace.rows.push_back({1, 0.0, obj, true, false});
        result.trace.converged = true;
        result.trace.iterations = 1;
        return result;
    }

    MessageState state = MessageState::zero(weights.n_tags(), n_ch);
    MessageState prev = state;
    for (int n = 1; n <= params.max_iterations; ++n) {
        prev = state;
        max_sum_iterate(state, weights, groups, params.damping);
        double err = (n >= 2) ? nmae(state, prev) : kInf;

        Assignment a = extract_assignment(state, weights, groups);
        double obj = objective_value(weights, groups, a);
        result.trace.rows.push_back({n, err, obj, true, a.repaired});
        result.assignment = std::move(a);
        result.trace.iterations = n;
        if (err < params.epsilon) {
            result.trace.converged = true;
            break;
        }
    }
    return result;
}

Assignment exact_optimal(const Weights& weights, const Groups& groups) {
    check_groups_feasible(groups, weights.n_channels());
    Assignment out;
    out.channel_of.assign(weights.n_tags(), -1);
    for (const auto& group : groups) solve_group_exact(weights.w, group, out.channel_of);
    // tags not listed in any group take their per-tag argmax (constraint 11b inactive)
    for (int k = 0; k < weights.n_tags(); ++k) {
        if (out.channel_of[k] >= 0) continue;
        int best = 0;
        weights.w.row(k).maxCoeff(&best);
        out.channel_of[k] = best;
    }
    return out;
}

Assignment random_orthogonal_allocation(const Groups& groups, int n_tags, int n_channels,
                                        RandomSource& rng) {
    check_groups_feasible(groups, n_channels);
    Assignment out;
    out.channel_of.assign(n_tags, -1);
    std::vector<int> channels(n_channels);
    for (const auto& group : groups) {
        std::iota(channels.begin(), channels.end(), 0);
        // Fisher-Yates prefix of length |group|
        for (std::size_t i = 0; i < group.size(); ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng.index(channels.size() - i));
            std::swap(channels[i], channels[j]);
            out.channel_of[group[i]] = channels[i];
        }
    }
    for (int k = 0; k < n_tags; ++k)
        if (out.channel_of[k] < 0) out.channel_of[k] = static_cast<int>(rng.index(n_channels));
    return out;
}

double objective_value(const Weights& weights, const Groups& groups,
                       const Assignment& assignment) {
    const int n_tags = weights.n_tags();
    const int n_ch = weights.n_channels();
    if (static_cast<int>(assignment.channel_of.size()) != n_tags)
        throw ConstraintViolation("assignment size does not match tag count");
    for (int k = 0; k < n_tags; ++k) {
        int c = assignment.channel_of[k];
        if (c < 0 || c >= n_ch) {
            std::ostringstream os;
            os << "constraint (11c) violated: tag row " << k << " has no valid subchannel";
            throw ConstraintViolation(os.str());
        }
    }
    for (std::size_t m = 0; m < groups.size(); ++m) {
        std::vector<char> seen(n_ch, false);
        for (int k : groups[m]) {
            int c = assignment.channel_of[k];
            if (seen[c]) {
                std::ostringstream os;
                os << "constraint (11b) violated: group m=" << m << " reuses subchannel " << c;
                throw ConstraintViolation(os.str());
            }
            seen[c] = true;
        }
    }
    double obj = 0.0;
    for (int k = 0; k < n_tags; ++k) obj += weights.w(k, assignment.channel_of[k]);
    return obj;
}

Weights apply_uniqueness_jitter(const Weights& weights, double rel_magnitude,
                                RandomSource& rng) {
    Weights out = weights;
    if (rel_magnitude <= 0.0) return out;
    double scale = rel_magnitude * weights.w.cwiseAbs().maxCoeff();
    for (int k = 0; k < out.w.rows(); ++k)
        for (int c = 0; c < out.w.cols(); ++c) out.w(k, c) += rng.uniform(0.0, scale);
    return out;
}

std::string trace_csv(const ConvergenceTrace& trace) {
    std::ostringstream os;
    os.precision(12);
    os << "iteration,nmae,objective,feasible,repaired\n";
    for (const auto& r : trace.rows)
        os << r.iteration << "," << r.nmae << "," << r.objective << "," << (r.feasible ? 1 : 0)
           << "," << (r.repaired ? 1 : 0) << "\n";
    return os.str();
}

}  // namespace bsn
