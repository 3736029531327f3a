#include "bsn/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace bsn {

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct CellProblems {
    std::vector<Weights> weights;  // per core
    std::vector<Groups> groups;    // per core, local row indices
};

CellProblems build_cell_problems(const SinrTable& table, const Topology& topology,
                                 const NetworkConfig& cfg) {
    CellProblems out;
    for (int b = 0; b < topology.cores(); ++b) {
        Weights w = build_weights(table, topology, b, GKind::Identity);
        // map the global K_bm membership to local rows
        std::vector<int> local(topology.tags(), -1);
        for (std::size_t i = 0; i < w.tag_ids.size(); ++i) local[w.tag_ids[i]] = static_cast<int>(i);
        Groups groups(cfg.training_sequences);
        for (int k : w.tag_ids) groups[topology.group_of[k]].push_back(local[k]);
        out.weights.push_back(std::move(w));
        out.groups.push_back(std::move(groups));
    }
    return out;
}

}  // namespace

std::string results_csv(const std::vector<ResultRecord>& records) {
    std::ostringstream os;
    os.precision(12);
    os << "power_dBm,detector,method,sum_avg_sinr_dB,mean_iterations,wall_time_seconds,repaired\n";
    for (const auto& r : records)
        os << r.power_dBm << "," << to_string(r.detector) << "," << to_string(r.method) << ","
           << r.sum_avg_sinr_dB << "," << r.mean_iterations << "," << r.wall_time_seconds << ","
           << (r.repaired ? 1 : 0) << "\n";
    return os.str();
}

std::vector<ResultRecord> run_sweep(const ExperimentSpec& spec) {
    RandomSource rng(spec.network.seed);
    Topology topology = build_cellular_topology(spec.network, rng);
    return run_sweep(spec, topology);
}

std::vector<ResultRecord> run_sweep(const ExperimentSpec& spec, const Topology& topology) {
    spec.validate();
    std::vector<ResultRecord> records;
    for (std::size_t pi = 0; pi < spec.power_sweep_dBm.size(); ++pi) {
        for (std::size_t di = 0; di < spec.detectors.size(); ++di) {
            NetworkConfig cfg = spec.network;
            cfg.tx_power_dBm = spec.power_sweep_dBm[pi];
            DetectorKind det = spec.detectors[di];
            std::uint64_t seed = derive_seed(spec.network.seed, pi + 1, di + 1);
            SinrTable table = run_measurement_phase(topology, cfg, spec.frames, det, seed);
            CellProblems cells = build_cell_problems(table, topology, cfg);

            for (AllocMethod method : spec.methods) {
                double t0 = now_seconds();
                double sum_obj = 0.0, iter_sum = 0.0;
                bool repaired = false;
                for (int b = 0; b < topology.cores(); ++b) {
                    const Weights& w = cells.weights[b];
                    const Groups& g = cells.groups[b];
                    if (method == AllocMethod::MaxSum) {
                        MaxSumResult r = run_max_sum(w, g, spec.solver);
                        sum_obj += objective_value(w, g, r.assignment);
                        iter_sum += r.trace.iterations;
                        repaired = repaired || r.assignment.repaired;
                    } else if (method == AllocMethod::Exact) {
                        sum_obj += objective_value(w, g, exact_optimal(w, g));
                    } else {
                        RandomSource draw_rng(derive_seed(seed, 0xBA5EULL, b));
                        double acc = 0.0;
                        for (int t = 0; t < spec.random_draws; ++t) {
                            Assignment a = random_orthogonal_allocation(
                                g, w.n_tags(), w.n_channels(), draw_rng);
                            acc += objective_value(w, g, a);
                        }
                        sum_obj += acc / spec.random_draws;
                    }
                }
                records.push_back({spec.power_sweep_dBm[pi], det, method,
                                   linear_to_db(sum_obj), iter_sum / topology.cores(),
                                   now_seconds() - t0, repaired});
            }
        }
    }
    return records;
}

ConvergenceStudy run_convergence_study(const ExperimentSpec& spec, DetectorKind detector,
                                       std::uint64_t seed) {
    spec.validate();
    RandomSource topo_rng(seed);
    Topology topology = build_cellular_topology(spec.network, topo_rng);
    SinrTable table = run_measurement_phase(topology, spec.network, spec.frames, detector,
                                            derive_seed(seed, 0xC0DEULL));
    CellProblems cells = build_cell_problems(table, topology, spec.network);

    ConvergenceStudy study;
    for (int b = 0; b < topology.cores(); ++b) {
        Weights w = cells.weights[b];
        if (spec.solver.jitter > 0.0) {
            RandomSource jrng(derive_seed(seed, 0x7177E4ULL, b));
            w = apply_uniqueness_jitter(w, spec.solver.jitter, jrng);
        }
        MaxSumResult r = run_max_sum(w, cells.groups[b], spec.solver);
        double opt = objective_value(w, cells.groups[b], exact_optimal(w, cells.groups[b]));
        study.cores.push_back({b, std::move(r.trace), opt});
    }
    return study;
}

std::string convergence_csv(const ConvergenceStudy& study) {
    std::ostringstream os;
    os.precision(12);
    os << "core,iteration,nmae,objective,gap_to_optimal,feasible,repaired\n";
    for (const auto& c : study.cores)
        for (const auto& r : c.trace.rows)
            os << c.core << "," << r.iteration << "," << r.nmae << "," << r.objective << ","
               << c.optimal_objective - r.objective << "," << (r.feasible ? 1 : 0) << ","
               << (r.repaired ? 1 : 0) << "\n";
    return os.str();
}

std::vector<TimingRecord> run_timing_comparison(const ExperimentSpec& spec) {
    std::vector<ResultRecord> records = run_sweep(spec);
    std::vector<TimingRecord> out;
    for (DetectorKind det : spec.detectors) {
        for (AllocMethod method : spec.methods) {
            double acc = 0.0;
            int n = 0;
            for (const auto& r : records)
                if (r.detector == det && r.method == method) {
                    acc += r.wall_time_seconds;
                    ++n;
                }
            if (n > 0) out.push_back({det, method, acc / n});
        }
    }
    return out;
}

std::string timing_csv(const std::vector<TimingRecord>& records) {
    std::ostringstream os;
    os.precision(6);
    os << "detector,method,mean_seconds\n";
    for (const auto& r : records)
        os << to_string(r.detector) << "," << to_string(r.method) << "," << r.mean_seconds << "\n";
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << content;
    if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

std::uint64_t spec_hash(const ExperimentSpec& spec) {
    std::string text = format_spec(spec);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string run_manifest(const ExperimentSpec& spec) {
    std::ostringstream os;
    os << "config_hash = " << std::hex << spec_hash(spec) << std::dec << "\n"
       << "seed = " << spec.network.seed << "\n";
    return os.str();
}

}  // namespace bsn
