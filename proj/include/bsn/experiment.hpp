#pragma once

#include <string>
#include <vector>

#include "bsn/allocator.hpp"
#include "bsn/config.hpp"
#include "bsn/measurement.hpp"
#include "bsn/topology.hpp"

namespace bsn {

struct ResultRecord {
    double power_dBm;
    DetectorKind detector;
    AllocMethod method;
    double sum_avg_sinr_dB;   // 10 log10 of the summed linear objective, all cores
    double mean_iterations;   // across cores; 0 for non-iterative methods
    double wall_time_seconds;
    bool repaired;
};

std::string results_csv(const std::vector<ResultRecord>& records);

// One sweep point evaluated for every requested method; topology is fixed
// across the whole sweep given the seed.
std::vector<ResultRecord> run_sweep(const ExperimentSpec& spec);
std::vector<ResultRecord> run_sweep(const ExperimentSpec& spec, const Topology& topology);

struct CoreConvergence {
    int core;
    ConvergenceTrace trace;
    double optimal_objective;  // exact oracle on the same (jittered) weights
};

struct ConvergenceStudy {
    std::vector<CoreConvergence> cores;
};

// Fig.-4 style study at the base transmit power; jitter from the solver
// params is applied to the weights before both solvers see them.
ConvergenceStudy run_convergence_study(const ExperimentSpec& spec, DetectorKind detector,
                                       std::uint64_t seed);
std::string convergence_csv(const ConvergenceStudy& study);

struct TimingRecord {
    DetectorKind detector;
    AllocMethod method;
    double mean_seconds;
};

std::vector<TimingRecord> run_timing_comparison(const ExperimentSpec& spec);
std::string timing_csv(const std::vector<TimingRecord>& records);

void write_file(const std::string& path, const std::string& content);

// FNV-1a over the canonical spec text; stable across runs.
std::uint64_t spec_hash(const ExperimentSpec& spec);
std::string run_manifest(const ExperimentSpec& spec);

}  // namespace bsn
