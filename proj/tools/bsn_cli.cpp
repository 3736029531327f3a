#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "bsn/experiment.hpp"

namespace {

bsn::ExperimentSpec load_or_default(const std::string& config_path) {
    if (config_path.empty()) return bsn::default_spec();
    return bsn::load_spec(config_path);
}

void apply_overrides(bsn::ExperimentSpec& spec, std::uint64_t seed, bool seed_set,
                     const std::string& detector, int frames) {
    if (seed_set) spec.network.seed = seed;
    if (!detector.empty()) spec.detectors = {bsn::detector_from_string(detector)};
    if (frames > 0) spec.frames = frames;
}

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-cell backscatter sensor network simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir = "out", detector;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int frames = 0;
    app.add_option("--config", config_path, "experiment config file (INI)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--detector", detector, "restrict to one detector: mrc or zf");
    app.add_option("--frames", frames, "measurement frames J");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed override");

    auto* sweep = app.add_subcommand("sweep", "transmit-power sweep (Fig. 3 style)");
    auto* converge = app.add_subcommand("converge", "per-core convergence study (Fig. 4 style)");
    auto* timing = app.add_subcommand("timing", "solver timing comparison");
    auto* oracle = app.add_subcommand("oracle-check", "Max-Sum vs exact matching equivalence");
    auto* preset = app.add_subcommand("preset", "write a shipped preset config");
    bool preset_paper = false, preset_desk = false;
    preset->add_flag("--paper", preset_paper, "full-scale parameters (J=10000)");
    preset->add_flag("--desk", preset_desk, "CI-speed parameters (J=1000, 5 trials)");

    int oracle_instances = 500;
    oracle->add_option("--instances", oracle_instances, "number of random instances");

    CLI11_PARSE(app, argc, argv);
    seed_set = seed_opt->count() > 0;

    try {
        if (preset->parsed()) {
            if (preset_paper == preset_desk) {
                std::cerr << "preset: pass exactly one of --paper or --desk\n";
                return 1;
            }
            auto spec = preset_paper ? bsn::paper_preset() : bsn::desk_preset();
            std::string path = join(out_dir, preset_paper ? "paper.ini" : "desk.ini");
            bsn::write_file(path, bsn::format_spec(spec));
            std::cout << "wrote " << path << "\n";
            return 0;
        }

        bsn::ExperimentSpec spec = load_or_default(config_path);
        apply_overrides(spec, seed, seed_set, detector, frames);
        spec.output_dir = out_dir;
        spec.validate();
        bsn::write_file(join(out_dir, "manifest.txt"), bsn::run_manifest(spec));

        if (sweep->parsed()) {
            auto records = bsn::run_sweep(spec);
            std::string path = join(out_dir, "sweep.csv");
            bsn::write_file(path, bsn::results_csv(records));
            std::cout << "wrote " << path << " (" << records.size() << " rows)\n";
        } else if (converge->parsed()) {
            for (bsn::DetectorKind det : spec.detectors) {
                auto study = bsn::run_convergence_study(spec, det, spec.network.seed);
                std::string path = join(out_dir, "converge_" + bsn::to_string(det) + ".csv");
                bsn::write_file(path, bsn::convergence_csv(study));
                std::cout << "wrote " << path << "\n";
            }
        } else if (timing->parsed()) {
            auto records = bsn::run_timing_comparison(spec);
            std::string path = join(out_dir, "timing.csv");
            bsn::write_file(path, bsn::timing_csv(records));
            double t_maxsum = 0, t_exact = 0;
            for (const auto& r : records) {
                if (r.method == bsn::AllocMethod::MaxSum) t_maxsum += r.mean_seconds;
                if (r.method == bsn::AllocMethod::Exact) t_exact += r.mean_seconds;
            }
            std::cout << "wrote " << path;
            if (t_exact > 0)
                std::cout << "  (max_sum/exact time ratio " << t_maxsum / t_exact << ")";
            std::cout << "\n";
        } else if (oracle->parsed()) {
            // random per-group instances at the paper scale
            bsn::RandomSource rng(spec.network.seed ? spec.network.seed : 7);
            int mismatches = 0;
            for (int inst = 0; inst < oracle_instances; ++inst) {
                const int C = 8;
                bsn::Weights w;
                w.w.resize(1 + static_cast<int>(rng.index(2 * C)), C);
                for (int k = 0; k < w.w.rows(); ++k) {
                    w.tag_ids.push_back(k);
                    for (int c = 0; c < C; ++c) w.w(k, c) = rng.uniform();
                }
                bsn::Groups groups;
                std::vector<int> rows(w.w.rows());
                for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
                while (!rows.empty()) {
                    std::size_t take = std::min<std::size_t>(rows.size(), 1 + rng.index(C));
                    groups.emplace_back(rows.begin(), rows.begin() + take);
                    rows.erase(rows.begin(), rows.begin() + take);
                }
                w = bsn::apply_uniqueness_jitter(w, 1e-9, rng);
                auto ms = bsn::run_max_sum(w, groups, spec.solver);
                auto ex = bsn::exact_optimal(w, groups);
                double o1 = bsn::objective_value(w, groups, ms.assignment);
                double o2 = bsn::objective_value(w, groups, ex);
                if (std::abs(o1 - o2) > 1e-9 * std::max(1.0, std::abs(o2)) ||
                    ms.assignment.channel_of != ex.channel_of)
                    ++mismatches;
            }
            std::cout << "oracle-check: " << oracle_instances - mismatches << "/"
                      << oracle_instances << " instances matched the exact optimum\n";
            return mismatches == 0 ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
