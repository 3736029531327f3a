#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsn {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Static description of the network: geometry parameters, RF parameters
// and the per-link budget. All powers linear unless the name says dB/dBm.
struct NetworkConfig {
    int cores = 7;                 // B
    int tags = 140;                // K
    int subchannels = 8;           // C
    int training_sequences = 8;    // M_tr

    double cell_radius_m = 6.0;
    double core_height_m = 2.0;
    double tag_height_min_m = 0.0;
    double tag_height_max_m = 1.0;

    double wavelength_m = 0.3456;
    double pathloss_exponent = 2.1;
    // Exponent for links between a tag and a non-serving core. The in-cell
    // exponent is specified for serving links only; cross-cell paths are
    // obstructed in an indoor deployment and decay faster.
    double pathloss_exponent_cross = 4.0;
    double reference_distance_m = 1.0;
    double rician_dl_dB = 10.0;
    double rician_ul_dB = 10.0;
    double tx_power_dBm = 20.0;
    double noise_figure_dB = 4.0;

    int tx_antennas = 1;           // N_T
    int rx_antennas = 4;           // N_R

    double symbol_period_s = 1e-4; // T
    double gamma0 = 0.47;
    double gamma1 = -0.54;
    double scatter_efficiency = 0.2;   // eta
    int subcarrier_step = 2;           // l_c = step * c, f^(c) = l_c / T

    // Explicit override of the noise variance (linear watts). When unset the
    // default is -174 dBm + NF: the sqrt(2/T)-normalized correlator leaves the
    // post-matched-filter noise variance equal to the PSD itself.
    std::optional<double> noise_var_w;

    std::uint64_t seed = 1;

    double tx_power_w() const;
    double noise_var() const;
    double rician_dl() const;    // linear kappa
    double rician_ul() const;
    double gamma_delta() const { return gamma0 - gamma1; }

    void validate() const;       // throws ConfigError on a bad field
};

struct SolverParams {
    int max_iterations = 100;    // n_max
    double damping = 0.05;       // alpha
    double epsilon = 1e-5;       // NMAE threshold
    double jitter = 0.0;         // relative uniqueness perturbation, 0 = off

    void validate() const;
};

enum class DetectorKind { MRC, ZF };
enum class AllocMethod { MaxSum, Exact, RandomOrthogonal };

std::string to_string(DetectorKind d);
std::string to_string(AllocMethod m);
DetectorKind detector_from_string(const std::string& s);
AllocMethod method_from_string(const std::string& s);

struct ExperimentSpec {
    NetworkConfig network;
    SolverParams solver;

    std::vector<double> power_sweep_dBm;
    std::vector<DetectorKind> detectors{DetectorKind::MRC, DetectorKind::ZF};
    std::vector<AllocMethod> methods{AllocMethod::MaxSum, AllocMethod::Exact,
                                     AllocMethod::RandomOrthogonal};
    int frames = 1000;           // J
    int trials = 1;
    int random_draws = 1000;     // draws for the random-orthogonal baseline mean
    std::string output_dir = "out";

    void validate() const;
};

ExperimentSpec default_spec();

// Shipped presets. "paper" uses the full measurement length; "desk" is the
// CI-speed variant with J = 1000 and 5 trials.
ExperimentSpec paper_preset();
ExperimentSpec desk_preset();

// INI-style key/value config with [section] headers. Unknown keys and
// malformed lines are rejected with a line-numbered diagnostic.
ExperimentSpec load_spec(const std::string& path);
ExperimentSpec parse_spec(const std::string& text, const std::string& origin = "<string>");
std::string format_spec(const ExperimentSpec& spec);

double dbm_to_watt(double dbm);
double watt_to_dbm(double w);
double db_to_linear(double db);
double linear_to_db(double x);

}  // namespace bsn
