#include "bsn/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bsn {

double dbm_to_watt(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
double watt_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double x) { return 10.0 * std::log10(x); }

double NetworkConfig::tx_power_w() const { return dbm_to_watt(tx_power_dBm); }
double NetworkConfig::rician_dl() const { return db_to_linear(rician_dl_dB); }
double NetworkConfig::rician_ul() const { return db_to_linear(rician_ul_dB); }

double NetworkConfig::noise_var() const {
    if (noise_var_w) return *noise_var_w;
    return dbm_to_watt(-174.0 + noise_figure_dB);
}

void NetworkConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("network config: " + msg); };
    if (cores < 1) fail("cores must be >= 1");
    if (tags < 1) fail("tags must be >= 1");
    if (subchannels < 1) fail("subchannels must be >= 1");
    if (training_sequences < 1) fail("training_sequences must be >= 1");
    if (cell_radius_m <= 0) fail("cell_radius_m must be > 0");
    if (tag_height_max_m < tag_height_min_m) fail("tag height range inverted");
    if (wavelength_m <= 0) fail("wavelength_m must be > 0");
    if (reference_distance_m <= 0) fail("reference_distance_m must be > 0");
    if (pathloss_exponent < 0 || pathloss_exponent_cross < 0) fail("path-loss exponents must be >= 0");
    if (tx_antennas < 1 || rx_antennas < 1) fail("antenna counts must be >= 1");
    if (symbol_period_s <= 0) fail("symbol_period_s must be > 0");
    if (std::abs(gamma0) > 1.0 || std::abs(gamma1) > 1.0) fail("|Gamma| must be <= 1");
    if (gamma_delta() == 0.0) fail("reflection coefficients must differ");
    if (scatter_efficiency <= 0 || scatter_efficiency > 1) fail("scatter_efficiency must be in (0,1]");
    if (subcarrier_step < 1) fail("subcarrier_step must be >= 1");
    if (noise_var() <= 0) fail("noise variance must be > 0");
}

void SolverParams::validate() const {
    if (max_iterations < 1) throw ConfigError("solver: max_iterations must be >= 1");
    if (damping < 0.0 || damping >= 1.0) throw ConfigError("solver: damping must be in [0,1)");
    if (epsilon <= 0.0) throw ConfigError("solver: epsilon must be > 0");
    if (jitter < 0.0) throw ConfigError("solver: jitter must be >= 0");
}

void ExperimentSpec::validate() const {
    network.validate();
    solver.validate();
    if (power_sweep_dBm.empty()) throw ConfigError("experiment: power_sweep_dBm is empty");
    if (detectors.empty()) throw ConfigError("experiment: detectors is empty");
    if (methods.empty()) throw ConfigError("experiment: methods is empty");
    if (frames < 1) throw ConfigError("experiment: frames must be >= 1");
    if (trials < 1) throw ConfigError("experiment: trials must be >= 1");
    if (random_draws < 1) throw ConfigError("experiment: random_draws must be >= 1");
}

std::string to_string(DetectorKind d) { return d == DetectorKind::MRC ? "mrc" : "zf"; }

std::string to_string(AllocMethod m) {
    switch (m) {
        case AllocMethod::MaxSum: return "max_sum";
        case AllocMethod::Exact: return "exact";
        default: return "random_orthogonal";
    }
}

DetectorKind detector_from_string(const std::string& s) {
    if (s == "mrc") return DetectorKind::MRC;
    if (s == "zf") return DetectorKind::ZF;
    throw ConfigError("unknown detector '" + s + "' (expected mrc or zf)");
}

AllocMethod method_from_string(const std::string& s) {
    if (s == "max_sum") return AllocMethod::MaxSum;
    if (s == "exact") return AllocMethod::Exact;
    if (s == "random_orthogonal") return AllocMethod::RandomOrthogonal;
    throw ConfigError("unknown method '" + s + "'");
}

ExperimentSpec default_spec() {
    ExperimentSpec s;
    for (double p = 10.0; p <= 30.0 + 1e-9; p += 2.0) s.power_sweep_dBm.push_back(p);
    return s;
}

ExperimentSpec paper_preset() {
    ExperimentSpec s = default_spec();
    s.frames = 10000;
    s.trials = 1;
    return s;
}

ExperimentSpec desk_preset() {
    ExperimentSpec s = default_spec();
    s.frames = 1000;
    s.trials = 5;
    return s;
}

namespace {

struct Cursor {
    std::string origin;
    int line = 0;
    [[noreturn]] void fail(const std::string& msg) const {
        std::ostringstream os;
        os << origin << ":" << line << ": " << msg;
        throw ConfigError(os.str());
    }
};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, const Cursor& c) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) c.fail("trailing characters in number '" + v + "'");
        return x;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        c.fail("expected a number, got '" + v + "'");
    }
}

int parse_int(const std::string& v, const Cursor& c) {
    double x = parse_double(v, c);
    int i = static_cast<int>(std::llround(x));
    if (x != static_cast<double>(i)) c.fail("expected an integer, got '" + v + "'");
    return i;
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

ExperimentSpec parse_spec(const std::string& text, const std::string& origin) {
    ExperimentSpec spec = default_spec();
    spec.power_sweep_dBm.clear();
    bool sweep_set = false, detectors_set = false, methods_set = false;

    Cursor cur{origin, 0};
    std::string section;
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ++cur.line;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') cur.fail("unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "network" && section != "solver" && section != "experiment")
                cur.fail("unknown section '" + section + "'");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) cur.fail("expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) cur.fail("empty key");
        if (section.empty()) cur.fail("key '" + key + "' outside any section");

        auto& n = spec.network;
        if (section == "network") {
            if (key == "cores") n.cores = parse_int(val, cur);
            else if (key == "tags") n.tags = parse_int(val, cur);
            else if (key == "subchannels") n.subchannels = parse_int(val, cur);
            else if (key == "training_sequences") n.training_sequences = parse_int(val, cur);
            else if (key == "cell_radius_m") n.cell_radius_m = parse_double(val, cur);
            else if (key == "core_height_m") n.core_height_m = parse_double(val, cur);
            else if (key == "tag_height_min_m") n.tag_height_min_m = parse_double(val, cur);
            else if (key == "tag_height_max_m") n.tag_height_max_m = parse_double(val, cur);
            else if (key == "wavelength_m") n.wavelength_m = parse_double(val, cur);
            else if (key == "pathloss_exponent") n.pathloss_exponent = parse_double(val, cur);
            else if (key == "pathloss_exponent_cross")
                n.pathloss_exponent_cross = parse_double(val, cur);
            else if (key == "reference_distance_m") n.reference_distance_m = parse_double(val, cur);
            else if (key == "rician_dl_dB") n.rician_dl_dB = parse_double(val, cur);
            else if (key == "rician_ul_dB") n.rician_ul_dB = parse_double(val, cur);
            else if (key == "tx_power_dBm") n.tx_power_dBm = parse_double(val, cur);
            else if (key == "noise_figure_dB") n.noise_figure_dB = parse_double(val, cur);
            else if (key == "tx_antennas") n.tx_antennas = parse_int(val, cur);
            else if (key == "rx_antennas") n.rx_antennas = parse_int(val, cur);
            else if (key == "symbol_period_s") n.symbol_period_s = parse_double(val, cur);
            else if (key == "gamma0") n.gamma0 = parse_double(val, cur);
            else if (key == "gamma1") n.gamma1 = parse_double(val, cur);
            else if (key == "scatter_efficiency") n.scatter_efficiency = parse_double(val, cur);
            else if (key == "subcarrier_step") n.subcarrier_step = parse_int(val, cur);
            else if (key == "noise_var_w") n.noise_var_w = parse_double(val, cur);
            else if (key == "seed") n.seed = static_cast<std::uint64_t>(parse_double(val, cur));
            else cur.fail("unknown key '" + key + "' in [network]");
        } else if (section == "solver") {
            auto& s = spec.solver;
            if (key == "max_iterations") s.max_iterations = parse_int(val, cur);
            else if (key == "damping") s.damping = parse_double(val, cur);
            else if (key == "epsilon") s.epsilon = parse_double(val, cur);
            else if (key == "jitter") s.jitter = parse_double(val, cur);
            else cur.fail("unknown key '" + key + "' in [solver]");
        } else {
            if (key == "power_sweep_dBm") {
                spec.power_sweep_dBm.clear();
                for (const auto& p : split_list(val))
                    spec.power_sweep_dBm.push_back(parse_double(p, cur));
                sweep_set = true;
            } else if (key == "detectors") {
                spec.detectors.clear();
                for (const auto& d : split_list(val)) spec.detectors.push_back(detector_from_string(d));
                detectors_set = true;
            } else if (key == "methods") {
                spec.methods.clear();
                for (const auto& m : split_list(val)) spec.methods.push_back(method_from_string(m));
                methods_set = true;
            } else if (key == "frames") spec.frames = parse_int(val, cur);
            else if (key == "trials") spec.trials = parse_int(val, cur);
            else if (key == "random_draws") spec.random_draws = parse_int(val, cur);
            else if (key == "output_dir") spec.output_dir = val;
            else cur.fail("unknown key '" + key + "' in [experiment]");
        }
    }
    if (!sweep_set) spec.power_sweep_dBm = default_spec().power_sweep_dBm;
    (void)detectors_set;
    (void)methods_set;
    spec.validate();
    return spec;
}

ExperimentSpec load_spec(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_spec(ss.str(), path);
}

std::string format_spec(const ExperimentSpec& spec) {
    std::ostringstream os;
    os.precision(17);
    const auto& n = spec.network;
    os << "[network]\n"
       << "cores = " << n.cores << "\n"
       << "tags = " << n.tags << "\n"
       << "subchannels = " << n.subchannels << "\n"
       << "training_sequences = " << n.training_sequences << "\n"
       << "cell_radius_m = " << n.cell_radius_m << "\n"
       << "core_height_m = " << n.core_height_m << "\n"
       << "tag_height_min_m = " << n.tag_height_min_m << "\n"
       << "tag_height_max_m = " << n.tag_height_max_m << "\n"
       << "wavelength_m = " << n.wavelength_m << "\n"
       << "pathloss_exponent = " << n.pathloss_exponent << "\n"
       << "pathloss_exponent_cross = " << n.pathloss_exponent_cross << "\n"
       << "reference_distance_m = " << n.reference_distance_m << "\n"
       << "rician_dl_dB = " << n.rician_dl_dB << "\n"
       << "rician_ul_dB = " << n.rician_ul_dB << "\n"
       << "tx_power_dBm = " << n.tx_power_dBm << "\n"
       << "noise_figure_dB = " << n.noise_figure_dB << "\n"
       << "tx_antennas = " << n.tx_antennas << "\n"
       << "rx_antennas = " << n.rx_antennas << "\n"
       << "symbol_period_s = " << n.symbol_period_s << "\n"
       << "gamma0 = " << n.gamma0 << "\n"
       << "gamma1 = " << n.gamma1 << "\n"
       << "scatter_efficiency = " << n.scatter_efficiency << "\n"
       << "subcarrier_step = " << n.subcarrier_step << "\n";
    if (n.noise_var_w) os << "noise_var_w = " << *n.noise_var_w << "\n";
    os << "seed = " << n.seed << "\n\n";

    const auto& s = spec.solver;
    os << "[solver]\n"
       << "max_iterations = " << s.max_iterations << "\n"
       << "damping = " << s.damping << "\n"
       << "epsilon = " << s.epsilon << "\n"
       << "jitter = " << s.jitter << "\n\n";

    os << "[experiment]\npower_sweep_dBm = ";
    for (std::size_t i = 0; i < spec.power_sweep_dBm.size(); ++i)
        os << (i ? ", " : "") << spec.power_sweep_dBm[i];
    os << "\ndetectors = ";
    for (std::size_t i = 0; i < spec.detectors.size(); ++i)
        os << (i ? ", " : "") << to_string(spec.detectors[i]);
    os << "\nmethods = ";
    for (std::size_t i = 0; i < spec.methods.size(); ++i)
        os << (i ? ", " : "") << to_string(spec.methods[i]);
    os << "\nframes = " << spec.frames
       << "\ntrials = " << spec.trials
       << "\nrandom_draws = " << spec.random_draws
       << "\noutput_dir = " << spec.output_dir << "\n";
    return os.str();
}

}  // namespace bsn
