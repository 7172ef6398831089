#include "amplab/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "amplab/errors.hpp"

namespace amplab {

NoiseSpec ExperimentConfig::noise_for(int n_eff) const {
    if (noise_set) {
        NoiseSpec s = noise;
        // sigma2 given per the reference n scales as 1/n along a sweep.
        if (n_eff != n && n > 0) s.sigma2 = s.sigma2 * n / n_eff;
        if (s.kind == NoiseKind::huber_mixture && s.contam == ContamKind::point_mass &&
            n_eff != n && n > 0)
            s.contam_value = s.contam_value * std::sqrt(double(n) / n_eff);
        return s;
    }
    if (mode == AmpMode::robust) return robust_default_noise(0.05, n_eff);
    return gaussian_noise_with_norm(noise_norm_target, n_eff);
}

ExperimentConfig ExperimentConfig::scaled_to(int n_eff) const {
    ExperimentConfig c = *this;
    c.noise = noise_for(n_eff);
    c.noise_set = true;
    c.p = static_cast<int>(std::lround(static_cast<double>(p) * n_eff / n));
    c.k = static_cast<int>(std::lround(static_cast<double>(k) * n_eff / n));
    if (lambda > 0.0) c.lambda = lambda * std::sqrt(double(n) / n_eff);
    c.n = n_eff;
    c.n_sweep.clear();
    return c;
}

namespace {

long to_long(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long out = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw parse_error("config: key '" + key + "': expected integer, got '" + v + "'");
    }
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double out = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw parse_error("config: key '" + key + "': expected number, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw parse_error("config: key '" + key + "': expected boolean, got '" + v + "'");
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw parse_error("config: line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw parse_error("config: line " + std::to_string(lineno) +
                              ": empty key or value");
        if (kv.count(key))
            throw parse_error("config: duplicate key '" + key + "'");
        kv[key] = val;
    }

    ExperimentConfig c;
    auto take = [&](const char* key) -> std::string {
        auto it = kv.find(key);
        if (it == kv.end()) return "";
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    std::string mode = take("mode");
    if (mode.empty()) throw parse_error("config: missing required key 'mode'");
    if (mode == "sparse")
        c.mode = AmpMode::sparse;
    else if (mode == "robust")
        c.mode = AmpMode::robust;
    else
        throw parse_error("config: mode must be 'sparse' or 'robust'");

    for (const char* key : {"n", "p", "k"}) {
        std::string v = take(key);
        if (v.empty() && std::string(key) != "k")
            throw parse_error(std::string("config: missing required key '") + key + "'");
        long x = v.empty() ? 0 : to_long(key, v);
        if (std::string(key) == "n") c.n = static_cast<int>(x);
        if (std::string(key) == "p") c.p = static_cast<int>(x);
        if (std::string(key) == "k") c.k = static_cast<int>(x);
    }
    if (c.k == 0) {
        if (c.mode == AmpMode::sparse)
            throw parse_error("config: missing required key 'k'");
        c.k = std::max(1, c.p / 4);
    }
    if (c.n < 1 || c.p < 1) throw parse_error("config: n and p must be positive");
    if (static_cast<long>(c.n) * c.p > (1L << 34))
        throw parse_error("config: n*p too large");
    if (c.k < 1 || c.k > c.p) throw parse_error("config: need 1 <= k <= p");
    if (c.mode == AmpMode::robust && c.p >= c.n)
        throw parse_error("config: robust mode requires p < n");

    if (std::string v = take("noise.kind"); !v.empty()) {
        c.noise_set = true;
        if (v == "gaussian")
            c.noise.kind = NoiseKind::gaussian;
        else if (v == "huber-mixture")
            c.noise.kind = NoiseKind::huber_mixture;
        else
            throw parse_error("config: noise.kind must be gaussian or huber-mixture");
    }
    if (std::string v = take("noise.sigma2"); !v.empty()) {
        c.noise_set = true;
        c.noise.sigma2 = to_double("noise.sigma2", v);
    }
    if (std::string v = take("noise.eps_h"); !v.empty()) {
        c.noise_set = true;
        c.noise.eps_h = to_double("noise.eps_h", v);
        if (!(c.noise.eps_h >= 0.0 && c.noise.eps_h < 1.0))
            throw parse_error("config: noise.eps_h outside [0,1)");
    }
    if (std::string v = take("noise.contam"); !v.empty()) {
        c.noise_set = true;
        if (v == "none")
            c.noise.contam = ContamKind::none;
        else if (v == "point-mass")
            c.noise.contam = ContamKind::point_mass;
        else if (v == "heavy-tail")
            c.noise.contam = ContamKind::heavy_tail;
        else
            throw parse_error("config: noise.contam must be none/point-mass/heavy-tail");
    }
    if (std::string v = take("noise.contam_value"); !v.empty()) {
        c.noise_set = true;
        c.noise.contam_value = to_double("noise.contam_value", v);
    }
    if (std::string v = take("noise.norm_target"); !v.empty())
        c.noise_norm_target = to_double("noise.norm_target", v);

    if (std::string v = take("signal.kind"); !v.empty()) {
        if (v == "signed-uniform-support")
            c.signal.kind = SignalKind::signed_uniform_support;
        else
            throw parse_error("config: only signed-uniform-support is configurable");
    }
    if (std::string v = take("signal.magnitude"); !v.empty())
        c.signal.magnitude = to_double("signal.magnitude", v);

    if (std::string v = take("lambda"); !v.empty()) c.lambda = to_double("lambda", v);
    if (std::string v = take("t_max"); !v.empty())
        c.t_max = static_cast<int>(to_long("t_max", v));
    if (std::string v = take("trials"); !v.empty())
        c.trials = static_cast<int>(to_long("trials", v));
    if (std::string v = take("seed"); !v.empty())
        c.seed = static_cast<uint64_t>(to_long("seed", v));
    if (c.t_max < 1) throw parse_error("config: t_max must be >= 1");
    if (c.trials < 1) throw parse_error("config: trials must be >= 1");

    if (std::string v = take("n_sweep"); !v.empty()) {
        std::istringstream ss(v);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            c.n_sweep.push_back(static_cast<int>(to_long("n_sweep", tok)));
        }
        if (c.n_sweep.size() < 2) throw parse_error("config: n_sweep needs >= 2 values");
    }

    for (const char* key : {"decomp", "hat", "w1", "hfun"}) {
        std::string v = take((std::string("diagnostics.") + key).c_str());
        if (v.empty()) continue;
        bool on = to_bool(key, v);
        if (std::string(key) == "decomp") c.diag_decomp = on;
        if (std::string(key) == "hat") c.diag_hat = on;
        if (std::string(key) == "w1") c.diag_w1 = on;
        if (std::string(key) == "hfun") c.diag_hfun = on;
    }

    if (!kv.empty())
        throw parse_error("config: unknown key '" + kv.begin()->first + "'");

    // Sample-size conditions are surfaced as a warning, not an error.
    if (c.mode == AmpMode::sparse) {
        double bound = 2.0 * c.k * std::log(static_cast<double>(c.p) / c.k);
        if (c.n <= bound || c.p <= 2.3 * c.k) c.warn_sample_size = true;
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace amplab
