#include "amplab/model.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "amplab/errors.hpp"
#include "amplab/prng.hpp"

namespace amplab {

void NoiseSpec::validate() const {
    if (!(sigma2 >= 0.0)) throw invalid_parameter("noise: sigma2 must be >= 0");
    if (kind == NoiseKind::huber_mixture) {
        if (!(eps_h >= 0.0 && eps_h < 1.0))
            throw invalid_parameter("noise: eps_h outside [0,1)");
    }
}

Eigen::MatrixXd gen_design(int n, int p, uint64_t seed) {
    if (n < 1 || p < 1) throw invalid_parameter("gen_design: n, p must be >= 1");
    CounterRng rng = make_stream(seed, Stream::design);
    Eigen::MatrixXd X(n, p);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    // Row-major fill order is part of the reproducibility contract.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) X(i, j) = scale * rng.next_gaussian();
    return X;
}

Eigen::VectorXd gen_signal(int p, int k, const SignalSpec& spec, uint64_t seed) {
    if (k <= 0 || k > p) throw invalid_parameter("gen_signal: need 0 < k <= p");
    if (spec.kind == SignalKind::explicit_vector) {
        if (spec.values.size() != p)
            throw invalid_parameter("gen_signal: explicit vector has wrong length");
        return spec.values;
    }
    CounterRng rng = make_stream(seed, Stream::signal);
    // Fisher-Yates prefix for a uniform k-subset of [p].
    std::vector<int> perm(p);
    for (int i = 0; i < p; ++i) perm[i] = i;
    for (int i = 0; i < k; ++i) {
        int j = i + static_cast<int>(rng.next_u64() % static_cast<uint64_t>(p - i));
        std::swap(perm[i], perm[j]);
    }
    const double mag =
        spec.magnitude > 0.0 ? spec.magnitude : 1.0 / std::sqrt(static_cast<double>(k));
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
    for (int i = 0; i < k; ++i) {
        double sign = (rng.next_u64() & 1ull) ? 1.0 : -1.0;
        theta(perm[i]) = sign * mag;
    }
    return theta;
}

Eigen::VectorXd gen_noise(int n, const NoiseSpec& spec, uint64_t seed,
                          std::vector<int>* contaminated) {
    if (n < 1) throw invalid_parameter("gen_noise: n must be >= 1");
    spec.validate();
    CounterRng rng = make_stream(seed, Stream::noise);
    const double sigma = std::sqrt(spec.sigma2);
    Eigen::VectorXd eps(n);
    if (contaminated) contaminated->clear();
    for (int i = 0; i < n; ++i) {
        // The Gaussian draw always advances the stream so eps_h = 0 matches
        // the pure-Gaussian vector coordinate for coordinate.
        double g = sigma * rng.next_gaussian();
        bool contam = false;
        if (spec.kind == NoiseKind::huber_mixture && spec.eps_h > 0.0)
            contam = rng.next_uniform() < spec.eps_h;
        if (!contam) {
            eps(i) = g;
        } else {
            switch (spec.contam) {
                case ContamKind::none:
                    eps(i) = g;
                    contam = false;
                    break;
                case ContamKind::point_mass:
                    eps(i) = spec.contam_value;
                    break;
                case ContamKind::heavy_tail: {
                    // Student-t with 2 dof via the uniform quantile map.
                    double u = rng.next_uniform();
                    double t2 = (2.0 * u - 1.0) / std::sqrt(2.0 * u * (1.0 - u));
                    eps(i) = spec.contam_value * t2;
                    break;
                }
            }
            if (contam && contaminated) contaminated->push_back(i);
        }
    }
    return eps;
}

LinearModel make_model(int n, int p, int k, const SignalSpec& signal,
                       const NoiseSpec& noise, uint64_t seed) {
    LinearModel m;
    m.n = n;
    m.p = p;
    m.k = k;
    m.seed = seed;
    m.design = gen_design(n, p, seed);
    m.signal = gen_signal(p, k, signal, seed);
    m.noise = gen_noise(n, noise, seed, &m.contaminated);
    m.observations = m.design * m.signal + m.noise;
    return m;
}

NoiseSpec gaussian_noise_with_norm(double target_norm, int n) {
    NoiseSpec s;
    s.kind = NoiseKind::gaussian;
    s.sigma2 = target_norm * target_norm / static_cast<double>(n);
    return s;
}

NoiseSpec robust_default_noise(double eps_h, int n) {
    NoiseSpec s;
    s.kind = NoiseKind::huber_mixture;
    s.sigma2 = 1.0 / static_cast<double>(n);
    s.eps_h = eps_h;
    s.contam = ContamKind::point_mass;
    s.contam_value = 5.0 / std::sqrt(static_cast<double>(n));
    return s;
}

namespace {
constexpr char kMagic[4] = {'A', 'M', 'P', 'L'};
constexpr uint32_t kVersion = 1;

void write_vec(std::ofstream& out, const Eigen::VectorXd& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(sizeof(double) * v.size()));
}

void read_vec(std::ifstream& in, Eigen::VectorXd& v) {
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(sizeof(double) * v.size()));
}
}  // namespace

void save_model(const LinearModel& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parse_error("save_model: cannot open " + path);
    out.write(kMagic, 4);
    uint32_t ver = kVersion;
    out.write(reinterpret_cast<const char*>(&ver), 4);
    int32_t dims[3] = {m.n, m.p, m.k};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    out.write(reinterpret_cast<const char*>(&m.seed), 8);
    // Row-major matrix payload regardless of Eigen's internal layout.
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.p; ++j) {
            double x = m.design(i, j);
            out.write(reinterpret_cast<const char*>(&x), 8);
        }
    write_vec(out, m.signal);
    write_vec(out, m.noise);
    write_vec(out, m.observations);
    if (!out) throw parse_error("save_model: write failed for " + path);
}

LinearModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("load_model: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw parse_error("load_model: bad magic in " + path);
    uint32_t ver = 0;
    in.read(reinterpret_cast<char*>(&ver), 4);
    if (ver != kVersion) throw parse_error("load_model: unsupported format version");
    int32_t dims[3];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    LinearModel m;
    m.n = dims[0];
    m.p = dims[1];
    m.k = dims[2];
    in.read(reinterpret_cast<char*>(&m.seed), 8);
    if (m.n < 1 || m.p < 1) throw parse_error("load_model: bad dimensions");
    m.design.resize(m.n, m.p);
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.p; ++j) {
            double x;
            in.read(reinterpret_cast<char*>(&x), 8);
            m.design(i, j) = x;
        }
    m.signal.resize(m.p);
    m.noise.resize(m.n);
    m.observations.resize(m.n);
    read_vec(in, m.signal);
    read_vec(in, m.noise);
    read_vec(in, m.observations);
    if (!in) throw parse_error("load_model: truncated file " + path);
    return m;
}

}  // namespace amplab
