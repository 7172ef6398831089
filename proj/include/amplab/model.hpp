#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace amplab {

enum class NoiseKind { gaussian, huber_mixture };
enum class ContamKind { none, point_mass, heavy_tail };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::gaussian;
    double sigma2 = 0.0;          // variance of the Gaussian component
    double eps_h = 0.0;           // contamination fraction, in [0,1)
    ContamKind contam = ContamKind::none;
    double contam_value = 0.0;    // point mass location, or heavy-tail scale

    void validate() const;
};

enum class SignalKind { signed_uniform_support, explicit_vector };

struct SignalSpec {
    SignalKind kind = SignalKind::signed_uniform_support;
    double magnitude = 0.0;       // 0 means the default 1/sqrt(k)
    Eigen::VectorXd values;       // used by explicit_vector
};

// One problem instance y = X theta* + eps.  Immutable after generation;
// safe to share read-only between threads.
struct LinearModel {
    int n = 0;
    int p = 0;
    int k = 0;
    uint64_t seed = 0;
    Eigen::MatrixXd design;
    Eigen::VectorXd signal;
    Eigen::VectorXd noise;
    Eigen::VectorXd observations;
    std::vector<int> contaminated;  // indices drawn from H (huber mixture)
};

Eigen::MatrixXd gen_design(int n, int p, uint64_t seed);
Eigen::VectorXd gen_signal(int p, int k, const SignalSpec& spec, uint64_t seed);
Eigen::VectorXd gen_noise(int n, const NoiseSpec& spec, uint64_t seed,
                          std::vector<int>* contaminated = nullptr);

LinearModel make_model(int n, int p, int k, const SignalSpec& signal,
                       const NoiseSpec& noise, uint64_t seed);

// Noise spec with sigma chosen so E||eps||_2 concentrates at `target_norm`
// (default experiments use 0.5).
NoiseSpec gaussian_noise_with_norm(double target_norm, int n);

// Robust defaults: sigma^2 = 1/n, contamination point mass at 5 sigma.
NoiseSpec robust_default_noise(double eps_h, int n);

// Flat binary container: magic "AMPL", format version, dimensions header,
// row-major design, then signal/noise/observations.
void save_model(const LinearModel& m, const std::string& path);
LinearModel load_model(const std::string& path);

}  // namespace amplab
