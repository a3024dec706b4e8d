#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>

#include "stripscreen/dataset.hpp"

namespace stripscreen::synth {

// Class-conditional Gaussian generator with an analytic accuracy oracle.
// Channels are independent given the class; `latent_weight` > 0 mixes in a
// shared per-sample factor for robustness checks (no closed-form oracle
// then).
struct SynthConfig {
    int n = 1000;
    double positive_prior = 0.5;
    Eigen::VectorXd mu0;    // 33 per-channel means, byte units, class 0
    Eigen::VectorXd mu1;    // class 1
    Eigen::VectorXd sigma;  // shared per-channel stddev, byte units
    double latent_weight = 0.0;
    std::uint64_t seed = 0;
};

// Uniform channel parameters across all 33 features.
SynthConfig uniform_config(int n, double mu0, double mu1, double sigma, std::uint64_t seed);

// Flat key=value file; mu0/mu1/sigma accept a single value or a 33-entry
// comma-separated list.
SynthConfig load_config(const std::filesystem::path& path);
std::string config_to_string(const SynthConfig& cfg);

struct SynthResult {
    data::Dataset dataset;
    std::int64_t clamped_channels = 0;
    std::int64_t total_channels = 0;

    double clamp_rate() const {
        return total_channels == 0
                   ? 0.0
                   : static_cast<double>(clamped_channels) / static_cast<double>(total_channels);
    }
};

// Deterministic per seed; per-sample substreams make chunked generation
// bit-identical to sequential.
SynthResult generate(const SynthConfig& cfg);

// Best achievable accuracy Phi(D/2) with D the Mahalanobis distance between
// the class means. Requires equal priors and zero latent weight; byte
// clamping is treated as negligible (see clamp_rate).
double bayes_accuracy(const SynthConfig& cfg);

// Uniformly permutes labels, preserving the label marginal exactly.
data::Dataset shuffle_labels(const data::Dataset& ds, std::uint64_t seed);

}  // namespace stripscreen::synth
