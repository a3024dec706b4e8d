#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "stripscreen/colorspace.hpp"
#include "stripscreen/dataset.hpp"
#include "stripscreen/rng.hpp"

namespace stripscreen::learn {

enum class Family { mlp, logreg, random_forest, gradient_boosting };

constexpr std::array<Family, 4> all_families() {
    return {Family::mlp, Family::logreg, Family::random_forest,
            Family::gradient_boosting};
}

std::string_view family_name(Family f);
std::optional<Family> family_from_name(std::string_view name);

struct MlpParams {
    std::vector<int> hidden_sizes{3, 2};
    double learning_rate = 1e-3;
    double l2 = 1e-4;
    int batch_size = 32;
    int epochs = 200;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct LogRegParams {
    double lambda = 1.0;
    double tolerance = 1e-6;
    int max_iterations = 5000;
};

struct ForestParams {
    int n_trees = 100;
    int max_depth = 0;            // 0 = unlimited
    int min_samples_split = 2;
    int features_per_split = -1;  // -1 = ceil(sqrt(d)), 0 = all features
    bool bootstrap = true;
};

struct BoostParams {
    int n_stages = 100;
    int max_depth = 3;
    double shrinkage = 0.1;
    int min_samples_split = 2;
};

struct ModelConfig {
    Family family = Family::mlp;
    std::uint64_t seed = 0;
    MlpParams mlp;
    LogRegParams logreg;
    ForestParams forest;
    BoostParams boosting;
};

// Throws DataError when a hyperparameter is outside its valid range.
void validate_config(const ModelConfig& cfg);

struct MlpWeights {
    std::vector<Eigen::MatrixXd> w;  // w[l]: rows = layer l+1 units, cols = layer l units
    std::vector<Eigen::VectorXd> b;
};

struct LinearWeights {
    Eigen::VectorXd w;
    double bias = 0.0;
};

// Binary tree in array form; feature < 0 marks a leaf carrying `value`.
struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;
};

struct Tree {
    std::vector<TreeNode> nodes;
    double predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
};

struct ForestWeights {
    std::vector<Tree> trees;  // leaves hold hard class votes (0/1)
};

struct BoostWeights {
    double base_score = 0.0;  // log-odds of the training base rate
    double shrinkage = 0.1;
    std::vector<Tree> trees;  // leaves hold Newton-step values
};

// Immutable after fitting. Scores raw (unstandardized) feature vectors; the
// standardizer captured at fit time is applied internally.
struct TrainedModel {
    Family family = Family::mlp;
    color::StandardizationStats standardizer;
    std::variant<MlpWeights, LinearWeights, ForestWeights, BoostWeights> weights;

    color::ColorSpaceId space() const { return standardizer.space; }
};

TrainedModel train(const color::FeatureMatrix& x, const std::vector<int>& y,
                   const ModelConfig& cfg);
TrainedModel train_mlp(const color::FeatureMatrix& x, const std::vector<int>& y,
                       const ModelConfig& cfg);
TrainedModel train_logreg(const color::FeatureMatrix& x, const std::vector<int>& y,
                          const ModelConfig& cfg);
TrainedModel train_random_forest(const color::FeatureMatrix& x, const std::vector<int>& y,
                                 const ModelConfig& cfg);
TrainedModel train_gradient_boosting(const color::FeatureMatrix& x,
                                     const std::vector<int>& y, const ModelConfig& cfg);

double predict_score(const TrainedModel& model, const color::FeatureVector& v);
Eigen::VectorXd predict_scores(const TrainedModel& model, const color::FeatureMatrix& m);
// Hard label at the given threshold; a score exactly at the threshold is
// negative.
int predict_label(const TrainedModel& model, const color::FeatureVector& v,
                  double threshold = 0.5);

// --- MLP internals exposed for gradient verification ---

MlpWeights init_mlp(int n_inputs, const std::vector<int>& hidden_sizes,
                    rng::SplitMix64& gen);

struct MlpGradients {
    std::vector<Eigen::MatrixXd> w;
    std::vector<Eigen::VectorXd> b;
};

// Batch loss: mean binary cross-entropy plus (l2/2)*sum of squared weights
// (biases unpenalized).
double mlp_loss(const MlpWeights& net, const Eigen::MatrixXd& x, const std::vector<int>& y,
                double l2);
std::pair<double, MlpGradients> mlp_loss_and_gradients(const MlpWeights& net,
                                                       const Eigen::MatrixXd& x,
                                                       const std::vector<int>& y, double l2);

// --- persistence ---

// Versioned hybrid format: magic line, one-line JSON header (family, space,
// standardization stats, structure), then the parameter doubles as a raw
// little-endian blob. Round-trip reproduces predict_score bit-exactly.
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

// --- grid search ---

struct HyperGrid {
    // Axes enumerate in listed order with later axes varying fastest.
    std::vector<std::pair<std::string, std::vector<double>>> axes;
    std::size_t cap = 256;
};

HyperGrid default_grid(Family family);
std::vector<ModelConfig> enumerate_grid(Family family, const HyperGrid& grid,
                                        const ModelConfig& base);

// Exhaustive search scored by mean stratified k-fold CV accuracy; ties break
// toward the earlier grid point. Deterministic for fixed inputs and seed.
ModelConfig grid_search(Family family, const HyperGrid& grid, const data::Dataset& train,
                        color::ColorSpaceId space, int folds, std::uint64_t seed,
                        const ModelConfig& base = ModelConfig{});

}  // namespace stripscreen::learn
