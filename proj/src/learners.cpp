#include "stripscreen/learners.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include <nlohmann/json.hpp>

#include "stripscreen/error.hpp"
#include "stripscreen/text.hpp"

namespace stripscreen::learn {

namespace {

using json = nlohmann::json;

constexpr std::uint64_t kMlpStream = 0x6d6c70;
constexpr std::uint64_t kForestStream = 0x666f72;
constexpr std::uint64_t kCvStream = 0x6376;

constexpr std::array<std::string_view, 4> kFamilyNames = {"mlp", "logreg", "random_forest",
                                                          "gradient_boosting"};

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)), overflow-safe.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z))); }

void check_training_input(const color::FeatureMatrix& x, const std::vector<int>& y) {
    if (static_cast<std::size_t>(x.values.rows()) != y.size())
        throw DataError("train: feature/label count mismatch");
    if (y.size() < 2) throw DataError("train: need at least 2 samples");
    if (x.standardized)
        throw DataError("train: expected raw features; standardization is applied internally");
    if (!x.values.allFinite()) throw DataError("train: non-finite feature values");
    const auto positives = std::count(y.begin(), y.end(), 1);
    if (positives == 0 || positives == static_cast<long>(y.size()))
        throw DataError("train: both classes must be present");
}

Eigen::VectorXd to_vector(const std::vector<int>& y) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < y.size(); ++i) v[static_cast<Eigen::Index>(i)] = y[i];
    return v;
}

// ---------------------------------------------------------------------------
// MLP
// ---------------------------------------------------------------------------

struct MlpForward {
    std::vector<Eigen::MatrixXd> pre;   // pre-activations per layer (units x batch)
    std::vector<Eigen::MatrixXd> post;  // post-activations; post[0] is the input
};

MlpForward mlp_forward(const MlpWeights& net, const Eigen::MatrixXd& x) {
    MlpForward f;
    f.post.push_back(x.transpose());
    const std::size_t layers = net.w.size();
    for (std::size_t l = 0; l < layers; ++l) {
        Eigen::MatrixXd z = net.w[l] * f.post.back();
        z.colwise() += net.b[l];
        f.pre.push_back(z);
        if (l + 1 < layers)
            f.post.push_back(z.cwiseMax(0.0));  // ReLU hidden
        else
            f.post.push_back(z);  // linear output; sigmoid applied in the loss/score
    }
    return f;
}

double weight_penalty(const MlpWeights& net, double l2) {
    double s = 0.0;
    for (const auto& w : net.w) s += w.squaredNorm();
    return 0.5 * l2 * s;
}

}  // namespace

MlpWeights init_mlp(int n_inputs, const std::vector<int>& hidden_sizes,
                    rng::SplitMix64& gen) {
    MlpWeights net;
    std::vector<int> sizes;
    sizes.push_back(n_inputs);
    sizes.insert(sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
    sizes.push_back(1);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        Eigen::MatrixXd w(sizes[l + 1], sizes[l]);
        const double scale = std::sqrt(2.0 / sizes[l]);  // He init for ReLU
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = scale * gen.normal();
        net.w.push_back(std::move(w));
        net.b.push_back(Eigen::VectorXd::Zero(sizes[l + 1]));
    }
    return net;
}

double mlp_loss(const MlpWeights& net, const Eigen::MatrixXd& x, const std::vector<int>& y,
                double l2) {
    const MlpForward f = mlp_forward(net, x);
    const Eigen::RowVectorXd logits = f.post.back().row(0);
    double bce = 0.0;
    for (Eigen::Index i = 0; i < logits.size(); ++i)
        bce += softplus(logits[i]) - static_cast<double>(y[static_cast<std::size_t>(i)]) * logits[i];
    return bce / static_cast<double>(logits.size()) + weight_penalty(net, l2);
}

std::pair<double, MlpGradients> mlp_loss_and_gradients(const MlpWeights& net,
                                                       const Eigen::MatrixXd& x,
                                                       const std::vector<int>& y, double l2) {
    const MlpForward f = mlp_forward(net, x);
    const std::size_t layers = net.w.size();
    const Eigen::Index batch = x.rows();
    const Eigen::RowVectorXd logits = f.post.back().row(0);

    double bce = 0.0;
    Eigen::MatrixXd delta(1, batch);
    for (Eigen::Index i = 0; i < batch; ++i) {
        const double yi = static_cast<double>(y[static_cast<std::size_t>(i)]);
        bce += softplus(logits[i]) - yi * logits[i];
        delta(0, i) = (sigmoid(logits[i]) - yi) / static_cast<double>(batch);
    }
    const double loss = bce / static_cast<double>(batch) + weight_penalty(net, l2);

    MlpGradients grads;
    grads.w.resize(layers);
    grads.b.resize(layers);
    for (std::size_t l = layers; l-- > 0;) {
        grads.w[l] = delta * f.post[l].transpose() + l2 * net.w[l];
        grads.b[l] = delta.rowwise().sum();
        if (l > 0) {
            Eigen::MatrixXd back = net.w[l].transpose() * delta;
            delta = back.cwiseProduct(
                (f.pre[l - 1].array() > 0.0).cast<double>().matrix());
        }
    }
    return {loss, grads};
}

namespace {

MlpWeights fit_mlp(const Eigen::MatrixXd& x, const std::vector<int>& y,
                   const MlpParams& params, std::uint64_t seed) {
    const Eigen::Index n = x.rows();
    rng::SplitMix64 gen = rng::substream(seed, kMlpStream);
    MlpWeights net = init_mlp(static_cast<int>(x.cols()), params.hidden_sizes, gen);
    const std::size_t layers = net.w.size();

    std::vector<Eigen::MatrixXd> mw(layers), vw(layers);
    std::vector<Eigen::VectorXd> mb(layers), vb(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        mw[l] = Eigen::MatrixXd::Zero(net.w[l].rows(), net.w[l].cols());
        vw[l] = mw[l];
        mb[l] = Eigen::VectorXd::Zero(net.b[l].size());
        vb[l] = mb[l];
    }

    std::vector<std::size_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    long step = 0;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        rng::shuffle(order, gen);
        for (Eigen::Index start = 0; start < n; start += params.batch_size) {
            const Eigen::Index size = std::min<Eigen::Index>(params.batch_size, n - start);
            Eigen::MatrixXd xb(size, x.cols());
            std::vector<int> yb(static_cast<std::size_t>(size));
            for (Eigen::Index i = 0; i < size; ++i) {
                const std::size_t src = order[static_cast<std::size_t>(start + i)];
                xb.row(i) = x.row(static_cast<Eigen::Index>(src));
                yb[static_cast<std::size_t>(i)] = y[src];
            }
            const auto [batch_loss, grads] = mlp_loss_and_gradients(net, xb, yb, params.l2);
            (void)batch_loss;
            ++step;
            const double bc1 = 1.0 - std::pow(params.beta1, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(params.beta2, static_cast<double>(step));
            for (std::size_t l = 0; l < layers; ++l) {
                mw[l] = params.beta1 * mw[l] + (1.0 - params.beta1) * grads.w[l];
                vw[l] = params.beta2 * vw[l] +
                        (1.0 - params.beta2) * grads.w[l].cwiseProduct(grads.w[l]);
                net.w[l].array() -= params.learning_rate * (mw[l] / bc1).array() /
                                    ((vw[l] / bc2).array().sqrt() + params.epsilon);
                mb[l] = params.beta1 * mb[l] + (1.0 - params.beta1) * grads.b[l];
                vb[l] = params.beta2 * vb[l] +
                        (1.0 - params.beta2) * grads.b[l].cwiseProduct(grads.b[l]);
                net.b[l].array() -= params.learning_rate * (mb[l] / bc1).array() /
                                    ((vb[l] / bc2).array().sqrt() + params.epsilon);
            }
        }
    }
    return net;
}

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

double logreg_loss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   const Eigen::VectorXd& w, double bias, double lambda) {
    const Eigen::VectorXd z = x * w + Eigen::VectorXd::Constant(x.rows(), bias);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) loss += softplus(z[i]) - y[i] * z[i];
    const double n = static_cast<double>(x.rows());
    return loss / n + 0.5 * lambda / n * w.squaredNorm();
}

// Full-batch proximal gradient descent with backtracking: the data term is
// stepped explicitly and the quadratic penalty applied as an exact shrinkage,
// which keeps the iteration well conditioned even for very large lambda. The
// stopping rule is the gradient norm of the full penalized objective.
LinearWeights fit_logreg(const Eigen::MatrixXd& x, const std::vector<int>& yi,
                         const LogRegParams& params) {
    const Eigen::VectorXd y = to_vector(yi);
    const double n = static_cast<double>(x.rows());
    LinearWeights model;
    model.w = Eigen::VectorXd::Zero(x.cols());
    model.bias = 0.0;

    double loss = logreg_loss(x, y, model.w, model.bias, params.lambda);
    double step = 1.0;
    for (int iter = 0; iter < params.max_iterations; ++iter) {
        Eigen::VectorXd p(x.rows());
        const Eigen::VectorXd z = x * model.w + Eigen::VectorXd::Constant(x.rows(), model.bias);
        for (Eigen::Index i = 0; i < z.size(); ++i) p[i] = sigmoid(z[i]);
        const Eigen::VectorXd data_gw = x.transpose() * (p - y) / n;
        const double gb = (p - y).mean();
        const Eigen::VectorXd full_gw = data_gw + params.lambda / n * model.w;
        if (std::sqrt(full_gw.squaredNorm() + gb * gb) <= params.tolerance) break;

        step = std::min(step * 2.0, 1e4);
        bool accepted = false;
        for (int half = 0; half < 60; ++half) {
            const Eigen::VectorXd w_new =
                (model.w - step * data_gw) / (1.0 + step * params.lambda / n);
            const double b_new = model.bias - step * gb;
            const double loss_new = logreg_loss(x, y, w_new, b_new, params.lambda);
            const double move = (w_new - model.w).squaredNorm() +
                                (b_new - model.bias) * (b_new - model.bias);
            if (loss_new <= loss - 1e-4 / step * move) {
                model.w = w_new;
                model.bias = b_new;
                loss = loss_new;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // step underflow: no further progress possible
    }
    return model;
}

// ---------------------------------------------------------------------------
// Trees
// ---------------------------------------------------------------------------

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
};

class ClassificationTreeBuilder {
public:
    ClassificationTreeBuilder(const Eigen::MatrixXd& x, const std::vector<int>& y,
                              const ForestParams& params, rng::SplitMix64& gen)
        : x_(x), y_(y), params_(params), gen_(gen) {
        const int d = static_cast<int>(x.cols());
        subset_size_ = params.features_per_split < 0
                           ? static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))))
                           : params.features_per_split;
        if (subset_size_ <= 0 || subset_size_ > d) subset_size_ = d;
        pool_.resize(static_cast<std::size_t>(d));
    }

    Tree build(std::vector<int> idx) {
        idx_ = std::move(idx);
        tree_.nodes.clear();
        grow(0, static_cast<int>(idx_.size()), 0);
        return std::move(tree_);
    }

private:
    int make_leaf(int begin, int end) {
        int pos = 0;
        for (int i = begin; i < end; ++i) pos += y_[static_cast<std::size_t>(idx_[i])];
        const int neg = end - begin - pos;
        TreeNode node;
        node.value = pos > neg ? 1.0 : 0.0;  // tie votes negative
        tree_.nodes.push_back(node);
        return static_cast<int>(tree_.nodes.size()) - 1;
    }

    SplitChoice best_split_over(const std::vector<int>& features, int begin, int end) {
        SplitChoice best;
        const int size = end - begin;
        int total_pos = 0;
        for (int i = begin; i < end; ++i) total_pos += y_[static_cast<std::size_t>(idx_[i])];
        const double n = size;
        const double parent_gini = 1.0 - std::pow(total_pos / n, 2) -
                                   std::pow((size - total_pos) / n, 2);
        double best_gain = 1e-12;
        for (int f : features) {
            scratch_.assign(idx_.begin() + begin, idx_.begin() + end);
            std::sort(scratch_.begin(), scratch_.end(),
                      [&](int a, int b) { return x_(a, f) < x_(b, f); });
            int left_pos = 0;
            for (std::size_t k = 1; k < scratch_.size(); ++k) {
                left_pos += y_[static_cast<std::size_t>(scratch_[k - 1])];
                const double prev = x_(scratch_[k - 1], f);
                const double curr = x_(scratch_[k], f);
                if (curr <= prev) continue;
                const double nl = static_cast<double>(k);
                const double nr = n - nl;
                const double rp = total_pos - left_pos;
                const double gl =
                    1.0 - std::pow(left_pos / nl, 2) - std::pow((nl - left_pos) / nl, 2);
                const double gr = 1.0 - std::pow(rp / nr, 2) - std::pow((nr - rp) / nr, 2);
                const double gain = parent_gini - (nl * gl + nr * gr) / n;
                if (gain > best_gain) {
                    best_gain = gain;
                    best.feature = f;
                    best.threshold = (prev + curr) / 2.0;
                }
            }
        }
        return best;
    }

    int grow(int begin, int end, int depth) {
        const int size = end - begin;
        int pos = 0;
        for (int i = begin; i < end; ++i) pos += y_[static_cast<std::size_t>(idx_[i])];
        const bool pure = pos == 0 || pos == size;
        if (pure || size < params_.min_samples_split ||
            (params_.max_depth > 0 && depth >= params_.max_depth))
            return make_leaf(begin, end);

        const int d = static_cast<int>(x_.cols());
        std::iota(pool_.begin(), pool_.end(), 0);
        std::vector<int> features;
        if (subset_size_ < d) {
            for (int i = 0; i < subset_size_; ++i) {
                const int j =
                    i + static_cast<int>(gen_.below(static_cast<std::uint64_t>(d - i)));
                std::swap(pool_[static_cast<std::size_t>(i)],
                          pool_[static_cast<std::size_t>(j)]);
            }
            features.assign(pool_.begin(), pool_.begin() + subset_size_);
            std::sort(features.begin(), features.end());
        } else {
            features = pool_;
        }

        SplitChoice best = best_split_over(features, begin, end);
        if (best.feature < 0 && subset_size_ < d) {
            // No usable split among the sampled features; scan all features
            // before declaring a leaf, like the usual CART implementations.
            std::iota(pool_.begin(), pool_.end(), 0);
            best = best_split_over(pool_, begin, end);
        }
        if (best.feature < 0) return make_leaf(begin, end);

        const auto mid_it = std::stable_partition(
            idx_.begin() + begin, idx_.begin() + end,
            [&](int i) { return x_(i, best.feature) <= best.threshold; });
        const int mid = static_cast<int>(mid_it - idx_.begin());

        const int node_id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.push_back(TreeNode{best.feature, best.threshold, -1, -1, 0.0});
        const int left = grow(begin, mid, depth + 1);
        const int right = grow(mid, end, depth + 1);
        tree_.nodes[static_cast<std::size_t>(node_id)].left = left;
        tree_.nodes[static_cast<std::size_t>(node_id)].right = right;
        return node_id;
    }

    const Eigen::MatrixXd& x_;
    const std::vector<int>& y_;
    ForestParams params_;
    rng::SplitMix64& gen_;
    int subset_size_ = 0;
    std::vector<int> pool_;
    std::vector<int> scratch_;
    std::vector<int> idx_;
    Tree tree_;
};

// Least-squares regression tree on boosting pseudo-residuals; leaves carry
// Newton steps sum(residual)/sum(hessian).
class RegressionTreeBuilder {
public:
    RegressionTreeBuilder(const Eigen::MatrixXd& x, const Eigen::VectorXd& residual,
                          const Eigen::VectorXd& hessian, const BoostParams& params)
        : x_(x), r_(residual), h_(hessian), params_(params) {}

    Tree build(std::vector<int> idx) {
        idx_ = std::move(idx);
        tree_.nodes.clear();
        grow(0, static_cast<int>(idx_.size()), 0);
        return std::move(tree_);
    }

private:
    int make_leaf(int begin, int end) {
        double num = 0.0, den = 0.0;
        for (int i = begin; i < end; ++i) {
            num += r_[idx_[static_cast<std::size_t>(i)]];
            den += h_[idx_[static_cast<std::size_t>(i)]];
        }
        TreeNode node;
        node.value = num / std::max(den, 1e-12);
        tree_.nodes.push_back(node);
        return static_cast<int>(tree_.nodes.size()) - 1;
    }

    int grow(int begin, int end, int depth) {
        const int size = end - begin;
        if (size < params_.min_samples_split ||
            (params_.max_depth > 0 && depth >= params_.max_depth))
            return make_leaf(begin, end);

        double total = 0.0;
        for (int i = begin; i < end; ++i) total += r_[idx_[static_cast<std::size_t>(i)]];
        const double n = size;

        SplitChoice best;
        double best_score = total * total / n + 1e-12;  // baseline: no split
        for (int f = 0; f < static_cast<int>(x_.cols()); ++f) {
            scratch_.assign(idx_.begin() + begin, idx_.begin() + end);
            std::sort(scratch_.begin(), scratch_.end(),
                      [&](int a, int b) { return x_(a, f) < x_(b, f); });
            double left_sum = 0.0;
            for (std::size_t k = 1; k < scratch_.size(); ++k) {
                left_sum += r_[scratch_[k - 1]];
                const double prev = x_(scratch_[k - 1], f);
                const double curr = x_(scratch_[k], f);
                if (curr <= prev) continue;
                const double nl = static_cast<double>(k);
                const double nr = n - nl;
                const double right_sum = total - left_sum;
                const double score = left_sum * left_sum / nl + right_sum * right_sum / nr;
                if (score > best_score) {
                    best_score = score;
                    best.feature = f;
                    best.threshold = (prev + curr) / 2.0;
                }
            }
        }
        if (best.feature < 0) return make_leaf(begin, end);

        const auto mid_it = std::stable_partition(
            idx_.begin() + begin, idx_.begin() + end,
            [&](int i) { return x_(i, best.feature) <= best.threshold; });
        const int mid = static_cast<int>(mid_it - idx_.begin());

        const int node_id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.push_back(TreeNode{best.feature, best.threshold, -1, -1, 0.0});
        const int left = grow(begin, mid, depth + 1);
        const int right = grow(mid, end, depth + 1);
        tree_.nodes[static_cast<std::size_t>(node_id)].left = left;
        tree_.nodes[static_cast<std::size_t>(node_id)].right = right;
        return node_id;
    }

    const Eigen::MatrixXd& x_;
    const Eigen::VectorXd& r_;
    const Eigen::VectorXd& h_;
    BoostParams params_;
    std::vector<int> scratch_;
    std::vector<int> idx_;
    Tree tree_;
};

ForestWeights fit_forest(const Eigen::MatrixXd& x, const std::vector<int>& y,
                         const ForestParams& params, std::uint64_t seed) {
    const int n = static_cast<int>(x.rows());
    ForestWeights forest;
    forest.trees.reserve(static_cast<std::size_t>(params.n_trees));
    for (int t = 0; t < params.n_trees; ++t) {
        rng::SplitMix64 gen =
            rng::substream(seed, kForestStream + static_cast<std::uint64_t>(t));
        std::vector<int> idx(static_cast<std::size_t>(n));
        if (params.bootstrap) {
            for (auto& i : idx)
                i = static_cast<int>(gen.below(static_cast<std::uint64_t>(n)));
        } else {
            std::iota(idx.begin(), idx.end(), 0);
        }
        ClassificationTreeBuilder builder(x, y, params, gen);
        forest.trees.push_back(builder.build(std::move(idx)));
    }
    return forest;
}

BoostWeights fit_boosting(const Eigen::MatrixXd& x, const std::vector<int>& yi,
                          const BoostParams& params) {
    const Eigen::Index n = x.rows();
    const Eigen::VectorXd y = to_vector(yi);
    const double base_rate = y.mean();
    BoostWeights model;
    model.shrinkage = params.shrinkage;
    model.base_score = std::log(base_rate / (1.0 - base_rate));
    model.trees.reserve(static_cast<std::size_t>(params.n_stages));

    Eigen::VectorXd f = Eigen::VectorXd::Constant(n, model.base_score);
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int stage = 0; stage < params.n_stages; ++stage) {
        Eigen::VectorXd p(n), residual(n), hessian(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            p[i] = sigmoid(f[i]);
            residual[i] = y[i] - p[i];
            hessian[i] = p[i] * (1.0 - p[i]);
        }
        RegressionTreeBuilder builder(x, residual, hessian, params);
        std::iota(idx.begin(), idx.end(), 0);
        Tree tree = builder.build(idx);
        for (Eigen::Index i = 0; i < n; ++i)
            f[i] += params.shrinkage * tree.predict(x.row(i));
        model.trees.push_back(std::move(tree));
    }
    return model;
}

}  // namespace

double Tree::predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    int node = 0;
    while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const auto& nd = nodes[static_cast<std::size_t>(node)];
        node = x[nd.feature] <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(node)].value;
}

std::string_view family_name(Family f) { return kFamilyNames[static_cast<int>(f)]; }

std::optional<Family> family_from_name(std::string_view name) {
    for (int i = 0; i < 4; ++i)
        if (kFamilyNames[static_cast<std::size_t>(i)] == name) return static_cast<Family>(i);
    return std::nullopt;
}

void validate_config(const ModelConfig& cfg) {
    const auto require = [](bool ok, const char* what) {
        if (!ok) throw DataError(std::string("config: ") + what);
    };
    require(!cfg.mlp.hidden_sizes.empty(), "mlp hidden_sizes must be non-empty");
    for (int h : cfg.mlp.hidden_sizes) require(h >= 1, "mlp hidden layer size must be >= 1");
    require(cfg.mlp.learning_rate > 0, "mlp learning_rate must be > 0");
    require(cfg.mlp.l2 >= 0, "mlp l2 must be >= 0");
    require(cfg.mlp.batch_size >= 1, "mlp batch_size must be >= 1");
    require(cfg.mlp.epochs >= 0, "mlp epochs must be >= 0");
    require(cfg.mlp.beta1 >= 0 && cfg.mlp.beta1 < 1, "mlp beta1 must be in [0,1)");
    require(cfg.mlp.beta2 >= 0 && cfg.mlp.beta2 < 1, "mlp beta2 must be in [0,1)");
    require(cfg.mlp.epsilon > 0, "mlp epsilon must be > 0");
    require(cfg.logreg.lambda >= 0, "logreg lambda must be >= 0");
    require(cfg.logreg.tolerance > 0, "logreg tolerance must be > 0");
    require(cfg.logreg.max_iterations >= 1, "logreg max_iterations must be >= 1");
    require(cfg.forest.n_trees >= 1, "forest n_trees must be >= 1");
    require(cfg.forest.max_depth >= 0, "forest max_depth must be >= 0");
    require(cfg.forest.min_samples_split >= 2, "forest min_samples_split must be >= 2");
    require(cfg.boosting.n_stages >= 0, "boosting n_stages must be >= 0");
    require(cfg.boosting.max_depth >= 1, "boosting max_depth must be >= 1");
    require(cfg.boosting.shrinkage > 0, "boosting shrinkage must be > 0");
    require(cfg.boosting.min_samples_split >= 2, "boosting min_samples_split must be >= 2");
}

TrainedModel train_mlp(const color::FeatureMatrix& x, const std::vector<int>& y,
                       const ModelConfig& cfg) {
    validate_config(cfg);
    check_training_input(x, y);
    if (x.values.rows() < 2 * static_cast<Eigen::Index>(cfg.mlp.batch_size))
        throw DataError("train_mlp: need at least 2*batch_size samples");
    TrainedModel model;
    model.family = Family::mlp;
    model.standardizer = color::fit_standardizer(x);
    const color::FeatureMatrix xs = color::apply_standardizer(model.standardizer, x);
    model.weights = fit_mlp(xs.values, y, cfg.mlp, cfg.seed);
    return model;
}

TrainedModel train_logreg(const color::FeatureMatrix& x, const std::vector<int>& y,
                          const ModelConfig& cfg) {
    validate_config(cfg);
    check_training_input(x, y);
    TrainedModel model;
    model.family = Family::logreg;
    model.standardizer = color::fit_standardizer(x);
    const color::FeatureMatrix xs = color::apply_standardizer(model.standardizer, x);
    model.weights = fit_logreg(xs.values, y, cfg.logreg);
    return model;
}

TrainedModel train_random_forest(const color::FeatureMatrix& x, const std::vector<int>& y,
                                 const ModelConfig& cfg) {
    validate_config(cfg);
    check_training_input(x, y);
    TrainedModel model;
    model.family = Family::random_forest;
    model.standardizer = color::fit_standardizer(x);
    const color::FeatureMatrix xs = color::apply_standardizer(model.standardizer, x);
    model.weights = fit_forest(xs.values, y, cfg.forest, cfg.seed);
    return model;
}

TrainedModel train_gradient_boosting(const color::FeatureMatrix& x,
                                     const std::vector<int>& y, const ModelConfig& cfg) {
    validate_config(cfg);
    check_training_input(x, y);
    TrainedModel model;
    model.family = Family::gradient_boosting;
    model.standardizer = color::fit_standardizer(x);
    const color::FeatureMatrix xs = color::apply_standardizer(model.standardizer, x);
    model.weights = fit_boosting(xs.values, y, cfg.boosting);
    return model;
}

TrainedModel train(const color::FeatureMatrix& x, const std::vector<int>& y,
                   const ModelConfig& cfg) {
    switch (cfg.family) {
        case Family::mlp: return train_mlp(x, y, cfg);
        case Family::logreg: return train_logreg(x, y, cfg);
        case Family::random_forest: return train_random_forest(x, y, cfg);
        case Family::gradient_boosting: return train_gradient_boosting(x, y, cfg);
    }
    throw DataError("train: unknown family");
}

Eigen::VectorXd predict_scores(const TrainedModel& model, const color::FeatureMatrix& m) {
    if (m.space != model.space())
        throw DataError("predict: feature space does not match the fitted space");
    if (m.standardized)
        throw DataError("predict: expected raw features; the model standardizes internally");
    const color::FeatureMatrix xs = color::apply_standardizer(model.standardizer, m);

    Eigen::VectorXd scores(xs.values.rows());
    if (const auto* mlp = std::get_if<MlpWeights>(&model.weights)) {
        const MlpForward f = mlp_forward(*mlp, xs.values);
        const Eigen::RowVectorXd logits = f.post.back().row(0);
        for (Eigen::Index i = 0; i < logits.size(); ++i) scores[i] = sigmoid(logits[i]);
    } else if (const auto* lin = std::get_if<LinearWeights>(&model.weights)) {
        const Eigen::VectorXd z =
            xs.values * lin->w + Eigen::VectorXd::Constant(xs.values.rows(), lin->bias);
        for (Eigen::Index i = 0; i < z.size(); ++i) scores[i] = sigmoid(z[i]);
    } else if (const auto* forest = std::get_if<ForestWeights>(&model.weights)) {
        for (Eigen::Index i = 0; i < xs.values.rows(); ++i) {
            double votes = 0.0;
            for (const auto& tree : forest->trees) votes += tree.predict(xs.values.row(i));
            scores[i] = votes / static_cast<double>(forest->trees.size());
        }
    } else {
        const auto& boost = std::get<BoostWeights>(model.weights);
        for (Eigen::Index i = 0; i < xs.values.rows(); ++i) {
            double f = boost.base_score;
            for (const auto& tree : boost.trees)
                f += boost.shrinkage * tree.predict(xs.values.row(i));
            scores[i] = sigmoid(f);
        }
    }
    return scores;
}

double predict_score(const TrainedModel& model, const color::FeatureVector& v) {
    color::FeatureMatrix m;
    m.space = v.space;
    m.standardized = v.standardized;
    m.values = v.values.transpose();
    return predict_scores(model, m)[0];
}

int predict_label(const TrainedModel& model, const color::FeatureVector& v, double threshold) {
    return predict_score(model, v) > threshold ? 1 : 0;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kModelMagic = "STRIPSCREEN-MODEL 1";

void append_doubles(std::string& blob, const double* data, std::size_t count) {
    const std::size_t offset = blob.size();
    blob.resize(offset + count * sizeof(double));
    std::memcpy(blob.data() + offset, data, count * sizeof(double));
}

json tree_structure(const std::vector<Tree>& trees) {
    json arr = json::array();
    for (const auto& tree : trees) {
        json t;
        std::vector<int> feature, left, right;
        for (const auto& node : tree.nodes) {
            feature.push_back(node.feature);
            left.push_back(node.left);
            right.push_back(node.right);
        }
        t["feature"] = feature;
        t["left"] = left;
        t["right"] = right;
        arr.push_back(std::move(t));
    }
    return arr;
}

std::vector<Tree> trees_from_structure(const json& arr, const std::string& what) {
    std::vector<Tree> trees;
    for (const auto& t : arr) {
        const auto feature = t.at("feature").get<std::vector<int>>();
        const auto left = t.at("left").get<std::vector<int>>();
        const auto right = t.at("right").get<std::vector<int>>();
        if (feature.size() != left.size() || feature.size() != right.size())
            throw DataError(what + ": inconsistent tree structure");
        Tree tree;
        tree.nodes.resize(feature.size());
        for (std::size_t i = 0; i < feature.size(); ++i) {
            tree.nodes[i].feature = feature[i];
            tree.nodes[i].left = left[i];
            tree.nodes[i].right = right[i];
        }
        trees.push_back(std::move(tree));
    }
    return trees;
}

}  // namespace

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    json header;
    header["format"] = 1;
    header["family"] = family_name(model.family);
    header["space"] = color::space_name(model.space());
    json std_json;
    std_json["mean"] = std::vector<double>(model.standardizer.mean.begin(),
                                           model.standardizer.mean.end());
    std_json["stddev"] = std::vector<double>(model.standardizer.stddev.begin(),
                                             model.standardizer.stddev.end());
    std::vector<int> degenerate;
    for (bool d : model.standardizer.degenerate) degenerate.push_back(d ? 1 : 0);
    std_json["degenerate"] = degenerate;
    header["standardizer"] = std::move(std_json);

    std::string blob;
    json structure;
    if (const auto* mlp = std::get_if<MlpWeights>(&model.weights)) {
        std::vector<int> layers;
        layers.push_back(static_cast<int>(mlp->w.front().cols()));
        for (const auto& w : mlp->w) layers.push_back(static_cast<int>(w.rows()));
        structure["layers"] = layers;
        for (std::size_t l = 0; l < mlp->w.size(); ++l) {
            // Row-major write so the file layout does not depend on Eigen's
            // storage order.
            for (Eigen::Index r = 0; r < mlp->w[l].rows(); ++r)
                for (Eigen::Index c = 0; c < mlp->w[l].cols(); ++c) {
                    const double v = mlp->w[l](r, c);
                    append_doubles(blob, &v, 1);
                }
            append_doubles(blob, mlp->b[l].data(),
                           static_cast<std::size_t>(mlp->b[l].size()));
        }
    } else if (const auto* lin = std::get_if<LinearWeights>(&model.weights)) {
        structure["inputs"] = static_cast<int>(lin->w.size());
        append_doubles(blob, lin->w.data(), static_cast<std::size_t>(lin->w.size()));
        append_doubles(blob, &lin->bias, 1);
    } else if (const auto* forest = std::get_if<ForestWeights>(&model.weights)) {
        structure["trees"] = tree_structure(forest->trees);
        for (const auto& tree : forest->trees)
            for (const auto& node : tree.nodes) {
                append_doubles(blob, &node.threshold, 1);
                append_doubles(blob, &node.value, 1);
            }
    } else {
        const auto& boost = std::get<BoostWeights>(model.weights);
        structure["trees"] = tree_structure(boost.trees);
        append_doubles(blob, &boost.base_score, 1);
        append_doubles(blob, &boost.shrinkage, 1);
        for (const auto& tree : boost.trees)
            for (const auto& node : tree.nodes) {
                append_doubles(blob, &node.threshold, 1);
                append_doubles(blob, &node.value, 1);
            }
    }
    header["structure"] = std::move(structure);
    header["param_count"] = blob.size() / sizeof(double);

    std::string out;
    out += kModelMagic;
    out += '\n';
    out += header.dump();
    out += '\n';
    out += blob;
    write_file(path, out);
}

TrainedModel load_model(const std::filesystem::path& path) {
    const std::string content = read_file(path);
    const std::size_t magic_end = content.find('\n');
    if (magic_end == std::string::npos ||
        std::string_view(content).substr(0, magic_end) != kModelMagic)
        throw DataError(path.string() + ": not a model file");
    const std::size_t header_end = content.find('\n', magic_end + 1);
    if (header_end == std::string::npos)
        throw DataError(path.string() + ": truncated model header");

    json header;
    try {
        header = json::parse(content.substr(magic_end + 1, header_end - magic_end - 1));
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": bad model header: " + e.what());
    }
    if (header.at("format").get<int>() != 1)
        throw DataError(path.string() + ": unsupported model format version");

    TrainedModel model;
    const auto family = family_from_name(header.at("family").get<std::string>());
    if (!family) throw DataError(path.string() + ": unknown family");
    model.family = *family;
    const auto space = color::space_from_name(header.at("space").get<std::string>());
    if (!space) throw DataError(path.string() + ": unknown color space");

    const auto& std_json = header.at("standardizer");
    const auto mean = std_json.at("mean").get<std::vector<double>>();
    const auto stddev = std_json.at("stddev").get<std::vector<double>>();
    const auto degenerate = std_json.at("degenerate").get<std::vector<int>>();
    if (mean.size() != stddev.size() || mean.size() != degenerate.size())
        throw DataError(path.string() + ": inconsistent standardizer");
    model.standardizer.space = *space;
    model.standardizer.mean = Eigen::Map<const Eigen::VectorXd>(
        mean.data(), static_cast<Eigen::Index>(mean.size()));
    model.standardizer.stddev = Eigen::Map<const Eigen::VectorXd>(
        stddev.data(), static_cast<Eigen::Index>(stddev.size()));
    for (int d : degenerate) model.standardizer.degenerate.push_back(d != 0);

    const std::size_t param_count = header.at("param_count").get<std::size_t>();
    const std::string_view blob = std::string_view(content).substr(header_end + 1);
    if (blob.size() != param_count * sizeof(double))
        throw DataError(path.string() + ": parameter blob size mismatch");
    std::vector<double> params(param_count);
    if (param_count > 0) std::memcpy(params.data(), blob.data(), blob.size());
    std::size_t cursor = 0;
    const auto take = [&]() -> double {
        if (cursor >= params.size()) throw DataError(path.string() + ": parameter underrun");
        return params[cursor++];
    };

    const auto& structure = header.at("structure");
    if (model.family == Family::mlp) {
        const auto layers = structure.at("layers").get<std::vector<int>>();
        if (layers.size() < 2) throw DataError(path.string() + ": bad mlp structure");
        MlpWeights net;
        for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
            Eigen::MatrixXd w(layers[l + 1], layers[l]);
            for (Eigen::Index r = 0; r < w.rows(); ++r)
                for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = take();
            Eigen::VectorXd b(layers[l + 1]);
            for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = take();
            net.w.push_back(std::move(w));
            net.b.push_back(std::move(b));
        }
        model.weights = std::move(net);
    } else if (model.family == Family::logreg) {
        const int inputs = structure.at("inputs").get<int>();
        LinearWeights lin;
        lin.w.resize(inputs);
        for (int i = 0; i < inputs; ++i) lin.w[i] = take();
        lin.bias = take();
        model.weights = std::move(lin);
    } else if (model.family == Family::random_forest) {
        ForestWeights forest;
        forest.trees = trees_from_structure(structure.at("trees"), path.string());
        for (auto& tree : forest.trees)
            for (auto& node : tree.nodes) {
                node.threshold = take();
                node.value = take();
            }
        model.weights = std::move(forest);
    } else {
        BoostWeights boost;
        boost.trees = trees_from_structure(structure.at("trees"), path.string());
        boost.base_score = take();
        boost.shrinkage = take();
        for (auto& tree : boost.trees)
            for (auto& node : tree.nodes) {
                node.threshold = take();
                node.value = take();
            }
        model.weights = std::move(boost);
    }
    if (cursor != params.size()) throw DataError(path.string() + ": trailing parameters");
    return model;
}

// ---------------------------------------------------------------------------
// Grid search
// ---------------------------------------------------------------------------

HyperGrid default_grid(Family family) {
    HyperGrid grid;
    switch (family) {
        case Family::mlp:
            grid.axes = {{"learning_rate", {1e-2, 1e-3, 1e-4}}, {"l2", {1e-3, 1e-4}}};
            break;
        case Family::logreg:
            grid.axes = {{"lambda", {0.1, 1.0, 10.0}}};
            break;
        case Family::random_forest:
            grid.axes = {{"n_trees", {50, 100, 200}}};
            break;
        case Family::gradient_boosting:
            grid.axes = {{"n_stages", {50, 100}}, {"shrinkage", {0.05, 0.1}}};
            break;
    }
    return grid;
}

namespace {

void apply_axis(ModelConfig& cfg, Family family, const std::string& name, double value) {
    const auto as_int = [&](const char* what) {
        const int v = static_cast<int>(std::llround(value));
        if (std::fabs(value - v) > 1e-9)
            throw DataError(std::string("grid: ") + what + " must be integral");
        return v;
    };
    switch (family) {
        case Family::mlp:
            if (name == "learning_rate") { cfg.mlp.learning_rate = value; return; }
            if (name == "l2") { cfg.mlp.l2 = value; return; }
            if (name == "epochs") { cfg.mlp.epochs = as_int("epochs"); return; }
            if (name == "batch_size") { cfg.mlp.batch_size = as_int("batch_size"); return; }
            break;
        case Family::logreg:
            if (name == "lambda") { cfg.logreg.lambda = value; return; }
            if (name == "max_iterations") {
                cfg.logreg.max_iterations = as_int("max_iterations");
                return;
            }
            break;
        case Family::random_forest:
            if (name == "n_trees") { cfg.forest.n_trees = as_int("n_trees"); return; }
            if (name == "max_depth") { cfg.forest.max_depth = as_int("max_depth"); return; }
            if (name == "features_per_split") {
                cfg.forest.features_per_split = as_int("features_per_split");
                return;
            }
            break;
        case Family::gradient_boosting:
            if (name == "n_stages") { cfg.boosting.n_stages = as_int("n_stages"); return; }
            if (name == "max_depth") { cfg.boosting.max_depth = as_int("max_depth"); return; }
            if (name == "shrinkage") { cfg.boosting.shrinkage = value; return; }
            break;
    }
    throw DataError("grid: unknown hyperparameter '" + name + "' for family " +
                    std::string(family_name(family)));
}

}  // namespace

std::vector<ModelConfig> enumerate_grid(Family family, const HyperGrid& grid,
                                        const ModelConfig& base) {
    std::size_t total = 1;
    for (const auto& [name, values] : grid.axes) {
        if (values.empty()) throw DataError("grid: axis '" + name + "' has no candidates");
        total *= values.size();
    }
    if (total > grid.cap)
        throw DataError("grid: " + std::to_string(total) + " points exceeds cap " +
                        std::to_string(grid.cap));

    std::vector<ModelConfig> configs;
    configs.reserve(total);
    for (std::size_t flat = 0; flat < total; ++flat) {
        ModelConfig cfg = base;
        cfg.family = family;
        std::size_t rem = flat;
        // Later axes vary fastest.
        for (std::size_t a = grid.axes.size(); a-- > 0;) {
            const auto& [name, values] = grid.axes[a];
            apply_axis(cfg, family, name, values[rem % values.size()]);
            rem /= values.size();
        }
        validate_config(cfg);
        configs.push_back(std::move(cfg));
    }
    return configs;
}

ModelConfig grid_search(Family family, const HyperGrid& grid, const data::Dataset& train,
                        color::ColorSpaceId space, int folds, std::uint64_t seed,
                        const ModelConfig& base) {
    if (folds < 2) throw DataError("grid_search: folds must be >= 2");
    ModelConfig seeded = base;
    seeded.seed = seed;
    const auto candidates = enumerate_grid(family, grid, seeded);

    const color::FeatureMatrix fm = color::featurize(train, space);
    const auto y = data::labels(train);
    const std::size_t n = y.size();

    // Stratified fold assignment; every fold must contain both classes.
    std::vector<int> fold_of(n, 0);
    rng::SplitMix64 gen = rng::substream(seed, kCvStream);
    for (int cls = 0; cls < 2; ++cls) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i)
            if (y[i] == cls) idx.push_back(i);
        if (idx.size() < static_cast<std::size_t>(folds))
            throw DataError("grid_search: class " + std::to_string(cls) + " has only " +
                            std::to_string(idx.size()) + " samples, fewer than " +
                            std::to_string(folds) + " folds");
        rng::shuffle(idx, gen);
        for (std::size_t i = 0; i < idx.size(); ++i)
            fold_of[idx[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
    }

    struct FoldData {
        color::FeatureMatrix train_x;
        std::vector<int> train_y;
        color::FeatureMatrix test_x;
        std::vector<int> test_y;
    };
    std::vector<FoldData> fold_data(static_cast<std::size_t>(folds));
    for (int f = 0; f < folds; ++f) {
        std::vector<Eigen::Index> tr, te;
        for (std::size_t i = 0; i < n; ++i)
            (fold_of[i] == f ? te : tr).push_back(static_cast<Eigen::Index>(i));
        auto& fd = fold_data[static_cast<std::size_t>(f)];
        fd.train_x.space = fd.test_x.space = space;
        fd.train_x.values.resize(static_cast<Eigen::Index>(tr.size()), fm.values.cols());
        fd.test_x.values.resize(static_cast<Eigen::Index>(te.size()), fm.values.cols());
        for (std::size_t i = 0; i < tr.size(); ++i) {
            fd.train_x.values.row(static_cast<Eigen::Index>(i)) = fm.values.row(tr[i]);
            fd.train_y.push_back(y[static_cast<std::size_t>(tr[i])]);
        }
        for (std::size_t i = 0; i < te.size(); ++i) {
            fd.test_x.values.row(static_cast<Eigen::Index>(i)) = fm.values.row(te[i]);
            fd.test_y.push_back(y[static_cast<std::size_t>(te[i])]);
        }
    }

    double best_acc = -1.0;
    std::size_t best_index = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        double acc_sum = 0.0;
        for (const auto& fd : fold_data) {
            const TrainedModel model = learn::train(fd.train_x, fd.train_y, candidates[c]);
            const Eigen::VectorXd scores = predict_scores(model, fd.test_x);
            int correct = 0;
            for (Eigen::Index i = 0; i < scores.size(); ++i) {
                const int pred = scores[i] > 0.5 ? 1 : 0;
                if (pred == fd.test_y[static_cast<std::size_t>(i)]) ++correct;
            }
            acc_sum += static_cast<double>(correct) / static_cast<double>(fd.test_y.size());
        }
        const double mean_acc = acc_sum / static_cast<double>(folds);
        if (mean_acc > best_acc) {  // strict: ties keep the earlier grid point
            best_acc = mean_acc;
            best_index = c;
        }
    }
    return candidates[best_index];
}

}  // namespace stripscreen::learn
