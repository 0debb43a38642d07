#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "intopt/errors.hpp"
#include "intopt/problem.hpp"

namespace intopt {

struct Layer {
    Matrix weight;  // out x in
    Vector bias;    // out
};

struct LayerGradients {
    Matrix weight;
    Vector bias;

    void set_zero() {
        weight.setZero();
        bias.setZero();
    }
};

/// Affine stack with ReLU between layers and identity output. One layer is a
/// plain linear model; two layers give one hidden ReLU layer. Forward caches
/// the activations the manual backward pass needs.
class PredictorModel {
public:
    PredictorModel() = default;

    /// Uniform +-1/sqrt(fan_in) init, deterministic in the seed. Weights fill
    /// row-major, then the bias, layer by layer.
    static PredictorModel create(Eigen::Index input_dim, Eigen::Index output_dim,
                                 Eigen::Index hidden_dim, std::uint64_t seed) {
        PredictorModel model;
        std::mt19937_64 rng(seed);
        std::vector<std::pair<Eigen::Index, Eigen::Index>> shapes;
        if (hidden_dim > 0) {
            shapes.emplace_back(hidden_dim, input_dim);
            shapes.emplace_back(output_dim, hidden_dim);
        } else {
            shapes.emplace_back(output_dim, input_dim);
        }
        for (auto [rows, cols] : shapes) {
            const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
            std::uniform_real_distribution<double> dist(-bound, bound);
            Layer layer;
            layer.weight.resize(rows, cols);
            for (Eigen::Index r = 0; r < rows; ++r)
                for (Eigen::Index c = 0; c < cols; ++c) layer.weight(r, c) = dist(rng);
            layer.bias.resize(rows);
            for (Eigen::Index r = 0; r < rows; ++r) layer.bias(r) = dist(rng);
            model.layers_.push_back(std::move(layer));
        }
        return model;
    }

    static PredictorModel zeros(Eigen::Index input_dim, Eigen::Index output_dim,
                                Eigen::Index hidden_dim) {
        PredictorModel model = create(input_dim, output_dim, hidden_dim, 0);
        for (auto& layer : model.layers_) {
            layer.weight.setZero();
            layer.bias.setZero();
        }
        return model;
    }

    const std::vector<Layer>& layers() const { return layers_; }
    std::vector<Layer>& layers() { return layers_; }

    Eigen::Index input_dim() const { return layers_.front().weight.cols(); }
    Eigen::Index output_dim() const { return layers_.back().weight.rows(); }

    Vector forward(const Vector& z) {
        if (z.size() != input_dim())
            throw StructuralError("predictor input width mismatch");
        cache_input_ = z;
        cache_pre_.clear();
        cache_post_.clear();
        Vector a = z;
        for (size_t i = 0; i < layers_.size(); ++i) {
            Vector pre = layers_[i].weight * a + layers_[i].bias;
            cache_pre_.push_back(pre);
            if (i + 1 < layers_.size()) a = pre.cwiseMax(0.0);
            else a = pre;
            cache_post_.push_back(a);
        }
        has_cache_ = true;
        return a;
    }

    /// Exact reverse-mode gradients of grad_out . output with respect to every
    /// parameter. Requires the activations cached by the matching forward call.
    std::vector<LayerGradients> backward(const Vector& z, const Vector& grad_out) const {
        if (!has_cache_ || cache_input_.size() != z.size() ||
            !(cache_input_.array() == z.array()).all())
            throw StructuralError("backward requires a cached forward pass for the same input");
        if (grad_out.size() != output_dim())
            throw StructuralError("predictor output gradient width mismatch");
        std::vector<LayerGradients> grads(layers_.size());
        Vector delta = grad_out;
        for (int i = static_cast<int>(layers_.size()) - 1; i >= 0; --i) {
            const Vector& input = (i == 0) ? cache_input_ : cache_post_[static_cast<size_t>(i - 1)];
            grads[static_cast<size_t>(i)].weight = delta * input.transpose();
            grads[static_cast<size_t>(i)].bias = delta;
            if (i > 0) {
                delta = layers_[static_cast<size_t>(i)].weight.transpose() * delta;
                const Vector& pre = cache_pre_[static_cast<size_t>(i - 1)];
                for (Eigen::Index j = 0; j < delta.size(); ++j)
                    if (pre(j) <= 0.0) delta(j) = 0.0;
            }
        }
        return grads;
    }

    std::vector<LayerGradients> zero_gradients() const {
        std::vector<LayerGradients> grads(layers_.size());
        for (size_t i = 0; i < layers_.size(); ++i) {
            grads[i].weight = Matrix::Zero(layers_[i].weight.rows(), layers_[i].weight.cols());
            grads[i].bias = Vector::Zero(layers_[i].bias.size());
        }
        return grads;
    }

private:
    std::vector<Layer> layers_;
    Vector cache_input_;
    std::vector<Vector> cache_pre_;
    std::vector<Vector> cache_post_;
    bool has_cache_ = false;
};

enum class OptimizerKind { kSgd, kAdam };

struct OptimizerState {
    OptimizerKind kind = OptimizerKind::kAdam;
    double learning_rate = 1e-2;
    double weight_decay = 0.0;  // optional L2 coefficient
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    long step_count = 0;
    std::vector<LayerGradients> m;  // first moments, per layer
    std::vector<LayerGradients> v;  // second moments, per layer

    static OptimizerState sgd(double lr, double weight_decay = 0.0) {
        OptimizerState st;
        st.kind = OptimizerKind::kSgd;
        st.learning_rate = lr;
        st.weight_decay = weight_decay;
        return st;
    }

    static OptimizerState adam(double lr, double weight_decay = 0.0) {
        OptimizerState st;
        st.kind = OptimizerKind::kAdam;
        st.learning_rate = lr;
        st.weight_decay = weight_decay;
        return st;
    }
};

namespace detail {

template <typename Mat>
void adam_update(Mat& param, const Mat& grad, Mat& m, Mat& v, const OptimizerState& st) {
    m = st.beta1 * m + (1.0 - st.beta1) * grad;
    v = st.beta2 * v + (1.0 - st.beta2) * grad.cwiseAbs2();
    const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step_count));
    const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step_count));
    param -= (st.learning_rate *
              ((m / bc1).array() / ((v / bc2).array().sqrt() + st.epsilon)))
                 .matrix();
}

}  // namespace detail

/// SGD: theta -= lr * g. Adam: standard bias-corrected update. An optional L2
/// term folds into the gradient before the update.
inline void optimizer_step(OptimizerState& state, PredictorModel& model,
                           const std::vector<LayerGradients>& gradients) {
    auto& layers = model.layers();
    if (gradients.size() != layers.size())
        throw StructuralError("gradient count != layer count");
    if (state.m.empty() && state.kind == OptimizerKind::kAdam) {
        state.m.resize(layers.size());
        state.v.resize(layers.size());
        for (size_t i = 0; i < layers.size(); ++i) {
            state.m[i].weight = Matrix::Zero(layers[i].weight.rows(), layers[i].weight.cols());
            state.m[i].bias = Vector::Zero(layers[i].bias.size());
            state.v[i] = state.m[i];
        }
    }
    state.step_count += 1;
    for (size_t i = 0; i < layers.size(); ++i) {
        Matrix gw = gradients[i].weight;
        Vector gb = gradients[i].bias;
        if (state.weight_decay != 0.0) {
            gw += state.weight_decay * layers[i].weight;
            gb += state.weight_decay * layers[i].bias;
        }
        if (state.kind == OptimizerKind::kSgd) {
            layers[i].weight -= state.learning_rate * gw;
            layers[i].bias -= state.learning_rate * gb;
        } else {
            detail::adam_update(layers[i].weight, gw, state.m[i].weight, state.v[i].weight, state);
            detail::adam_update(layers[i].bias, gb, state.m[i].bias, state.v[i].bias, state);
        }
    }
}

}  // namespace intopt
