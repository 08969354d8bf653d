#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sleepscore/features.hpp"
#include "sleepscore/labels.hpp"

namespace sleepscore {

enum class ClassWeightMode { Balanced, Uniform, Explicit };

struct TrainConfig {
    double learning_rate = 0.1;
    int epochs = 200;
    ClassWeightMode class_weight_mode = ClassWeightMode::Balanced;
    double explicit_weight0 = 1.0;
    double explicit_weight1 = 1.0;
    int n_estimators = 50;
    int min_samples_leaf = 100;
    int max_depth = 12;
    int features_per_split = 0;  // 0 = floor(sqrt(n_features))
    std::uint64_t rng_seed = 0;
};

inline void validate_config(const TrainConfig& cfg) {
    if (cfg.learning_rate <= 0) throw std::invalid_argument("learning_rate must be > 0");
    if (cfg.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (cfg.n_estimators < 1) throw std::invalid_argument("n_estimators must be >= 1");
    if (cfg.min_samples_leaf < 1) throw std::invalid_argument("min_samples_leaf must be >= 1");
    if (cfg.max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
    if (cfg.features_per_split < 0) throw std::invalid_argument("features_per_split must be >= 0");
    if (cfg.class_weight_mode == ClassWeightMode::Explicit &&
        (cfg.explicit_weight0 <= 0 || cfg.explicit_weight1 <= 0)) {
        throw std::invalid_argument("explicit class weights must be > 0");
    }
}

// Linear sleep/wake model with the z-score normalization baked in at fit time.
struct LogisticModel {
    std::vector<std::string> feature_names;
    std::vector<double> weights;
    double bias = 0.0;
    std::vector<double> norm_mean;
    std::vector<double> norm_std;  // zero-variance columns get std 1 (and weight 0)
};

namespace detail {

inline double sigmoid(double z) noexcept { return 1.0 / (1.0 + std::exp(-z)); }

// log(1 + e^z) without overflow
inline double softplus(double z) noexcept {
    return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// Column indices of `needed` inside `available`; throws listing both the
// missing and the unexpected names.
inline std::vector<std::size_t> align_columns(const std::vector<std::string>& needed,
                                              const std::vector<std::string>& available) {
    std::vector<std::size_t> map;
    std::string missing, extra;
    for (const auto& name : needed) {
        auto it = std::find(available.begin(), available.end(), name);
        if (it == available.end()) {
            missing += missing.empty() ? name : ", " + name;
        } else {
            map.push_back(static_cast<std::size_t>(it - available.begin()));
        }
    }
    for (const auto& name : available) {
        if (std::find(needed.begin(), needed.end(), name) == needed.end()) {
            extra += extra.empty() ? name : ", " + name;
        }
    }
    if (!missing.empty() || !extra.empty()) {
        throw std::invalid_argument("feature columns do not match the model (missing: [" +
                                    missing + "], extra: [" + extra + "])");
    }
    return map;
}

}  // namespace detail

// Per-class weights; Balanced gives w_c = n_total / (2 * n_c).
inline std::pair<double, double> class_weights(const LabelVector& y, const TrainConfig& cfg) {
    switch (cfg.class_weight_mode) {
        case ClassWeightMode::Uniform:
            return {1.0, 1.0};
        case ClassWeightMode::Explicit:
            return {cfg.explicit_weight0, cfg.explicit_weight1};
        default: {
            std::size_t n1 = 0;
            for (auto v : y) n1 += v ? 1 : 0;
            std::size_t n0 = y.size() - n1;
            if (n0 == 0 || n1 == 0) {
                throw std::invalid_argument(
                    std::string("balanced class weighting needs both classes; class ") +
                    (n0 == 0 ? "0" : "1") + " has no examples");
            }
            double n = static_cast<double>(y.size());
            return {n / (2.0 * static_cast<double>(n0)), n / (2.0 * static_cast<double>(n1))};
        }
    }
}

struct LossGradient {
    double loss = 0.0;
    std::vector<double> grad_weights;
    double grad_bias = 0.0;
};

// Class-weighted binary cross-entropy and its analytic gradient, averaged over
// rows. `rows` is row-major (n_rows x n_features).
inline LossGradient logistic_loss_gradient(const std::vector<double>& rows,
                                           std::size_t n_features, const LabelVector& y,
                                           const std::vector<double>& weights, double bias,
                                           double w0, double w1) {
    const std::size_t n = y.size();
    LossGradient out;
    out.grad_weights.assign(n_features, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* x = rows.data() + i * n_features;
        double z = bias;
        for (std::size_t j = 0; j < n_features; ++j) z += weights[j] * x[j];
        double label = y[i] ? 1.0 : 0.0;
        double cw = y[i] ? w1 : w0;
        out.loss += cw * (detail::softplus(z) - label * z);
        double resid = cw * (detail::sigmoid(z) - label);
        for (std::size_t j = 0; j < n_features; ++j) out.grad_weights[j] += resid * x[j];
        out.grad_bias += resid;
    }
    double inv = 1.0 / static_cast<double>(n);
    out.loss *= inv;
    out.grad_bias *= inv;
    for (auto& gwj : out.grad_weights) gwj *= inv;
    return out;
}

namespace detail {

// Normalized row-major copy of a column-major matrix.
inline std::vector<double> normalized_rows(const FeatureMatrix& X,
                                           const std::vector<double>& mean,
                                           const std::vector<double>& stdev) {
    const std::size_t n = X.n_rows(), k = X.n_cols();
    std::vector<double> rows(n * k);
    for (std::size_t j = 0; j < k; ++j) {
        const auto& col = X.columns[j];
        for (std::size_t i = 0; i < n; ++i) {
            rows[i * k + j] = (col[i] - mean[j]) / stdev[j];
        }
    }
    return rows;
}

}  // namespace detail

// Full-batch gradient descent on the weighted cross-entropy. The step is only
// taken if it does not increase the loss; otherwise the learning rate is
// halved and the step retried, so the loss trace is non-increasing.
inline LogisticModel train_logistic(const FeatureMatrix& X, const LabelVector& y,
                                    const TrainConfig& cfg) {
    validate_config(cfg);
    if (X.n_rows() == 0 || X.n_cols() == 0) throw std::invalid_argument("empty feature matrix");
    if (X.n_rows() != y.size()) throw std::invalid_argument("feature/label row count mismatch");
    auto [w0, w1] = class_weights(y, cfg);

    const std::size_t n = X.n_rows(), k = X.n_cols();
    LogisticModel model;
    model.feature_names = X.column_names;
    model.norm_mean.assign(k, 0.0);
    model.norm_std.assign(k, 1.0);
    for (std::size_t j = 0; j < k; ++j) {
        long double sum = 0.0L;
        for (double v : X.columns[j]) sum += v;
        double mean = static_cast<double>(sum / n);
        long double ss = 0.0L;
        for (double v : X.columns[j]) {
            long double d = v - mean;
            ss += d * d;
        }
        double sd = std::sqrt(static_cast<double>(ss / n));
        model.norm_mean[j] = mean;
        model.norm_std[j] = sd > 0.0 ? sd : 1.0;
    }

    std::vector<double> rows = detail::normalized_rows(X, model.norm_mean, model.norm_std);
    model.weights.assign(k, 0.0);
    model.bias = 0.0;

    double lr = cfg.learning_rate;
    LossGradient cur = logistic_loss_gradient(rows, k, y, model.weights, model.bias, w0, w1);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<double> cand_w(k);
        double cand_b;
        LossGradient next;
        while (true) {
            for (std::size_t j = 0; j < k; ++j) cand_w[j] = model.weights[j] - lr * cur.grad_weights[j];
            cand_b = model.bias - lr * cur.grad_bias;
            next = logistic_loss_gradient(rows, k, y, cand_w, cand_b, w0, w1);
            if (next.loss <= cur.loss || lr < 1e-15) break;
            lr *= 0.5;
        }
        if (next.loss > cur.loss) break;  // lr underflowed; converged
        model.weights = std::move(cand_w);
        model.bias = cand_b;
        cur = std::move(next);
    }
    return model;
}

inline std::vector<double> predict_proba(const LogisticModel& model, const FeatureMatrix& X) {
    auto map = detail::align_columns(model.feature_names, X.column_names);
    const std::size_t n = X.n_rows(), k = model.feature_names.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double z = model.bias;
        for (std::size_t j = 0; j < k; ++j) {
            double v = (X.columns[map[j]][i] - model.norm_mean[j]) / model.norm_std[j];
            z += model.weights[j] * v;
        }
        out[i] = detail::sigmoid(z);
    }
    return out;
}

}  // namespace sleepscore
