#pragma once

// Residual feedforward regressor from fact vectors to cost-to-goal values:
// dense(F->H) + ReLU, dense(H->H) + ReLU, a residual block of two ReLU dense
// layers with a skip-add, and a ReLU output neuron. Training is mini-batch
// MSE descent with adaptive moment estimation, a 90/10 split and validation
// early stopping; the best-validation weights are restored.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "samplan/sample_io.hpp"

namespace samplan {

struct LearnerError : std::runtime_error {
    explicit LearnerError(const std::string& message) : std::runtime_error(message) {}
};

struct Model {
    std::int64_t input_dim = 0;
    std::int64_t hidden = 250;
    // Row-major weight matrices with matching bias vectors.
    std::vector<double> w1, b1;  // hidden x input_dim
    std::vector<double> w2, b2;  // hidden x hidden
    std::vector<double> w3, b3;  // hidden x hidden (residual block)
    std::vector<double> w4, b4;  // hidden x hidden (residual block)
    std::vector<double> w5, b5;  // 1 x hidden

    double predict(const std::vector<std::uint8_t>& bits) const;
    double predict(const FactVector& facts) const { return predict(facts.bits); }
};

Model init_model(std::int64_t input_dim, std::uint64_t seed, std::int64_t hidden = 250);

struct ModelGradients {
    std::vector<double> w1, b1, w2, b2, w3, b3, w4, b4, w5, b5;
    void resize(const Model& model);
};

// Batch MSE loss (1/B) * sum (predict(x_b) - target_b)^2 over row-major
// inputs of width model.input_dim.
double batch_loss(const Model& model, const double* inputs, const double* targets,
                  std::size_t batch);
// Same loss plus analytic gradients with respect to every parameter.
double batch_loss_and_gradients(const Model& model, const double* inputs, const double* targets,
                                std::size_t batch, ModelGradients& gradients);

struct TrainConfig {
    double learning_rate = 1e-4;
    std::size_t batch_size = 64;
    std::int64_t patience = 100;
    double split = 0.9;
    double max_seconds = 0.0;    // 0 = no wall-time budget
    std::int64_t max_epochs = 0; // 0 = unlimited
    std::uint64_t seed = 1;
};

struct TrainReport {
    std::int64_t epochs = 0;
    std::int64_t best_epoch = 0;
    double best_validation_loss = 0.0;
    double final_training_loss = 0.0;
    double wall_seconds = 0.0;
    int born_dead_retries = 0;
};

TrainReport train(Model& model, const TrainingSet& data, const TrainConfig& config);

// Reinitializes with derived seeds until the model outputs a non-zero value
// for at least one of the given inputs; throws after retry_cap attempts.
Model ensure_not_born_dead(Model model, const std::vector<std::vector<std::uint8_t>>& inputs,
                           std::uint64_t base_seed, int* retries, int retry_cap = 1000);

void write_model(std::ostream& out, const Model& model);
Model read_model(std::istream& in);
void save_model(const std::string& path, const Model& model);
Model load_model(const std::string& path);

}  // namespace samplan
