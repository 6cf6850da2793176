#include "samplan/learner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "samplan/kernels.hpp"
#include "samplan/rng.hpp"

namespace samplan {

namespace {

using kernels::Dims;

std::vector<double> he_normal(std::size_t rows, std::size_t cols, Rng& rng) {
    std::vector<double> weights(rows * cols);
    const double scale = std::sqrt(2.0 / static_cast<double>(cols));
    for (double& w : weights)
        w = rng.normal() * scale;
    return weights;
}

// Forward activations for one batch; buffers are reused across calls.
struct Workspace {
    std::vector<double> z1, a1, z2, a2, z3, a3, z4, a4, r, z5, y;
    std::vector<double> dz1, dz2, dz3, dz4, dz5, da1, da2, da3, da4, dr;

    void resize(std::size_t batch, std::size_t hidden) {
        const std::size_t n = batch * hidden;
        z1.resize(n); a1.resize(n); z2.resize(n); a2.resize(n);
        z3.resize(n); a3.resize(n); z4.resize(n); a4.resize(n);
        r.resize(n); z5.resize(batch); y.resize(batch);
        dz1.resize(n); dz2.resize(n); dz3.resize(n); dz4.resize(n); dz5.resize(batch);
        da1.resize(n); da2.resize(n); da3.resize(n); da4.resize(n); dr.resize(n);
    }
};

template <bool Parallel>
void forward(const Model& m, const double* x, std::size_t batch, Workspace& ws) {
    namespace k = kernels;
    const std::size_t h = m.hidden;
    ws.resize(batch, h);
    const Dims in_dims{batch, static_cast<std::size_t>(m.input_dim), h};
    const Dims hid_dims{batch, h, h};
    const Dims out_dims{batch, h, 1};
    if constexpr (Parallel) {
        k::parallel::dense_forward(m.w1.data(), m.b1.data(), x, in_dims, ws.z1.data());
        k::parallel::relu_forward(ws.z1.data(), batch * h, ws.a1.data());
        k::parallel::dense_forward(m.w2.data(), m.b2.data(), ws.a1.data(), hid_dims, ws.z2.data());
        k::parallel::relu_forward(ws.z2.data(), batch * h, ws.a2.data());
        k::parallel::dense_forward(m.w3.data(), m.b3.data(), ws.a2.data(), hid_dims, ws.z3.data());
        k::parallel::relu_forward(ws.z3.data(), batch * h, ws.a3.data());
        k::parallel::dense_forward(m.w4.data(), m.b4.data(), ws.a3.data(), hid_dims, ws.z4.data());
        k::parallel::relu_forward(ws.z4.data(), batch * h, ws.a4.data());
        for (std::size_t i = 0; i < batch * h; ++i)
            ws.r[i] = ws.a2[i] + ws.a4[i];
        k::parallel::dense_forward(m.w5.data(), m.b5.data(), ws.r.data(), out_dims, ws.z5.data());
        k::parallel::relu_forward(ws.z5.data(), batch, ws.y.data());
    } else {
        k::serial::dense_forward(m.w1.data(), m.b1.data(), x, in_dims, ws.z1.data());
        k::serial::relu_forward(ws.z1.data(), batch * h, ws.a1.data());
        k::serial::dense_forward(m.w2.data(), m.b2.data(), ws.a1.data(), hid_dims, ws.z2.data());
        k::serial::relu_forward(ws.z2.data(), batch * h, ws.a2.data());
        k::serial::dense_forward(m.w3.data(), m.b3.data(), ws.a2.data(), hid_dims, ws.z3.data());
        k::serial::relu_forward(ws.z3.data(), batch * h, ws.a3.data());
        k::serial::dense_forward(m.w4.data(), m.b4.data(), ws.a3.data(), hid_dims, ws.z4.data());
        k::serial::relu_forward(ws.z4.data(), batch * h, ws.a4.data());
        for (std::size_t i = 0; i < batch * h; ++i)
            ws.r[i] = ws.a2[i] + ws.a4[i];
        k::serial::dense_forward(m.w5.data(), m.b5.data(), ws.r.data(), out_dims, ws.z5.data());
        k::serial::relu_forward(ws.z5.data(), batch, ws.y.data());
    }
}

using Gradients = ModelGradients;

// Backward pass for batch MSE loss (1/B) * sum (y - target)^2.
void backward(const Model& m, const double* x, const double* targets, std::size_t batch,
              Workspace& ws, Gradients& g) {
    namespace k = kernels::parallel;
    const std::size_t h = m.hidden;
    const Dims in_dims{batch, static_cast<std::size_t>(m.input_dim), h};
    const Dims hid_dims{batch, h, h};
    const Dims out_dims{batch, h, 1};

    std::vector<double> dy(batch);
    for (std::size_t b = 0; b < batch; ++b)
        dy[b] = 2.0 * (ws.y[b] - targets[b]) / static_cast<double>(batch);
    k::relu_backward(ws.z5.data(), dy.data(), batch, ws.dz5.data());

    k::dense_backward_params(ws.r.data(), ws.dz5.data(), out_dims, g.w5.data(), g.b5.data());
    k::dense_backward_input(m.w5.data(), ws.dz5.data(), out_dims, ws.dr.data());

    // Skip-add: dr feeds both the residual branch (through a4) and a2.
    k::relu_backward(ws.z4.data(), ws.dr.data(), batch * h, ws.dz4.data());
    k::dense_backward_params(ws.a3.data(), ws.dz4.data(), hid_dims, g.w4.data(), g.b4.data());
    k::dense_backward_input(m.w4.data(), ws.dz4.data(), hid_dims, ws.da3.data());

    k::relu_backward(ws.z3.data(), ws.da3.data(), batch * h, ws.dz3.data());
    k::dense_backward_params(ws.a2.data(), ws.dz3.data(), hid_dims, g.w3.data(), g.b3.data());
    k::dense_backward_input(m.w3.data(), ws.dz3.data(), hid_dims, ws.da2.data());
    for (std::size_t i = 0; i < batch * h; ++i)
        ws.da2[i] += ws.dr[i];

    k::relu_backward(ws.z2.data(), ws.da2.data(), batch * h, ws.dz2.data());
    k::dense_backward_params(ws.a1.data(), ws.dz2.data(), hid_dims, g.w2.data(), g.b2.data());
    k::dense_backward_input(m.w2.data(), ws.dz2.data(), hid_dims, ws.da1.data());

    k::relu_backward(ws.z1.data(), ws.da1.data(), batch * h, ws.dz1.data());
    k::dense_backward_params(x, ws.dz1.data(), in_dims, g.w1.data(), g.b1.data());
}

// Adaptive moment estimation with the canonical decay constants.
struct Adam {
    double lr;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::int64_t steps = 0;
    Gradients m, v;

    explicit Adam(const Model& model, double learning_rate) : lr(learning_rate) {
        m.resize(model);
        v.resize(model);
        zero(m);
        zero(v);
    }

    static void zero(Gradients& g) {
        auto clear = [](std::vector<double>& values) { std::fill(values.begin(), values.end(), 0.0); };
        clear(g.w1); clear(g.b1); clear(g.w2); clear(g.b2); clear(g.w3);
        clear(g.b3); clear(g.w4); clear(g.b4); clear(g.w5); clear(g.b5);
    }

    void update_group(std::vector<double>& params, const std::vector<double>& grads,
                      std::vector<double>& m1, std::vector<double>& m2, double correction1,
                      double correction2) {
#pragma omp parallel for schedule(static)
        for (std::size_t i = 0; i < params.size(); ++i) {
            m1[i] = beta1 * m1[i] + (1.0 - beta1) * grads[i];
            m2[i] = beta2 * m2[i] + (1.0 - beta2) * grads[i] * grads[i];
            const double m_hat = m1[i] / correction1;
            const double v_hat = m2[i] / correction2;
            params[i] -= lr * m_hat / (std::sqrt(v_hat) + epsilon);
        }
    }

    void step(Model& model, const Gradients& g) {
        ++steps;
        const double correction1 = 1.0 - std::pow(beta1, static_cast<double>(steps));
        const double correction2 = 1.0 - std::pow(beta2, static_cast<double>(steps));
        update_group(model.w1, g.w1, m.w1, v.w1, correction1, correction2);
        update_group(model.b1, g.b1, m.b1, v.b1, correction1, correction2);
        update_group(model.w2, g.w2, m.w2, v.w2, correction1, correction2);
        update_group(model.b2, g.b2, m.b2, v.b2, correction1, correction2);
        update_group(model.w3, g.w3, m.w3, v.w3, correction1, correction2);
        update_group(model.b3, g.b3, m.b3, v.b3, correction1, correction2);
        update_group(model.w4, g.w4, m.w4, v.w4, correction1, correction2);
        update_group(model.b4, g.b4, m.b4, v.b4, correction1, correction2);
        update_group(model.w5, g.w5, m.w5, v.w5, correction1, correction2);
        update_group(model.b5, g.b5, m.b5, v.b5, correction1, correction2);
    }
};

void gather_batch(const TrainingSet& data, const std::vector<std::size_t>& order,
                  std::size_t begin, std::size_t end, std::vector<double>& x,
                  std::vector<double>& targets) {
    const std::size_t width = data.facts;
    x.resize((end - begin) * width);
    targets.resize(end - begin);
    for (std::size_t row = begin; row < end; ++row) {
        const std::vector<std::uint8_t>& bits = data.inputs[order[row]];
        double* out = x.data() + (row - begin) * width;
        for (std::size_t i = 0; i < width; ++i)
            out[i] = bits[i];
        targets[row - begin] = data.targets[order[row]];
    }
}

double evaluate_mse(const Model& model, const TrainingSet& data,
                    const std::vector<std::size_t>& indices, std::size_t batch_size,
                    Workspace& ws) {
    std::vector<double> x;
    std::vector<double> targets;
    double total = 0.0;
    for (std::size_t begin = 0; begin < indices.size(); begin += batch_size) {
        const std::size_t end = std::min(begin + batch_size, indices.size());
        gather_batch(data, indices, begin, end, x, targets);
        forward<true>(model, x.data(), end - begin, ws);
        for (std::size_t b = 0; b < end - begin; ++b) {
            const double diff = ws.y[b] - targets[b];
            total += diff * diff;
        }
    }
    return total / static_cast<double>(indices.size());
}

}  // namespace

void ModelGradients::resize(const Model& m) {
    w1.resize(m.w1.size()); b1.resize(m.b1.size());
    w2.resize(m.w2.size()); b2.resize(m.b2.size());
    w3.resize(m.w3.size()); b3.resize(m.b3.size());
    w4.resize(m.w4.size()); b4.resize(m.b4.size());
    w5.resize(m.w5.size()); b5.resize(m.b5.size());
}

double batch_loss(const Model& model, const double* inputs, const double* targets,
                  std::size_t batch) {
    thread_local Workspace ws;
    forward<false>(model, inputs, batch, ws);
    double total = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
        const double diff = ws.y[b] - targets[b];
        total += diff * diff;
    }
    return total / static_cast<double>(batch);
}

double batch_loss_and_gradients(const Model& model, const double* inputs, const double* targets,
                                std::size_t batch, ModelGradients& gradients) {
    thread_local Workspace ws;
    gradients.resize(model);
    forward<true>(model, inputs, batch, ws);
    backward(model, inputs, targets, batch, ws, gradients);
    double total = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
        const double diff = ws.y[b] - targets[b];
        total += diff * diff;
    }
    return total / static_cast<double>(batch);
}

double Model::predict(const std::vector<std::uint8_t>& bits) const {
    if (static_cast<std::int64_t>(bits.size()) != input_dim)
        throw LearnerError("predict: input has " + std::to_string(bits.size()) +
                           " facts, model expects " + std::to_string(input_dim));
    thread_local Workspace ws;
    thread_local std::vector<double> x;
    x.resize(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        x[i] = bits[i];
    forward<false>(*this, x.data(), 1, ws);
    return ws.y[0];
}

Model init_model(std::int64_t input_dim, std::uint64_t seed, std::int64_t hidden) {
    if (input_dim < 1)
        throw LearnerError("init_model: input dimension must be positive");
    Model model;
    model.input_dim = input_dim;
    model.hidden = hidden;
    Rng rng(seed);
    model.w1 = he_normal(hidden, input_dim, rng);
    model.b1.assign(hidden, 0.0);
    model.w2 = he_normal(hidden, hidden, rng);
    model.b2.assign(hidden, 0.0);
    model.w3 = he_normal(hidden, hidden, rng);
    model.b3.assign(hidden, 0.0);
    model.w4 = he_normal(hidden, hidden, rng);
    model.b4.assign(hidden, 0.0);
    model.w5 = he_normal(1, hidden, rng);
    model.b5.assign(1, 0.0);
    return model;
}

TrainReport train(Model& model, const TrainingSet& data, const TrainConfig& config) {
    const auto start_time = std::chrono::steady_clock::now();
    if (data.size() == 0)
        throw LearnerError("training dataset is empty");
    if (data.size() < 10)
        throw LearnerError("training dataset needs at least 10 samples");
    if (config.split <= 0.0 || config.split >= 1.0)
        throw LearnerError("split fraction must be in (0, 1)");
    if (config.batch_size < 1)
        throw LearnerError("batch size must be at least 1");
    if (data.facts != model.input_dim)
        throw LearnerError("dataset facts do not match model input dimension");

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed_stream(config.seed, "train"));
    rng.shuffle(order);
    const std::size_t train_count = std::max<std::size_t>(
        1, static_cast<std::size_t>(config.split * static_cast<double>(data.size())));
    std::vector<std::size_t> train_indices(order.begin(), order.begin() + train_count);
    std::vector<std::size_t> val_indices(order.begin() + train_count, order.end());
    if (val_indices.empty())
        throw LearnerError("validation split is empty");

    Workspace ws;
    Gradients grads;
    grads.resize(model);
    Adam adam(model, config.learning_rate);
    std::vector<double> x;
    std::vector<double> targets;

    TrainReport report;
    Model best = model;
    double best_val = evaluate_mse(model, data, val_indices, config.batch_size, ws);
    report.best_epoch = 0;
    std::int64_t epochs_without_improvement = 0;

    auto elapsed_seconds = [&start_time]() {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time)
            .count();
    };

    for (std::int64_t epoch = 1;; ++epoch) {
        if (config.max_epochs > 0 && epoch > config.max_epochs)
            break;
        rng.shuffle(train_indices);
        for (std::size_t begin = 0; begin < train_indices.size(); begin += config.batch_size) {
            const std::size_t end = std::min(begin + config.batch_size, train_indices.size());
            gather_batch(data, train_indices, begin, end, x, targets);
            forward<true>(model, x.data(), end - begin, ws);
            backward(model, x.data(), targets.data(), end - begin, ws, grads);
            adam.step(model, grads);
        }
        report.epochs = epoch;

        const double val_loss = evaluate_mse(model, data, val_indices, config.batch_size, ws);
        if (val_loss < best_val) {
            best_val = val_loss;
            best = model;
            report.best_epoch = epoch;
            epochs_without_improvement = 0;
        } else {
            ++epochs_without_improvement;
        }
        if (epochs_without_improvement >= config.patience)
            break;
        if (config.max_seconds > 0.0 && elapsed_seconds() >= config.max_seconds)
            break;
    }

    model = std::move(best);
    report.best_validation_loss = best_val;
    report.final_training_loss = evaluate_mse(model, data, train_indices, config.batch_size, ws);
    report.wall_seconds = elapsed_seconds();
    return report;
}

Model ensure_not_born_dead(Model model, const std::vector<std::vector<std::uint8_t>>& inputs,
                           std::uint64_t base_seed, int* retries, int retry_cap) {
    if (inputs.empty())
        throw LearnerError("born-dead check needs at least one training input");
    auto alive = [&inputs](const Model& m) {
        for (const auto& bits : inputs)
            if (m.predict(bits) > 0.0)
                return true;
        return false;
    };
    int attempts = 0;
    while (!alive(model)) {
        ++attempts;
        if (attempts > retry_cap)
            throw LearnerError("model still born dead after " + std::to_string(retry_cap) +
                               " reinitializations");
        model = init_model(model.input_dim, seed_stream(base_seed, "reseed") + attempts,
                           model.hidden);
    }
    if (retries != nullptr)
        *retries = attempts;
    return model;
}

namespace {

void write_layer(std::ostream& out, const std::string& name, std::size_t rows, std::size_t cols,
                 const std::vector<double>& weights, const std::vector<double>& biases) {
    out << "layer " << name << ' ' << rows << ' ' << cols << '\n';
    char buffer[64];
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            std::snprintf(buffer, sizeof buffer, "%.17g", weights[r * cols + c]);
            out << buffer << (c + 1 == cols ? "" : " ");
        }
        out << '\n';
    }
    for (std::size_t r = 0; r < rows; ++r) {
        std::snprintf(buffer, sizeof buffer, "%.17g", biases[r]);
        out << buffer << (r + 1 == rows ? "" : " ");
    }
    out << '\n';
}

void read_layer(std::istream& in, const std::string& expected_name, std::size_t expected_rows,
                std::size_t expected_cols, std::vector<double>& weights,
                std::vector<double>& biases) {
    std::string keyword;
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    if (!(in >> keyword >> name >> rows >> cols) || keyword != "layer" || name != expected_name)
        throw LearnerError("model file: expected layer " + expected_name);
    if (rows != expected_rows || cols != expected_cols)
        throw LearnerError("model file: layer " + expected_name + " has wrong shape");
    weights.resize(rows * cols);
    biases.resize(rows);
    for (double& w : weights)
        if (!(in >> w))
            throw LearnerError("model file: truncated weights in layer " + expected_name);
    for (double& b : biases)
        if (!(in >> b))
            throw LearnerError("model file: truncated biases in layer " + expected_name);
}

}  // namespace

void write_model(std::ostream& out, const Model& model) {
    out << "samplan-model v1\n";
    out << "input_dim=" << model.input_dim << " hidden=" << model.hidden << '\n';
    const std::size_t h = model.hidden;
    write_layer(out, "dense1", h, model.input_dim, model.w1, model.b1);
    write_layer(out, "dense2", h, h, model.w2, model.b2);
    write_layer(out, "res1", h, h, model.w3, model.b3);
    write_layer(out, "res2", h, h, model.w4, model.b4);
    write_layer(out, "output", 1, h, model.w5, model.b5);
}

Model read_model(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "samplan-model v1")
        throw LearnerError("not a samplan model file");
    if (!std::getline(in, line))
        throw LearnerError("model file: missing dimensions line");
    Model model;
    if (std::sscanf(line.c_str(), "input_dim=%ld hidden=%ld", &model.input_dim, &model.hidden) != 2)
        throw LearnerError("model file: malformed dimensions line");
    const std::size_t h = model.hidden;
    read_layer(in, "dense1", h, model.input_dim, model.w1, model.b1);
    read_layer(in, "dense2", h, h, model.w2, model.b2);
    read_layer(in, "res1", h, h, model.w3, model.b3);
    read_layer(in, "res2", h, h, model.w4, model.b4);
    read_layer(in, "output", 1, h, model.w5, model.b5);
    return model;
}

void save_model(const std::string& path, const Model& model) {
    std::ofstream out(path);
    if (!out)
        throw LearnerError("cannot write model file: " + path);
    write_model(out, model);
}

Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw LearnerError("cannot read model file: " + path);
    return read_model(in);
}

}  // namespace samplan
