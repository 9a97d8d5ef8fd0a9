#include "incadet/gcn.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace incadet {

namespace {

constexpr double kClamp = 1e-7;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Eigen::MatrixXd relu(const Eigen::MatrixXd& z) { return z.cwiseMax(0.0); }

struct Activations {
    std::vector<Eigen::MatrixXd> pre;     // Z1..Z3
    std::vector<Eigen::MatrixXd> post;    // H0..H3 (post[0] = input features)
    Eigen::VectorXd readout;              // mean-pooled H3
    double probability = 0.0;
};

void check_shapes(const GcnModel& model, const GraphSample& sample) {
    if (sample.aggregation.rows() != sample.aggregation.cols()) {
        throw std::invalid_argument("aggregation matrix must be square");
    }
    if (sample.features.rows() != sample.aggregation.rows()) {
        throw std::invalid_argument("feature rows must match aggregation size");
    }
    if (model.layer_weights.size() != 3) throw std::invalid_argument("model must have 3 layers");
    if (sample.features.cols() != model.layer_weights[0].rows()) {
        throw std::invalid_argument("feature width does not match first layer");
    }
}

// mask may be null (inference) or an M x h inverted-dropout mask on H3.
Activations run_forward(const GcnModel& model, const GraphSample& sample,
                        const Eigen::MatrixXd* mask) {
    check_shapes(model, sample);
    Activations act;
    act.post.push_back(sample.features);
    for (int layer = 0; layer < 3; ++layer) {
        act.pre.push_back(sample.aggregation * act.post.back() * model.layer_weights[layer]);
        act.post.push_back(relu(act.pre.back()));
    }
    if (mask) act.post.back() = act.post.back().cwiseProduct(*mask);
    act.readout = act.post.back().colwise().mean();
    act.probability = sigmoid(act.readout.dot(model.readout_weights));
    return act;
}

void run_backward(const GcnModel& model, const GraphSample& sample, const Activations& act,
                  int label, const Eigen::MatrixXd* mask, Gradients& grads) {
    const double m = static_cast<double>(sample.features.rows());
    const double dz = act.probability - static_cast<double>(label);

    grads.readout = dz * act.readout;
    Eigen::MatrixXd dh = (dz / m) * Eigen::MatrixXd::Ones(sample.features.rows(), 1) *
                         model.readout_weights.transpose();
    if (mask) dh = dh.cwiseProduct(*mask);

    grads.layer.assign(3, Eigen::MatrixXd());
    for (int layer = 2; layer >= 0; --layer) {
        const Eigen::MatrixXd dzl =
            dh.cwiseProduct((act.pre[static_cast<std::size_t>(layer)].array() > 0.0)
                                .cast<double>()
                                .matrix());
        grads.layer[static_cast<std::size_t>(layer)] =
            (sample.aggregation * act.post[static_cast<std::size_t>(layer)]).transpose() * dzl;
        if (layer > 0) {
            dh = sample.aggregation.transpose() * dzl *
                 model.layer_weights[static_cast<std::size_t>(layer)].transpose();
        }
    }
}

}  // namespace

GraphSample featurize(const CausalGraph& graph, const PriorKnowledge& prior) {
    const long m = graph.node_count();
    GraphSample sample;
    sample.aggregation =
        Eigen::MatrixXd::Identity(m, m) - laplacian(graph).normalized;

    sample.features = Eigen::MatrixXd::Zero(m, 3);
    Eigen::MatrixXd total = graph.intra.cwiseAbs();
    for (const Eigen::MatrixXd& block : graph.lags) total += block.cwiseAbs();
    sample.features.col(0) = total.colwise().sum().transpose();  // in-degree
    sample.features.col(1) = total.rowwise().sum();              // out-degree
    const std::set<std::string> domain = prior.all();
    for (long i = 0; i < m; ++i) {
        if (domain.count(graph.node_ids[static_cast<std::size_t>(i)]) > 0) {
            sample.features(i, 2) = 1.0;
        }
    }
    return sample;
}

GcnModel GcnModel::init(int features, int hidden, double dropout, unsigned int seed) {
    if (features < 1 || hidden < 1) throw std::invalid_argument("model dimensions must be positive");
    if (dropout < 0.0 || dropout >= 1.0) throw std::invalid_argument("dropout must lie in [0,1)");

    std::mt19937 rng(seed);
    auto glorot = [&rng](long rows, long cols) {
        const double s = std::sqrt(6.0 / static_cast<double>(rows + cols));
        std::uniform_real_distribution<double> dist(-s, s);
        Eigen::MatrixXd w(rows, cols);
        for (long i = 0; i < rows; ++i) {
            for (long j = 0; j < cols; ++j) w(i, j) = dist(rng);
        }
        return w;
    };

    GcnModel model;
    model.layer_weights = {glorot(features, hidden), glorot(hidden, hidden), glorot(hidden, hidden)};
    const Eigen::MatrixXd r = glorot(hidden, 1);
    model.readout_weights = r.col(0);
    model.dropout_rate = dropout;
    return model;
}

double forward(const GcnModel& model, const GraphSample& sample) {
    return run_forward(model, sample, nullptr).probability;
}

double bce_loss(double p, int label) {
    const double pc = std::clamp(p, kClamp, 1.0 - kClamp);
    return label == 1 ? -std::log(pc) : -std::log(1.0 - pc);
}

double forward_backward(const GcnModel& model, const GraphSample& sample, Gradients& out) {
    const Activations act = run_forward(model, sample, nullptr);
    run_backward(model, sample, act, sample.label, nullptr, out);
    out.min_abs_preactivation = std::numeric_limits<double>::infinity();
    for (const Eigen::MatrixXd& z : act.pre) {
        if (z.size() > 0) {
            out.min_abs_preactivation =
                std::min(out.min_abs_preactivation, z.cwiseAbs().minCoeff());
        }
    }
    return bce_loss(act.probability, sample.label);
}

TrainResult train(const std::vector<GraphSample>& samples, const TrainConfig& config) {
    if (samples.size() < 2) throw std::invalid_argument("training needs at least 2 samples");
    if (config.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    bool has_pos = false, has_neg = false;
    for (const GraphSample& s : samples) (s.label == 1 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) throw std::invalid_argument("training needs both classes present");

    const int f = static_cast<int>(samples.front().features.cols());
    GcnModel model = GcnModel::init(f, config.hidden_width, config.dropout, config.seed);
    std::mt19937 rng(config.seed + 1);
    std::bernoulli_distribution keep(1.0 - config.dropout);

    std::vector<Eigen::MatrixXd> m_layer(3), v_layer(3);
    for (int i = 0; i < 3; ++i) {
        m_layer[static_cast<std::size_t>(i)] =
            Eigen::MatrixXd::Zero(model.layer_weights[static_cast<std::size_t>(i)].rows(),
                                  model.layer_weights[static_cast<std::size_t>(i)].cols());
        v_layer[static_cast<std::size_t>(i)] = m_layer[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXd m_readout = Eigen::VectorXd::Zero(config.hidden_width);
    Eigen::VectorXd v_readout = m_readout;

    TrainResult result;
    const double n = static_cast<double>(samples.size());

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::vector<Eigen::MatrixXd> g_layer(3);
        for (int i = 0; i < 3; ++i) {
            g_layer[static_cast<std::size_t>(i)] =
                Eigen::MatrixXd::Zero(model.layer_weights[static_cast<std::size_t>(i)].rows(),
                                      model.layer_weights[static_cast<std::size_t>(i)].cols());
        }
        Eigen::VectorXd g_readout = Eigen::VectorXd::Zero(config.hidden_width);
        double loss = 0.0;

        for (const GraphSample& sample : samples) {
            Eigen::MatrixXd mask;
            const Eigen::MatrixXd* mask_ptr = nullptr;
            if (config.dropout > 0.0) {
                mask.resize(sample.features.rows(), config.hidden_width);
                const double scale = 1.0 / (1.0 - config.dropout);
                for (long i = 0; i < mask.rows(); ++i) {
                    for (long j = 0; j < mask.cols(); ++j) mask(i, j) = keep(rng) ? scale : 0.0;
                }
                mask_ptr = &mask;
            }
            const Activations act = run_forward(model, sample, mask_ptr);
            Gradients grads;
            run_backward(model, sample, act, sample.label, mask_ptr, grads);
            for (int i = 0; i < 3; ++i) {
                g_layer[static_cast<std::size_t>(i)] += grads.layer[static_cast<std::size_t>(i)];
            }
            g_readout += grads.readout;
            loss += bce_loss(act.probability, sample.label);
        }
        loss /= n;
        if (!std::isfinite(loss)) {
            throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                     std::to_string(epoch));
        }
        result.loss_trace.push_back(loss);

        const double t = static_cast<double>(epoch + 1);
        const double correction =
            std::sqrt(1.0 - std::pow(config.beta2, t)) / (1.0 - std::pow(config.beta1, t));
        auto adam_step = [&](Eigen::MatrixXd& w, Eigen::MatrixXd& m, Eigen::MatrixXd& v,
                             const Eigen::MatrixXd& g) {
            const Eigen::MatrixXd mean_g = g / n;
            m = config.beta1 * m + (1.0 - config.beta1) * mean_g;
            v = config.beta2 * v + (1.0 - config.beta2) * mean_g.cwiseProduct(mean_g);
            w -= config.learning_rate * correction *
                 m.cwiseQuotient((v.cwiseSqrt().array() + config.epsilon).matrix());
        };
        for (int i = 0; i < 3; ++i) {
            adam_step(model.layer_weights[static_cast<std::size_t>(i)],
                      m_layer[static_cast<std::size_t>(i)], v_layer[static_cast<std::size_t>(i)],
                      g_layer[static_cast<std::size_t>(i)]);
        }
        {
            const Eigen::VectorXd mean_g = g_readout / n;
            m_readout = config.beta1 * m_readout + (1.0 - config.beta1) * mean_g;
            v_readout =
                config.beta2 * v_readout + (1.0 - config.beta2) * mean_g.cwiseProduct(mean_g);
            model.readout_weights -=
                config.learning_rate * correction *
                m_readout.cwiseQuotient((v_readout.cwiseSqrt().array() + config.epsilon).matrix());
        }
        for (const Eigen::MatrixXd& w : model.layer_weights) {
            if (!w.allFinite()) {
                throw std::runtime_error("training diverged: non-finite weights at epoch " +
                                         std::to_string(epoch));
            }
        }
    }
    result.model = std::move(model);
    return result;
}

Classification classify(const GcnModel& model, const CausalGraph& graph,
                        const PriorKnowledge& prior, double threshold) {
    const GraphSample sample = featurize(graph, prior);
    Classification c;
    c.probability = forward(model, sample);
    c.label = c.probability >= threshold ? 1 : 0;
    return c;
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (long i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (long j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows) {
    const long r = static_cast<long>(rows.size());
    const long c = r > 0 ? static_cast<long>(rows.at(0).size()) : 0;
    Eigen::MatrixXd m(r, c);
    for (long i = 0; i < r; ++i) {
        for (long j = 0; j < c; ++j) m(i, j) = rows.at(static_cast<std::size_t>(i))
                                                   .at(static_cast<std::size_t>(j))
                                                   .get<double>();
    }
    return m;
}

}  // namespace

std::string GcnModel::to_json() const {
    nlohmann::json j;
    j["format"] = "incadet-gcn";
    j["version"] = 1;
    j["dropout_rate"] = dropout_rate;
    j["layers"] = nlohmann::json::array();
    for (const Eigen::MatrixXd& w : layer_weights) j["layers"].push_back(matrix_to_json(w));
    j["readout"] = nlohmann::json::array();
    for (long i = 0; i < readout_weights.size(); ++i) j["readout"].push_back(readout_weights[i]);
    return j.dump(2);
}

GcnModel GcnModel::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != "incadet-gcn") {
        throw std::invalid_argument("not a model dump");
    }
    GcnModel model;
    model.dropout_rate = j.at("dropout_rate").get<double>();
    for (const auto& w : j.at("layers")) model.layer_weights.push_back(matrix_from_json(w));
    const auto& r = j.at("readout");
    model.readout_weights.resize(static_cast<long>(r.size()));
    for (long i = 0; i < model.readout_weights.size(); ++i) {
        model.readout_weights[i] = r.at(static_cast<std::size_t>(i)).get<double>();
    }
    if (model.layer_weights.size() != 3) throw std::invalid_argument("model dump must have 3 layers");
    return model;
}

}  // namespace incadet
