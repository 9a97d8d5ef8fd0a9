#include "incadet/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace incadet {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_real(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0') {
        throw std::invalid_argument("config key '" + key + "': expected a number, got '" + value + "'");
    }
    return v;
}

long parse_integer(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const long v = std::strtol(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0') {
        throw std::invalid_argument("config key '" + key + "': expected an integer, got '" + value + "'");
    }
    return v;
}

bool parse_flag(const std::string& key, const std::string& value) {
    if (value == "true" || value == "on" || value == "1") return true;
    if (value == "false" || value == "off" || value == "0") return false;
    throw std::invalid_argument("config key '" + key + "': expected true/false, got '" + value + "'");
}

std::vector<std::string> parse_name_list(const std::string& value) {
    std::vector<std::string> names;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) names.push_back(item);
    }
    return names;
}

std::string join(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ",";
        out += names[i];
    }
    return out;
}

}  // namespace

void PipelineConfig::validate() const {
    if (window_length < 2) throw std::invalid_argument("window_length must be >= 2");
    if (sample_period <= 0) throw std::invalid_argument("sample_period must be positive");
    if (lag_order < 0) throw std::invalid_argument("lag_order must be non-negative");
    if (discovery.l1_intra < 0 || discovery.l1_lag < 0) {
        throw std::invalid_argument("l1 penalties must be non-negative");
    }
    if (discovery.edge_threshold < 0) throw std::invalid_argument("edge_threshold must be non-negative");
    if (discovery.max_outer_iterations < 1) throw std::invalid_argument("max_outer_iterations must be >= 1");
    if (discovery.acyclicity_tolerance <= 0) throw std::invalid_argument("acyclicity_tolerance must be positive");
    if (histogram_bins < 1) throw std::invalid_argument("histogram_bins must be >= 1");
    if (weight_range <= 0) throw std::invalid_argument("weight_range must be positive");
    if (similarity_threshold < 0 || similarity_threshold > 1) {
        throw std::invalid_argument("similarity_threshold must lie in [0,1]");
    }
    if (reinforcement < 1.0) throw std::invalid_argument("reinforcement must be >= 1");
    if (weight_cap <= 0) throw std::invalid_argument("weight_cap must be positive");
    if (stop_threshold <= 0 || stop_threshold > 1) {
        throw std::invalid_argument("stop_threshold must lie in (0,1]");
    }
    if (outdegree_range <= 0) throw std::invalid_argument("outdegree_range must be positive");
    if (hidden_width < 1) throw std::invalid_argument("hidden_width must be >= 1");
    if (dropout < 0 || dropout >= 1) throw std::invalid_argument("dropout must lie in [0,1)");
    if (learning_rate <= 0) throw std::invalid_argument("learning_rate must be positive");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (classify_threshold < 0 || classify_threshold > 1) {
        throw std::invalid_argument("classify_threshold must lie in [0,1]");
    }
    if (train_fraction <= 0 || train_fraction >= 1) {
        throw std::invalid_argument("train_fraction must lie in (0,1)");
    }
}

void apply_profile(PipelineConfig& config, const std::string& profile) {
    static const std::map<std::string, int> lags = {
        {"swat", 4}, {"wadi", 3}, {"te", 4}, {"smd", 1}};
    const auto it = lags.find(profile);
    if (it == lags.end()) {
        throw std::invalid_argument("unknown dataset profile '" + profile + "' (expected swat, wadi, te, or smd)");
    }
    config.lag_order = it->second;
}

void set_config_key(PipelineConfig& c, const std::string& key, const std::string& value) {
    using Setter = std::function<void(PipelineConfig&, const std::string&, const std::string&)>;
    static const std::map<std::string, Setter> setters = {
        {"window_length", [](auto& c, auto& k, auto& v) { c.window_length = static_cast<int>(parse_integer(k, v)); }},
        {"sample_period", [](auto& c, auto& k, auto& v) { c.sample_period = parse_real(k, v); }},
        {"standardize", [](auto& c, auto& k, auto& v) { c.standardize = parse_flag(k, v); }},
        {"label_column", [](auto& c, auto&, auto& v) { c.label_column = v; }},
        {"lag_order", [](auto& c, auto& k, auto& v) { c.lag_order = static_cast<int>(parse_integer(k, v)); }},
        {"dataset_profile", [](auto& c, auto&, auto& v) { apply_profile(c, v); }},
        {"l1_intra", [](auto& c, auto& k, auto& v) { c.discovery.l1_intra = parse_real(k, v); }},
        {"l1_lag", [](auto& c, auto& k, auto& v) { c.discovery.l1_lag = parse_real(k, v); }},
        {"edge_threshold", [](auto& c, auto& k, auto& v) { c.discovery.edge_threshold = parse_real(k, v); }},
        {"max_outer_iterations", [](auto& c, auto& k, auto& v) { c.discovery.max_outer_iterations = static_cast<int>(parse_integer(k, v)); }},
        {"acyclicity_tolerance", [](auto& c, auto& k, auto& v) { c.discovery.acyclicity_tolerance = parse_real(k, v); }},
        {"max_inner_iterations", [](auto& c, auto& k, auto& v) { c.discovery.max_inner_iterations = static_cast<int>(parse_integer(k, v)); }},
        {"histogram_bins", [](auto& c, auto& k, auto& v) { c.histogram_bins = static_cast<int>(parse_integer(k, v)); }},
        {"weight_range", [](auto& c, auto& k, auto& v) { c.weight_range = parse_real(k, v); }},
        {"similarity_threshold", [](auto& c, auto& k, auto& v) { c.similarity_threshold = parse_real(k, v); }},
        {"reinforcement", [](auto& c, auto& k, auto& v) { c.reinforcement = parse_real(k, v); }},
        {"weight_cap", [](auto& c, auto& k, auto& v) { c.weight_cap = parse_real(k, v); }},
        {"stop_threshold", [](auto& c, auto& k, auto& v) { c.stop_threshold = parse_real(k, v); }},
        {"buffer_capacity", [](auto& c, auto& k, auto& v) { c.buffer_capacity = static_cast<std::size_t>(parse_integer(k, v)); }},
        {"outdegree_range", [](auto& c, auto& k, auto& v) { c.outdegree_range = parse_real(k, v); }},
        {"hidden_width", [](auto& c, auto& k, auto& v) { c.hidden_width = static_cast<int>(parse_integer(k, v)); }},
        {"dropout", [](auto& c, auto& k, auto& v) { c.dropout = parse_real(k, v); }},
        {"learning_rate", [](auto& c, auto& k, auto& v) { c.learning_rate = parse_real(k, v); }},
        {"epochs", [](auto& c, auto& k, auto& v) { c.epochs = static_cast<int>(parse_integer(k, v)); }},
        {"adam_beta1", [](auto& c, auto& k, auto& v) { c.adam_beta1 = parse_real(k, v); }},
        {"adam_beta2", [](auto& c, auto& k, auto& v) { c.adam_beta2 = parse_real(k, v); }},
        {"adam_epsilon", [](auto& c, auto& k, auto& v) { c.adam_epsilon = parse_real(k, v); }},
        {"classify_threshold", [](auto& c, auto& k, auto& v) { c.classify_threshold = parse_real(k, v); }},
        {"train_fraction", [](auto& c, auto& k, auto& v) { c.train_fraction = parse_real(k, v); }},
        {"seed", [](auto& c, auto& k, auto& v) { c.seed = static_cast<unsigned int>(parse_integer(k, v)); }},
        {"attack_nodes", [](auto& c, auto&, auto& v) { c.attack_nodes = parse_name_list(v); }},
        {"impact_nodes", [](auto& c, auto&, auto& v) { c.impact_nodes = parse_name_list(v); }},
        {"disable_replay_buffer", [](auto& c, auto& k, auto& v) { c.disable_replay_buffer = parse_flag(k, v); }},
        {"disable_cer", [](auto& c, auto& k, auto& v) { c.disable_cer = parse_flag(k, v); }},
        {"disable_lagged_discovery", [](auto& c, auto& k, auto& v) { c.disable_lagged_discovery = parse_flag(k, v); }},
    };
    const auto it = setters.find(key);
    if (it == setters.end()) throw std::invalid_argument("unknown config key '" + key + "'");
    it->second(c, key, value);
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);

    PipelineConfig config;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            set_config_key(config, key, value);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    config.validate();
    return config;
}

std::string config_to_string(const PipelineConfig& c) {
    std::ostringstream out;
    out.precision(17);
    out << "window_length = " << c.window_length << "\n"
        << "sample_period = " << c.sample_period << "\n"
        << "standardize = " << (c.standardize ? "true" : "false") << "\n"
        << "label_column = " << c.label_column << "\n"
        << "lag_order = " << c.lag_order << "\n"
        << "l1_intra = " << c.discovery.l1_intra << "\n"
        << "l1_lag = " << c.discovery.l1_lag << "\n"
        << "edge_threshold = " << c.discovery.edge_threshold << "\n"
        << "max_outer_iterations = " << c.discovery.max_outer_iterations << "\n"
        << "acyclicity_tolerance = " << c.discovery.acyclicity_tolerance << "\n"
        << "max_inner_iterations = " << c.discovery.max_inner_iterations << "\n"
        << "histogram_bins = " << c.histogram_bins << "\n"
        << "weight_range = " << c.weight_range << "\n"
        << "similarity_threshold = " << c.similarity_threshold << "\n"
        << "reinforcement = " << c.reinforcement << "\n"
        << "weight_cap = " << c.weight_cap << "\n"
        << "stop_threshold = " << c.stop_threshold << "\n"
        << "buffer_capacity = " << c.buffer_capacity << "\n"
        << "outdegree_range = " << c.outdegree_range << "\n"
        << "hidden_width = " << c.hidden_width << "\n"
        << "dropout = " << c.dropout << "\n"
        << "learning_rate = " << c.learning_rate << "\n"
        << "epochs = " << c.epochs << "\n"
        << "adam_beta1 = " << c.adam_beta1 << "\n"
        << "adam_beta2 = " << c.adam_beta2 << "\n"
        << "adam_epsilon = " << c.adam_epsilon << "\n"
        << "classify_threshold = " << c.classify_threshold << "\n"
        << "train_fraction = " << c.train_fraction << "\n"
        << "seed = " << c.seed << "\n"
        << "attack_nodes = " << join(c.attack_nodes) << "\n"
        << "impact_nodes = " << join(c.impact_nodes) << "\n"
        << "disable_replay_buffer = " << (c.disable_replay_buffer ? "true" : "false") << "\n"
        << "disable_cer = " << (c.disable_cer ? "true" : "false") << "\n"
        << "disable_lagged_discovery = " << (c.disable_lagged_discovery ? "true" : "false") << "\n";
    return out.str();
}

}  // namespace incadet
