#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "esnd/esn.hpp"

namespace esnd::io {

inline constexpr const char* kModelMagic = "esnd-model";
inline constexpr int kModelVersion = 1;

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw std::runtime_error(std::string("model: ") + what + " is not a matrix");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(j[r].size()) != cols)
            throw std::runtime_error(std::string("model: ") + what + " has ragged rows");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = j[r][c].get<double>();
    }
    return m;
}

inline nlohmann::json esn_config_to_json(const esn::EsnConfig& c) {
    return {
        {"n_reservoir", c.n_reservoir}, {"n_inputs", c.n_inputs}, {"n_outputs", c.n_outputs},
        {"leakage", c.leakage},         {"spectral_radius", c.spectral_radius},
        {"bias_scale", c.bias_scale},   {"input_scale", c.input_scale},
        {"transient", c.transient},     {"train_len", c.train_len},
        {"seed", c.seed},
    };
}

/// Parses an EsnConfig from JSON; keys are optional (defaults kept) but
/// unknown keys are rejected.
inline esn::EsnConfig esn_config_from_json(const nlohmann::json& j) {
    static const char* known[] = {"n_reservoir", "n_inputs",    "n_outputs", "leakage",
                                  "spectral_radius", "bias_scale", "input_scale", "transient",
                                  "train_len",   "seed"};
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok)
            throw std::runtime_error("esn config: unknown key '" + key + "'");
    }
    esn::EsnConfig c;
    c.n_reservoir = j.value("n_reservoir", c.n_reservoir);
    c.n_inputs = j.value("n_inputs", c.n_inputs);
    c.n_outputs = j.value("n_outputs", c.n_outputs);
    c.leakage = j.value("leakage", c.leakage);
    c.spectral_radius = j.value("spectral_radius", c.spectral_radius);
    c.bias_scale = j.value("bias_scale", c.bias_scale);
    c.input_scale = j.value("input_scale", c.input_scale);
    c.transient = j.value("transient", c.transient);
    c.train_len = j.value("train_len", c.train_len);
    c.seed = j.value("seed", c.seed);
    return c;
}

inline nlohmann::json model_to_json(const esn::TrainedEsn& net) {
    nlohmann::json j;
    j["magic"] = kModelMagic;
    j["version"] = kModelVersion;
    j["config"] = esn_config_to_json(net.config);
    j["w_in"] = matrix_to_json(net.weights.w_in);
    j["w"] = matrix_to_json(net.weights.w);
    j["w_out"] = matrix_to_json(net.w_out);
    nlohmann::json state;
    state["clock"] = net.state.clock;
    nlohmann::json r = nlohmann::json::array();
    for (Eigen::Index i = 0; i < net.state.r.size(); ++i)
        r.push_back(net.state.r[i]);
    state["r"] = std::move(r);
    j["state"] = std::move(state);
    return j;
}

inline esn::TrainedEsn model_from_json(const nlohmann::json& j) {
    if (!j.contains("magic") || j["magic"] != kModelMagic)
        throw std::runtime_error("model: missing or wrong magic string");
    if (!j.contains("version") || j["version"].get<int>() != kModelVersion)
        throw std::runtime_error("model: unsupported version");

    esn::TrainedEsn net;
    net.config = esn_config_from_json(j.at("config"));
    net.weights.w_in = matrix_from_json(j.at("w_in"), "w_in");
    net.weights.w = matrix_from_json(j.at("w"), "w");
    net.w_out = matrix_from_json(j.at("w_out"), "w_out");

    const auto& state = j.at("state");
    net.state.clock = state.at("clock").get<std::int64_t>();
    const auto& r = state.at("r");
    net.state.r.resize(static_cast<Eigen::Index>(r.size()));
    for (Eigen::Index i = 0; i < net.state.r.size(); ++i)
        net.state.r[i] = r[static_cast<std::size_t>(i)].get<double>();

    if (net.weights.w.rows() != net.config.n_reservoir ||
        net.w_out.cols() != net.config.n_reservoir ||
        net.state.r.size() != net.config.n_reservoir)
        throw std::runtime_error("model: matrix dimensions disagree with the config");
    return net;
}

inline void save_model(const std::filesystem::path& path, const esn::TrainedEsn& net) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("save_model: cannot open " + path.string());
    out << model_to_json(net).dump(1) << '\n';
    if (!out)
        throw std::runtime_error("save_model: write failed for " + path.string());
}

inline esn::TrainedEsn load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_model: cannot open " + path.string());
    nlohmann::json j;
    in >> j;
    return model_from_json(j);
}

} // namespace esnd::io
