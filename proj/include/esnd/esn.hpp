#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "esnd/rng.hpp"

namespace esnd::esn {

/// All reservoir hyperparameters. Defaults are the tuned denoising values.
struct EsnConfig {
    int n_reservoir = 500;        ///< N
    int n_inputs = 1;             ///< N_u
    int n_outputs = 1;            ///< N_d
    double leakage = 0.80;        ///< a, in [0, 1]
    double spectral_radius = 0.75;///< lambda, > 0
    double bias_scale = 1.50;     ///< p: input-matrix bias column range [-p, p]
    double input_scale = 1.00;    ///< q: input-matrix signal column range [-q, q]
    int transient = 200;          ///< l: warm-up steps discarded before training
    int train_len = 25000;        ///< L: trajectory columns collected
    std::uint64_t seed = 0;

    void validate() const {
        if (n_reservoir < 1)
            throw std::invalid_argument("EsnConfig: n_reservoir must be >= 1");
        if (n_inputs < 1 || n_outputs < 1)
            throw std::invalid_argument("EsnConfig: n_inputs and n_outputs must be >= 1");
        if (!(leakage >= 0.0 && leakage <= 1.0))
            throw std::invalid_argument("EsnConfig: leakage must lie in [0, 1]");
        if (!(spectral_radius > 0.0))
            throw std::invalid_argument("EsnConfig: spectral_radius must be positive");
        if (!(bias_scale >= 0.0) || !(input_scale >= 0.0))
            throw std::invalid_argument("EsnConfig: bias_scale and input_scale must be non-negative");
        if (transient < 0)
            throw std::invalid_argument("EsnConfig: transient must be non-negative");
        if (train_len < n_reservoir)
            throw std::invalid_argument("EsnConfig: train_len must be >= n_reservoir for a well-posed readout");
    }
};

/// Fixed random matrices: w_in is N x (N_u + 1) with the bias column first,
/// w is the N x N internal matrix scaled to the requested spectral radius.
struct EsnWeights {
    Eigen::MatrixXd w_in;
    Eigen::MatrixXd w;
};

struct EsnState {
    Eigen::VectorXd r;
    std::int64_t clock = 0;  ///< number of inputs consumed so far
};

struct TrainedEsn {
    EsnConfig config;
    EsnWeights weights;
    Eigen::MatrixXd w_out;   ///< N_d x N readout
    EsnState state;          ///< state where training left off
};

/// Raised when the collected trajectory carries no usable signal
/// (zero leakage or a dead reservoir).
class UntrainableError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Largest eigenvalue modulus. Dense nonsymmetric eigendecomposition: exact
/// for the sizes used here, and immune to the stalling power iteration
/// suffers on dominant complex-conjugate pairs.
inline double spectral_radius(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("spectral_radius: matrix must be square");
    if (!m.allFinite())
        throw std::invalid_argument("spectral_radius: matrix has non-finite entries");
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("spectral_radius: eigen-solver failed to converge");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

namespace detail {

inline void fill_uniform(Eigen::MatrixXd& m, rng::Engine& eng, double scale) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            m(r, c) = scale * rng::uniform(eng, -1.0, 1.0);
}

/// Shared state-update kernel: r <- (1-a) r + a tanh(w_in [1 u]^T + w r).
/// Every code path that advances the state routes through this function so
/// replayed sequences are bit-identical.
inline void step(Eigen::VectorXd& r, Eigen::VectorXd& scratch, const EsnWeights& weights,
                 const Eigen::Ref<const Eigen::VectorXd>& u, double leakage) {
    const Eigen::Index n_in = weights.w_in.cols() - 1;
    scratch = weights.w_in.col(0);
    scratch.noalias() += weights.w_in.rightCols(n_in) * u;
    scratch.noalias() += weights.w * r;
    r.array() = (1.0 - leakage) * r.array() + leakage * scratch.array().tanh();
}

} // namespace detail

/// Samples w_in uniformly (bias column in [-p, p], signal columns in [-q, q])
/// and the internal matrix as lambda * w_aux / rho(w_aux) with w_aux uniform
/// in [-1, 1]. The base uniforms are drawn first and scaled afterwards, so a
/// fixed seed yields the same underlying sample for any (lambda, p, q).
inline EsnWeights init_weights(const EsnConfig& config) {
    config.validate();
    rng::Engine eng(config.seed);

    EsnWeights weights;
    weights.w_in.resize(config.n_reservoir, config.n_inputs + 1);
    detail::fill_uniform(weights.w_in, eng, 1.0);
    weights.w_in.col(0) *= config.bias_scale;
    weights.w_in.rightCols(config.n_inputs) *= config.input_scale;

    Eigen::MatrixXd w_aux(config.n_reservoir, config.n_reservoir);
    for (int attempt = 0; attempt < 2; ++attempt) {
        detail::fill_uniform(w_aux, eng, 1.0);
        const double rho = spectral_radius(w_aux);
        if (rho > 0.0) {
            weights.w = (config.spectral_radius / rho) * w_aux;
            return weights;
        }
    }
    throw std::runtime_error("init_weights: auxiliary matrix has zero spectral radius after resampling");
}

/// One leaky-integrator update; pure, dimension-checked. Hot loops use the
/// same kernel via collect_trajectory/run.
inline EsnState update_state(const EsnState& state, const EsnWeights& weights,
                             const Eigen::Ref<const Eigen::VectorXd>& u, double leakage) {
    if (weights.w.rows() != weights.w.cols() || weights.w.rows() != weights.w_in.rows())
        throw std::invalid_argument("update_state: inconsistent weight dimensions");
    if (state.r.size() != weights.w.rows())
        throw std::invalid_argument("update_state: state dimension does not match weights");
    if (u.size() != weights.w_in.cols() - 1)
        throw std::invalid_argument("update_state: input dimension does not match w_in");
    if (!(leakage >= 0.0 && leakage <= 1.0))
        throw std::invalid_argument("update_state: leakage must lie in [0, 1]");

    EsnState next;
    next.r = state.r;
    Eigen::VectorXd scratch(state.r.size());
    detail::step(next.r, scratch, weights, u, leakage);
    next.clock = state.clock + 1;
    return next;
}

/// Runs the reservoir from the zero state over inputs (one column per time
/// step): config.transient warm-up columns are consumed and discarded, the
/// states after each of the next config.train_len inputs become the columns
/// of the returned N x L trajectory matrix. end_state, when given, receives
/// the state after the last collected column.
inline Eigen::MatrixXd collect_trajectory(const EsnWeights& weights, const EsnConfig& config,
                                          const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                                          EsnState* end_state = nullptr) {
    config.validate();
    if (inputs.rows() != config.n_inputs)
        throw std::invalid_argument("collect_trajectory: input row count does not match n_inputs");
    const Eigen::Index needed = static_cast<Eigen::Index>(config.transient) + config.train_len;
    if (inputs.cols() < needed)
        throw std::invalid_argument("collect_trajectory: input shorter than transient + train_len");

    Eigen::VectorXd r = Eigen::VectorXd::Zero(config.n_reservoir);
    Eigen::VectorXd scratch(config.n_reservoir);
    Eigen::MatrixXd trajectory(config.n_reservoir, config.train_len);

    Eigen::Index n = 0;
    for (; n < config.transient; ++n)
        detail::step(r, scratch, weights, inputs.col(n), config.leakage);
    for (Eigen::Index col = 0; col < config.train_len; ++col, ++n) {
        detail::step(r, scratch, weights, inputs.col(n), config.leakage);
        trajectory.col(col) = r;
    }

    if (end_state) {
        end_state->r = std::move(r);
        end_state->clock = needed;
    }
    return trajectory;
}

/// Minimum-norm least-squares readout W_out = D T^+, computed through an SVD
/// of the trajectory. Singular values below max(N, L) * eps * sigma_max are
/// treated as zero.
inline Eigen::MatrixXd train_readout(const Eigen::Ref<const Eigen::MatrixXd>& trajectory,
                                     const Eigen::Ref<const Eigen::MatrixXd>& desired) {
    if (trajectory.cols() != desired.cols())
        throw std::invalid_argument("train_readout: trajectory and desired column counts differ");
    if (trajectory.size() == 0 || desired.rows() < 1)
        throw std::invalid_argument("train_readout: empty trajectory or desired matrix");
    if (trajectory.cwiseAbs().maxCoeff() < 1e-12)
        throw UntrainableError("train_readout: trajectory is numerically zero (zero leakage or dead reservoir)");

    Eigen::BDCSVD<Eigen::MatrixXd> svd(trajectory.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(static_cast<double>(std::max(trajectory.rows(), trajectory.cols())) *
                     std::numeric_limits<double>::epsilon());
    return svd.solve(desired.transpose()).transpose();
}

/// Builds weights from the config, collects the trajectory over the first
/// transient + train_len input columns, and solves the readout against the
/// aligned desired columns: the target for the state reached after consuming
/// input column n is desired column n (denoising alignment, not prediction).
inline TrainedEsn train(const EsnConfig& config, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                        const Eigen::Ref<const Eigen::MatrixXd>& desired) {
    config.validate();
    if (desired.rows() != config.n_outputs)
        throw std::invalid_argument("train: desired row count does not match n_outputs");
    const Eigen::Index needed = static_cast<Eigen::Index>(config.transient) + config.train_len;
    if (desired.cols() < needed)
        throw std::invalid_argument("train: desired shorter than transient + train_len");

    TrainedEsn net;
    net.config = config;
    net.weights = init_weights(config);
    net.w_out = Eigen::MatrixXd::Zero(config.n_outputs, config.n_reservoir);

    Eigen::MatrixXd trajectory = collect_trajectory(net.weights, config, inputs, &net.state);
    net.w_out = train_readout(trajectory, desired.middleCols(config.transient, config.train_len));
    return net;
}

/// Advances a copy of start through the inputs, emitting y = W_out r after
/// each step. Output is N_d x inputs.cols(); end_state, when given, receives
/// the final state.
inline Eigen::MatrixXd run_from(const TrainedEsn& net, const EsnState& start,
                                const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                                EsnState* end_state = nullptr) {
    if (inputs.rows() != net.config.n_inputs)
        throw std::invalid_argument("run: input row count does not match n_inputs");
    if (start.r.size() != net.config.n_reservoir)
        throw std::invalid_argument("run: state dimension does not match the network");
    if (net.w_out.rows() != net.config.n_outputs || net.w_out.cols() != net.config.n_reservoir)
        throw std::invalid_argument("run: readout dimensions do not match the network");

    Eigen::VectorXd r = start.r;
    Eigen::VectorXd scratch(net.config.n_reservoir);
    Eigen::MatrixXd outputs(net.config.n_outputs, inputs.cols());
    for (Eigen::Index n = 0; n < inputs.cols(); ++n) {
        detail::step(r, scratch, net.weights, inputs.col(n), net.config.leakage);
        outputs.col(n).noalias() = net.w_out * r;
    }
    if (end_state) {
        end_state->r = std::move(r);
        end_state->clock = start.clock + inputs.cols();
    }
    return outputs;
}

/// Continues from the state training left behind; the evaluation stream is
/// expected to be the continuation of the training stream.
inline Eigen::MatrixXd run(const TrainedEsn& net, const Eigen::Ref<const Eigen::MatrixXd>& inputs) {
    return run_from(net, net.state, inputs);
}

} // namespace esnd::esn
