// Command-line front end: orbit generation, AWGN corruption, ESN training and
// denoising, Wiener baseline, hyperparameter tuning, and the full gain sweep.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "esnd/chaos.hpp"
#include "esnd/experiment.hpp"
#include "esnd/model_io.hpp"
#include "esnd/noise.hpp"
#include "esnd/pipeline.hpp"
#include "esnd/signal_io.hpp"
#include "esnd/tuning.hpp"
#include "esnd/version.hpp"
#include "esnd/wiener.hpp"

namespace {

namespace fs = std::filesystem;

Eigen::Map<const Eigen::MatrixXd> as_row(const std::vector<double>& v) {
    return {v.data(), 1, static_cast<Eigen::Index>(v.size())};
}

int cmd_generate(double alpha, double d0, std::size_t length, const fs::path& out) {
    const esnd::chaos::Orbit orbit = esnd::chaos::generate_orbit({alpha, d0}, length);
    esnd::io::write_signal(out, orbit.samples);
    std::cout << "wrote " << length << " samples to " << out.string() << '\n';
    return 0;
}

int cmd_corrupt(const fs::path& in, double snr_db, std::uint64_t seed, const fs::path& out) {
    const std::vector<double> d = esnd::io::read_signal(in);
    const esnd::noise::CorruptedSignal corrupted = esnd::noise::corrupt(d, {snr_db, seed});
    esnd::io::write_signal(out, corrupted.u);
    std::cout << "requested SNR " << snr_db << " dB, realized "
              << esnd::io::format_double(corrupted.realized_snr_db) << " dB\n";
    return 0;
}

int cmd_train(const fs::path& config_path, const fs::path& in, const fs::path& desired,
              const fs::path& out) {
    nlohmann::json j;
    {
        std::ifstream f(config_path);
        if (!f)
            throw std::runtime_error("cannot open config " + config_path.string());
        f >> j;
    }
    const esnd::esn::EsnConfig config = esnd::io::esn_config_from_json(j);
    const std::vector<double> u = esnd::io::read_signal(in);
    const std::vector<double> d = esnd::io::read_signal(desired);
    if (u.size() != d.size())
        throw std::runtime_error("input and desired signals have different lengths");

    const esnd::esn::TrainedEsn net = esnd::esn::train(config, as_row(u), as_row(d));
    esnd::io::save_model(out, net);
    std::cout << "trained reservoir of " << config.n_reservoir << " nodes on " << config.train_len
              << " samples (transient " << config.transient << "), model in " << out.string() << '\n';
    return 0;
}

int cmd_denoise(const fs::path& model_path, const fs::path& in, const fs::path& out) {
    const esnd::esn::TrainedEsn net = esnd::io::load_model(model_path);
    const std::vector<double> u = esnd::io::read_signal(in);
    const Eigen::MatrixXd y = esnd::esn::run(net, as_row(u));
    esnd::io::write_signal(out, std::span<const double>(y.data(), static_cast<std::size_t>(y.cols())));
    std::cout << "denoised " << u.size() << " samples into " << out.string() << '\n';
    return 0;
}

int cmd_wiener(const fs::path& in, const fs::path& desired, int taps, int delay,
               const fs::path& out, const fs::path& dump_taps) {
    const std::vector<double> u = esnd::io::read_signal(in);
    const std::vector<double> d = esnd::io::read_signal(desired);
    if (u.size() != d.size())
        throw std::runtime_error("input and desired signals have different lengths");

    const esnd::wiener::Correlations corr = esnd::wiener::estimate_correlations(u, d, taps, delay);
    const esnd::wiener::WienerFilter filter = esnd::wiener::design(corr.autocorr, corr.crosscorr);
    const std::vector<double> y = esnd::wiener::apply(filter, u);
    esnd::io::write_signal(out, y);
    if (!dump_taps.empty())
        esnd::io::write_signal(dump_taps,
                               std::span<const double>(filter.taps.data(),
                                                       static_cast<std::size_t>(filter.taps.size())));
    std::cout << "designed " << taps << "-tap filter, filtered output in " << out.string() << '\n';
    return 0;
}

int cmd_tune(double alpha, double snr_db, std::uint64_t seed, const fs::path& out,
             esnd::esn::EsnConfig base, std::size_t eval_len, std::size_t tune_eval_len,
             const std::string& order_str, int max_cycles, int workers) {
    std::array<esnd::tuning::Coord, 4> order{};
    if (order_str.size() != 4)
        throw std::runtime_error("order must be a permutation of \"alpq\"");
    for (std::size_t i = 0; i < 4; ++i) {
        switch (order_str[i]) {
            case 'a': order[i] = esnd::tuning::Coord::Leakage; break;
            case 'l': order[i] = esnd::tuning::Coord::SpectralRadius; break;
            case 'p': order[i] = esnd::tuning::Coord::BiasScale; break;
            case 'q': order[i] = esnd::tuning::Coord::InputScale; break;
            default: throw std::runtime_error("order must be a permutation of \"alpq\"");
        }
    }

    esnd::tuning::TuneScenario scenario;
    scenario.alpha = alpha;
    scenario.snr_in_db = snr_db;
    scenario.base = base;
    scenario.eval_len = tune_eval_len;
    scenario.seed = seed;

    std::ofstream trace(out);
    if (!trace)
        throw std::runtime_error("cannot open " + out.string());
    trace << "cycle,coord,a,lambda,p,q,gain_db\n";
    auto logger = [&trace](int cycle, esnd::tuning::Coord coord, double a, double lambda, double p,
                           double q, double gain) {
        trace << cycle << ',' << esnd::tuning::coord_letter(coord) << ','
              << esnd::io::format_double(a) << ',' << esnd::io::format_double(lambda) << ','
              << esnd::io::format_double(p) << ',' << esnd::io::format_double(q) << ','
              << esnd::io::format_double(gain) << '\n';
    };

    const esnd::tuning::TuneGrid grid = esnd::tuning::TuneGrid::standard();
    esnd::tuning::TuneResult result =
        esnd::tuning::coordinate_descent(grid, scenario, order, max_cycles, workers, logger);

    double final_gain = result.gain_db;
    if (eval_len != tune_eval_len) {
        // re-validate the selected parameters on the full evaluation window
        esnd::tuning::TuneScenario full = scenario;
        full.eval_len = eval_len;
        final_gain = esnd::tuning::evaluate_cell(result.a, result.lambda, result.p, result.q, full);
    }

    trace << "final,star," << esnd::io::format_double(result.a) << ','
          << esnd::io::format_double(result.lambda) << ',' << esnd::io::format_double(result.p)
          << ',' << esnd::io::format_double(result.q) << ',' << esnd::io::format_double(final_gain)
          << '\n';

    std::cout << (result.trace.converged ? "converged" : "iteration cap reached") << " after "
              << result.trace.cycles << " cycles (" << result.trace.scans << " scans)\n"
              << "a=" << result.a << " lambda=" << result.lambda << " p=" << result.p
              << " q=" << result.q << " gain=" << esnd::io::format_double(final_gain) << " dB\n";
    return result.trace.converged ? 0 : 2;
}

int cmd_sweep(const fs::path& config_path, const fs::path& out_dir, bool quick, int workers) {
    esnd::experiment::SweepConfig config = esnd::experiment::SweepConfig::defaults();
    if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f)
            throw std::runtime_error("cannot open config " + config_path.string());
        nlohmann::json j;
        f >> j;
        config = esnd::experiment::sweep_config_from_json(j);
    }
    if (quick)
        config.apply_quick();

    const esnd::experiment::SweepResult result = esnd::experiment::run_sweep(config, out_dir, workers);
    std::cout << result.rows.size() << " rows (" << result.cells_from_checkpoint
              << " cells resumed), " << esnd::io::format_double(result.elapsed_seconds)
              << " s, results in " << out_dir.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chaotic-signal denoising with an echo state network and a Wiener baseline"};
    app.set_version_flag("--version", esnd::kVersion);
    app.require_subcommand(1);

    // generate
    double alpha = 0.1, d0 = 0.0;
    std::size_t length = 0;
    std::string out_file, in_file, desired_file;
    auto* generate = app.add_subcommand("generate", "Generate a skew tent map orbit");
    generate->add_option("--alpha", alpha, "Map parameter in (-1, 1)")->required();
    generate->add_option("--d0", d0, "Initial condition in (-1, 1)")->required();
    generate->add_option("--length", length, "Number of samples")->required();
    generate->add_option("--out", out_file, "Output signal file")->required();

    // corrupt
    double snr_db = 2.0;
    std::uint64_t seed = 0;
    auto* corrupt = app.add_subcommand("corrupt", "Add white Gaussian noise at a chosen SNR");
    corrupt->add_option("--in", in_file, "Clean signal file")->required();
    corrupt->add_option("--snr-db", snr_db, "Input SNR in dB (inf disables noise)")->required();
    corrupt->add_option("--seed", seed, "Noise RNG seed");
    corrupt->add_option("--out", out_file, "Output signal file")->required();

    // train
    std::string config_file, model_file;
    auto* train = app.add_subcommand("train", "Train an ESN denoiser");
    train->add_option("--config", config_file, "ESN config JSON")->required();
    train->add_option("--in", in_file, "Corrupted input signal")->required();
    train->add_option("--desired", desired_file, "Clean desired signal")->required();
    train->add_option("--out", model_file, "Output model file")->required();

    // denoise
    auto* denoise = app.add_subcommand("denoise", "Run a trained ESN over a signal");
    denoise->add_option("--model", model_file, "Model file from 'train'")->required();
    denoise->add_option("--in", in_file, "Input signal")->required();
    denoise->add_option("--out", out_file, "Output signal file")->required();

    // wiener
    int taps = 10, delay = 0;
    std::string taps_file;
    auto* wiener = app.add_subcommand("wiener", "Design and apply an FIR Wiener filter");
    wiener->add_option("--in", in_file, "Corrupted input signal")->required();
    wiener->add_option("--desired", desired_file, "Clean desired signal")->required();
    wiener->add_option("--taps", taps, "Number of FIR taps");
    wiener->add_option("--delay", delay, "Estimation delay in samples");
    wiener->add_option("--out", out_file, "Filtered output file")->required();
    wiener->add_option("--dump-taps", taps_file, "Write the designed taps to this file");

    // tune
    esnd::esn::EsnConfig tune_base;
    std::size_t tune_eval_len = 975000, full_eval_len = 975000;
    std::string order = "alpq";
    int max_cycles = 50, workers = 1;
    double tune_alpha = 0.1, tune_snr = 2.0;
    std::uint64_t tune_seed = 1;
    auto* tune = app.add_subcommand("tune", "Coordinate-descent selection of (a, lambda, p, q)");
    tune->add_option("--alpha", tune_alpha, "Scenario map parameter");
    tune->add_option("--snr-db", tune_snr, "Scenario input SNR in dB");
    tune->add_option("--seed", tune_seed, "Scenario seed");
    tune->add_option("--out", out_file, "Trace CSV (one row per evaluation plus a summary row)")->required();
    tune->add_option("--reservoir", tune_base.n_reservoir, "Reservoir size N");
    tune->add_option("--transient", tune_base.transient, "Warm-up samples");
    tune->add_option("--train-len", tune_base.train_len, "Training samples L");
    tune->add_option("--eval-len", full_eval_len, "Final validation window");
    tune->add_option("--tune-eval-len", tune_eval_len,
                     "Per-cell evaluation window during the search (shorten to cut cost; "
                     "the final parameters are re-validated at --eval-len)");
    tune->add_option("--order", order, "Coordinate order, a permutation of 'alpq'");
    tune->add_option("--max-cycles", max_cycles, "Cycle cap");
    tune->add_option("--workers", workers, "Parallel evaluations per scan");

    // sweep
    bool quick = false;
    auto* sweep = app.add_subcommand("sweep", "Gain-versus-alpha sweep for ESN and Wiener filter");
    sweep->add_option("--config", config_file, "Sweep config JSON (defaults used when omitted)");
    sweep->add_option("--out", out_file, "Output directory")->required();
    sweep->add_flag("--quick", quick, "Desk-scale profile (N=100, L=5000, eval 1e5)");
    sweep->add_option("--workers", workers, "Parallel (alpha, repetition) cells");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed())
            return cmd_generate(alpha, d0, length, out_file);
        if (corrupt->parsed())
            return cmd_corrupt(in_file, snr_db, seed, out_file);
        if (train->parsed())
            return cmd_train(config_file, in_file, desired_file, model_file);
        if (denoise->parsed())
            return cmd_denoise(model_file, in_file, out_file);
        if (wiener->parsed())
            return cmd_wiener(in_file, desired_file, taps, delay, out_file, taps_file);
        if (tune->parsed())
            return cmd_tune(tune_alpha, tune_snr, tune_seed, out_file, tune_base, full_eval_len,
                            tune_eval_len, order, max_cycles, workers);
        if (sweep->parsed())
            return cmd_sweep(config_file, out_file, quick, workers);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
