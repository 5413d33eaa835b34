#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "esnd/metrics.hpp"
#include "esnd/model_io.hpp"
#include "esnd/pipeline.hpp"
#include "esnd/signal_io.hpp"
#include "esnd/version.hpp"

// Full gain-versus-alpha sweep: for every (alpha, repetition) cell, train and
// score the ESN and the Wiener baseline on one shared record, then aggregate
// across repetitions and emit plot-ready CSV files.

namespace esnd::experiment {

struct SweepConfig {
    std::vector<double> alpha_values;  ///< defaults to -0.95 .. 0.95 in 0.05 steps
    double snr_in_db = 2.0;
    int repetitions = 5;
    esn::EsnConfig esn;
    int wiener_taps = 10;
    std::size_t eval_len = 975000;
    std::uint64_t master_seed = 1;

    static SweepConfig defaults() {
        SweepConfig config;
        for (int i = -19; i <= 19; ++i)
            config.alpha_values.push_back(i * 0.05);
        return config;
    }

    /// Desk-scale profile for CI runs.
    void apply_quick() {
        esn.n_reservoir = 100;
        esn.train_len = 5000;
        eval_len = 100000;
    }

    void validate() const {
        if (alpha_values.empty())
            throw std::invalid_argument("SweepConfig: alpha_values must be non-empty");
        for (double a : alpha_values)
            if (!(a > -1.0 && a < 1.0))
                throw std::invalid_argument("SweepConfig: every alpha must lie inside (-1, 1)");
        if (repetitions < 1)
            throw std::invalid_argument("SweepConfig: repetitions must be >= 1");
        if (wiener_taps < 1)
            throw std::invalid_argument("SweepConfig: wiener_taps must be >= 1");
        if (eval_len < 1)
            throw std::invalid_argument("SweepConfig: eval_len must be >= 1");
        esn.validate();
    }
};

inline nlohmann::json sweep_config_to_json(const SweepConfig& c) {
    return {
        {"alpha_values", c.alpha_values},
        {"snr_in_db", c.snr_in_db},
        {"repetitions", c.repetitions},
        {"esn", io::esn_config_to_json(c.esn)},
        {"wiener_taps", c.wiener_taps},
        {"eval_len", c.eval_len},
        {"master_seed", c.master_seed},
    };
}

/// Keys are optional (defaults kept); unknown keys are rejected.
inline SweepConfig sweep_config_from_json(const nlohmann::json& j) {
    static const char* known[] = {"alpha_values", "snr_in_db", "repetitions", "esn",
                                  "wiener_taps", "eval_len", "master_seed"};
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok)
            throw std::runtime_error("sweep config: unknown key '" + key + "'");
    }
    SweepConfig c = SweepConfig::defaults();
    if (j.contains("alpha_values"))
        c.alpha_values = j["alpha_values"].get<std::vector<double>>();
    c.snr_in_db = j.value("snr_in_db", c.snr_in_db);
    c.repetitions = j.value("repetitions", c.repetitions);
    if (j.contains("esn"))
        c.esn = io::esn_config_from_json(j["esn"]);
    c.wiener_taps = j.value("wiener_taps", c.wiener_taps);
    c.eval_len = j.value("eval_len", c.eval_len);
    c.master_seed = j.value("master_seed", c.master_seed);
    return c;
}

inline constexpr const char* kMethodEsn = "esn";
inline constexpr const char* kMethodWiener = "wf";

/// One gains.csv row: a single method's outcome on one repetition.
struct GainRow {
    double alpha = 0.0;
    int rep = 0;
    std::string method;
    std::uint64_t seed = 0;   ///< per-cell base seed
    double snr_out_ref_db = 0.0;
    metrics::GainReport report;
};

struct CellSummary {
    double alpha = 0.0;
    std::string method;
    int repetitions = 0;
    double gain_mean_db = 0.0;
    double gain_std_db = 0.0;
};

/// Runs one (alpha, repetition) cell: both methods on the same record and
/// evaluation window. Aggregate fields of the reports stay zero here; they
/// are filled once the whole cell's repetitions exist.
inline std::vector<GainRow> run_cell_rep(double alpha, int rep, const SweepConfig& config) {
    config.validate();
    const pipeline::CellSeeds seeds = pipeline::derive_cell_seeds(config.master_seed, alpha, rep);
    const std::size_t total_len = static_cast<std::size_t>(config.esn.transient) +
                                  static_cast<std::size_t>(config.esn.train_len) + config.eval_len;

    pipeline::Scenario scenario;
    try {
        scenario = pipeline::make_scenario(alpha, config.snr_in_db, seeds, total_len);
    } catch (const std::exception& e) {
        throw std::runtime_error("cell alpha=" + std::to_string(alpha) + " rep=" + std::to_string(rep) +
                                 ": scenario generation failed: " + e.what());
    }

    auto make_row = [&](const char* method, const pipeline::DenoiseOutcome& outcome) {
        GainRow row;
        row.alpha = alpha;
        row.rep = rep;
        row.method = method;
        row.seed = seeds.base;
        row.snr_out_ref_db = outcome.snr_out_ref_db;
        row.report.alpha = alpha;
        row.report.snr_in_db = config.snr_in_db;
        row.report.snr_out_db = outcome.snr_out_db;
        row.report.gain_db = outcome.gain_db;
        row.report.eval_len = config.eval_len;
        return row;
    };

    std::vector<GainRow> rows;
    try {
        esn::EsnConfig cell_config = config.esn;
        cell_config.seed = seeds.weights;
        rows.push_back(make_row(kMethodEsn, pipeline::esn_denoise(cell_config, scenario, config.eval_len)));
    } catch (const std::exception& e) {
        throw std::runtime_error("cell alpha=" + std::to_string(alpha) + " rep=" + std::to_string(rep) +
                                 ": ESN stage failed: " + e.what());
    }
    try {
        rows.push_back(make_row(kMethodWiener,
                                pipeline::wiener_denoise(config.wiener_taps, scenario, config.esn.transient,
                                                         config.esn.train_len, config.eval_len)));
    } catch (const std::exception& e) {
        throw std::runtime_error("cell alpha=" + std::to_string(alpha) + " rep=" + std::to_string(rep) +
                                 ": Wiener stage failed: " + e.what());
    }
    return rows;
}

namespace detail {

/// Fills repetition statistics into every row of one alpha cell, per method.
inline void fill_aggregates(std::vector<GainRow>& rows) {
    for (const char* method : {kMethodEsn, kMethodWiener}) {
        std::vector<double> gains;
        for (const GainRow& row : rows)
            if (row.method == method)
                gains.push_back(row.report.gain_db);
        if (gains.empty())
            continue;
        const metrics::MeanStd stats = metrics::aggregate(gains);
        for (GainRow& row : rows) {
            if (row.method != method)
                continue;
            row.report.repetitions = static_cast<int>(gains.size());
            row.report.gain_mean_db = stats.mean;
            row.report.gain_std_db = stats.std;
        }
    }
}

} // namespace detail

/// All repetitions of one alpha value, aggregates filled.
inline std::vector<metrics::GainReport> run_cell(double alpha, const SweepConfig& config) {
    std::vector<GainRow> rows;
    for (int rep = 0; rep < config.repetitions; ++rep)
        for (GainRow& row : run_cell_rep(alpha, rep, config))
            rows.push_back(std::move(row));
    detail::fill_aggregates(rows);
    std::vector<metrics::GainReport> reports;
    reports.reserve(rows.size());
    for (const GainRow& row : rows)
        reports.push_back(row.report);
    return reports;
}

struct SweepResult {
    std::vector<GainRow> rows;          ///< sorted: alpha order, rep, esn before wf
    std::vector<CellSummary> summary;   ///< per (alpha, method)
    int cells_from_checkpoint = 0;
    double elapsed_seconds = 0.0;
};

namespace detail {

inline const char* kGainsHeader = "alpha,snr_in_db,method,rep,snr_out_db,gain_db,seed,snr_out_ref_db";

inline std::string format_row(const GainRow& row) {
    std::ostringstream os;
    os << io::format_double(row.alpha) << ',' << io::format_double(row.report.snr_in_db) << ','
       << row.method << ',' << row.rep << ',' << io::format_double(row.report.snr_out_db) << ','
       << io::format_double(row.report.gain_db) << ',' << row.seed << ','
       << io::format_double(row.snr_out_ref_db);
    return os.str();
}

inline bool parse_row(const std::string& line, GainRow* row) {
    std::istringstream is(line);
    std::string field;
    auto next = [&](std::string* out) {
        if (!std::getline(is, *out, ','))
            return false;
        return true;
    };
    std::string alpha, snr_in, method, rep, snr_out, gain, seed, snr_ref;
    if (!(next(&alpha) && next(&snr_in) && next(&method) && next(&rep) && next(&snr_out) &&
          next(&gain) && next(&seed) && next(&snr_ref)))
        return false;
    try {
        row->alpha = std::stod(alpha);
        row->report.alpha = row->alpha;
        row->report.snr_in_db = std::stod(snr_in);
        row->method = method;
        row->rep = std::stoi(rep);
        row->report.snr_out_db = std::stod(snr_out);
        row->report.gain_db = std::stod(gain);
        row->seed = std::stoull(seed);
        row->snr_out_ref_db = std::stod(snr_ref);
    } catch (const std::exception&) {
        return false;
    }
    return row->method == kMethodEsn || row->method == kMethodWiener;
}

} // namespace detail

/// Executes every (alpha, repetition) cell in a pool of workers and writes
/// gains.csv, summary.csv, manifest.json and plot.gp into out_dir.
///
/// Completed cells are appended to out_dir/checkpoint.csv as they finish;
/// re-running with the same output directory resumes from it (rows whose seed
/// does not match the current configuration are discarded). Each cell is
/// internally single threaded and seeded independently, so the result files
/// are byte-identical for a given master seed regardless of worker count.
inline SweepResult run_sweep(const SweepConfig& config, const std::filesystem::path& out_dir,
                             int workers = 1) {
    config.validate();
    std::filesystem::create_directories(out_dir);
    const auto t_start = std::chrono::steady_clock::now();

    struct Task {
        std::size_t alpha_index;
        int rep;
    };
    std::vector<Task> tasks;
    for (std::size_t ai = 0; ai < config.alpha_values.size(); ++ai)
        for (int rep = 0; rep < config.repetitions; ++rep)
            tasks.push_back({ai, rep});

    // cell key -> rows, keyed by (alpha index, rep)
    std::map<std::pair<std::size_t, int>, std::vector<GainRow>> done;

    const std::filesystem::path checkpoint_path = out_dir / "checkpoint.csv";
    int resumed = 0;
    if (std::filesystem::exists(checkpoint_path)) {
        std::ifstream in(checkpoint_path);
        std::string line;
        std::map<std::pair<std::size_t, int>, std::vector<GainRow>> loaded;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#' || line.rfind("alpha,", 0) == 0)
                continue;
            GainRow row;
            if (!detail::parse_row(line, &row))
                continue;
            for (std::size_t ai = 0; ai < config.alpha_values.size(); ++ai) {
                if (config.alpha_values[ai] != row.alpha || row.rep >= config.repetitions)
                    continue;
                const auto seeds = pipeline::derive_cell_seeds(config.master_seed, row.alpha, row.rep);
                if (seeds.base != row.seed)
                    continue;  // stale checkpoint from another configuration
                row.report.eval_len = config.eval_len;
                loaded[{ai, row.rep}].push_back(row);
            }
        }
        // a cell counts as done only when both method rows are present
        for (auto& [key, rows] : loaded) {
            if (rows.size() == 2 && rows[0].method != rows[1].method) {
                done[key] = std::move(rows);
                ++resumed;
            }
        }
    }

    std::ofstream checkpoint(checkpoint_path, std::ios::app);
    if (!checkpoint)
        throw std::runtime_error("run_sweep: cannot open " + checkpoint_path.string());

    std::vector<Task> pending;
    for (const Task& task : tasks)
        if (!done.count({task.alpha_index, task.rep}))
            pending.push_back(task);

    std::mutex sink_mutex;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < pending.size(); i = next.fetch_add(1)) {
            const Task task = pending[i];
            try {
                std::vector<GainRow> rows =
                    run_cell_rep(config.alpha_values[task.alpha_index], task.rep, config);
                std::lock_guard<std::mutex> lock(sink_mutex);
                for (const GainRow& row : rows)
                    checkpoint << detail::format_row(row) << '\n';
                checkpoint.flush();
                done[{task.alpha_index, task.rep}] = std::move(rows);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                return;
            }
        }
    };

    const int n_workers = std::clamp<int>(workers, 1, static_cast<int>(std::max<std::size_t>(pending.size(), 1)));
    if (n_workers <= 1 || pending.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_workers; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    SweepResult result;
    result.cells_from_checkpoint = resumed;

    // deterministic order: alpha index, repetition, esn before wf
    for (std::size_t ai = 0; ai < config.alpha_values.size(); ++ai) {
        std::vector<GainRow> alpha_rows;
        for (int rep = 0; rep < config.repetitions; ++rep) {
            auto it = done.find({ai, rep});
            if (it == done.end())
                throw std::runtime_error("run_sweep: missing cell result");
            std::vector<GainRow> rows = it->second;
            if (rows.size() == 2 && rows[0].method == kMethodWiener)
                std::swap(rows[0], rows[1]);
            for (GainRow& row : rows)
                alpha_rows.push_back(std::move(row));
        }
        detail::fill_aggregates(alpha_rows);
        for (const char* method : {kMethodEsn, kMethodWiener}) {
            for (const GainRow& row : alpha_rows) {
                if (row.method == method) {
                    result.summary.push_back({row.alpha, method, row.report.repetitions,
                                              row.report.gain_mean_db, row.report.gain_std_db});
                    break;
                }
            }
        }
        for (GainRow& row : alpha_rows)
            result.rows.push_back(std::move(row));
    }

    // gains.csv: header comment block records the full configuration
    {
        std::ofstream out(out_dir / "gains.csv");
        out << "# esn-denoise processing gains\n";
        out << "# version=" << kVersion << '\n';
        out << "# rng=" << rng::kAlgorithmTag << '\n';
        out << "# master_seed=" << config.master_seed << '\n';
        out << "# snr_in_db=" << io::format_double(config.snr_in_db) << '\n';
        out << "# repetitions=" << config.repetitions << '\n';
        out << "# wiener_taps=" << config.wiener_taps << '\n';
        out << "# eval_len=" << config.eval_len << '\n';
        out << "# esn.n_reservoir=" << config.esn.n_reservoir << '\n';
        out << "# esn.n_inputs=" << config.esn.n_inputs << '\n';
        out << "# esn.n_outputs=" << config.esn.n_outputs << '\n';
        out << "# esn.leakage=" << io::format_double(config.esn.leakage) << '\n';
        out << "# esn.spectral_radius=" << io::format_double(config.esn.spectral_radius) << '\n';
        out << "# esn.bias_scale=" << io::format_double(config.esn.bias_scale) << '\n';
        out << "# esn.input_scale=" << io::format_double(config.esn.input_scale) << '\n';
        out << "# esn.transient=" << config.esn.transient << '\n';
        out << "# esn.train_len=" << config.esn.train_len << '\n';
        out << "# alpha_values=";
        for (std::size_t i = 0; i < config.alpha_values.size(); ++i)
            out << (i ? "," : "") << io::format_double(config.alpha_values[i]);
        out << '\n';
        out << detail::kGainsHeader << '\n';
        for (const GainRow& row : result.rows)
            out << detail::format_row(row) << '\n';
        if (!out)
            throw std::runtime_error("run_sweep: failed writing gains.csv");
    }

    // summary.csv: per-alpha aggregate rows for both methods
    {
        std::ofstream out(out_dir / "summary.csv");
        out << "alpha,method,repetitions,gain_mean_db,gain_std_db\n";
        for (const CellSummary& s : result.summary)
            out << io::format_double(s.alpha) << ',' << s.method << ',' << s.repetitions << ','
                << io::format_double(s.gain_mean_db) << ',' << io::format_double(s.gain_std_db) << '\n';
        if (!out)
            throw std::runtime_error("run_sweep: failed writing summary.csv");
    }

    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    // manifest.json: seeds, versions, timings
    {
        nlohmann::json manifest;
        manifest["tool"] = "esn-denoise";
        manifest["version"] = kVersion;
        manifest["rng"] = rng::kAlgorithmTag;
        manifest["config"] = sweep_config_to_json(config);
        manifest["workers"] = n_workers;
        manifest["cells_total"] = tasks.size();
        manifest["cells_from_checkpoint"] = resumed;
        manifest["elapsed_seconds"] = result.elapsed_seconds;
        std::ofstream out(out_dir / "manifest.json");
        out << manifest.dump(1) << '\n';
    }

    // plot.gp: gnuplot script over summary.csv
    {
        std::ofstream out(out_dir / "plot.gp");
        out << "set datafile separator ','\n"
               "set xlabel 'alpha'\n"
               "set ylabel 'processing gain [dB]'\n"
               "set key top center\n"
               "plot \"< awk -F, '$2==\\\"esn\\\"' summary.csv\" using 1:4:5 with yerrorlines title 'ESN', \\\n"
               "     \"< awk -F, '$2==\\\"wf\\\"' summary.csv\" using 1:4:5 with yerrorlines title 'Wiener filter'\n";
    }

    return result;
}

} // namespace esnd::experiment
