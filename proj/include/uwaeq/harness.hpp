#pragma once

#include "uwaeq/equalizers.hpp"
#include "uwaeq/udnet.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace uwaeq {

struct ChannelConfig {
    std::string id = "synthetic";
    SynthCirParams synth;
    std::size_t cir_count = 200;
    std::size_t cir_length = 1000;  // samples per synthetic CIR; windows are drawn inside
    std::vector<std::filesystem::path> files;  // when nonempty, replaces the synthetic pool
    bool quasi_static = false;
};

struct ExperimentConfig {
    OfdmConfig ofdm;
    ChannelConfig channel;
    double split_fraction = 0.75;
    std::vector<double> snr_list_db{10, 15, 20, 25, 30, 35};
    std::vector<std::string> equalizers{"zf", "mmse", "dfe"};
    std::size_t block_size = 16;
    double csi_sigma = 0.0;
    std::optional<double> clipping;
    NoiseSpec noise;
    std::size_t trials_per_point = 1000;  // OFDM symbols per point (minimum when min_errors > 0)
    std::size_t min_errors = 0;           // keep adding trials until every method has this many errors
    std::size_t max_trials = 100000;
    std::uint64_t seed = 1;

    std::size_t layers = 6;
    std::size_t hidden_dim = 0;  // 0 selects 8 * block_size
    TrainConfig train;
    std::filesystem::path model_path;

    std::size_t resolved_hidden_dim() const { return hidden_dim ? hidden_dim : kDefaultHiddenPerSymbol * block_size; }
    void validate() const;
};

// Flat "section.key" assignment; the same keys are accepted in config files
// ([section] headers, key = value) and as command-line overrides.
void set_option(ExperimentConfig& cfg, const std::string& key, const std::string& value);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

bool is_known_method(const std::string& name);

struct CirPool {
    std::vector<Cir> train;
    std::vector<Cir> test;
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
};

// Synthesizes or loads the CIRs and splits them with a seeded shuffle.
CirPool build_cir_pool(const ExperimentConfig& cfg);

// Writes every CIR as UCIR1 plus manifest.json; returns the manifest.
nlohmann::json gen_dataset(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
// Reads a manifest written by gen_dataset.
CirPool load_dataset(const std::filesystem::path& manifest_path);

struct SweepRow {
    std::string method;
    std::string channel_id;
    double snr_db = 0.0;
    double csi_sigma = 0.0;
    bool clipped = false;
    std::string noise_kind;
    std::size_t symbols_tested = 0;
    std::size_t symbol_errors = 0;
    double ser = 0.0;
    double wall_time_per_symbol = 0.0;  // seconds per data symbol, equalization only
};

struct SweepResult {
    std::vector<SweepRow> rows;
};

// Every (method, SNR) point sees the same channel, symbol, noise and CSI draws
// for a given trial index; noise draws are rescaled per SNR.
SweepResult run_sweep(const ExperimentConfig& cfg, const std::vector<Cir>& test_cirs, const UdnetModel* model);

UdnetModel train_model(const ExperimentConfig& cfg, const std::vector<Cir>& train_cirs, TrainResult* history = nullptr);

// Worker count from UWA_EQ_THREADS (unset or 0: hardware concurrency).
std::size_t worker_count();

void emit_csv(const SweepResult& result, const std::filesystem::path& path);
SweepResult read_csv(const std::filesystem::path& path);
void emit_plot_script(const SweepResult& result, const std::filesystem::path& csv_path,
                      const std::filesystem::path& script_path);

struct TimingRow {
    std::string method;
    std::size_t n_subcarriers = 0;
    std::size_t repetitions = 0;
    double median_seconds_per_ofdm_symbol = 0.0;
    double median_seconds_per_symbol = 0.0;
};

// Median equalization time per symbol; repeats whole OFDM symbols until at
// least min_symbols data symbols and min_repetitions runs have been timed.
std::vector<TimingRow> run_timing(const ExperimentConfig& cfg, const std::vector<std::size_t>& subcarriers,
                                  const std::vector<std::string>& methods, const UdnetModel* model,
                                  std::size_t min_symbols = 1000, std::size_t min_repetitions = 3);

std::string format_band_stats(const BandStats& stats);

}  // namespace uwaeq
