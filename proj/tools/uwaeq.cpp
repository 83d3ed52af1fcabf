// Command-line front end: dataset generation, training, sweeps, timing.

#include "uwaeq/harness.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iomanip>
#include <iostream>

using namespace uwaeq;

namespace {

struct Common {
    std::string config;
    std::vector<std::string> overrides;
    std::string dataset;
    std::string log_level = "info";
};

ExperimentConfig resolve(const Common& c) {
    ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_config(c.config);
    for (const auto& kv : c.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ParameterError("--set expects key=value, got '" + kv + "'");
        set_option(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.validate();
    spdlog::info("resolved config (seed {}): {}", cfg.seed, to_json(cfg).dump());
    return cfg;
}

CirPool pool_for(const Common& c, const ExperimentConfig& cfg) {
    if (!c.dataset.empty()) return load_dataset(c.dataset);
    return build_cir_pool(cfg);
}

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("-c,--config", c.config, "Config file ([section] key = value)")->check(CLI::ExistingFile);
    cmd->add_option("-s,--set", c.overrides, "Override a config key, e.g. --set sweep.trials=500");
    cmd->add_option("--log-level", c.log_level, "trace, debug, info, warn, error")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error"}));
}

void print_rows(const SweepResult& r) {
    std::cout << std::left << std::setw(10) << "method" << std::setw(8) << "snr" << std::setw(14) << "ser"
              << "errors/symbols\n";
    for (const auto& row : r.rows)
        std::cout << std::setw(10) << row.method << std::setw(8) << row.snr_db << std::setw(14) << row.ser
                  << row.symbol_errors << '/' << row.symbols_tested << '\n';
}

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Underwater acoustic OFDM equalization toolkit"};
    app.require_subcommand(1);

    Common common;

    std::string out_dir;
    auto* gen = app.add_subcommand("gen-dataset", "Write CIR files and a train/test manifest");
    add_common(gen, common);
    gen->add_option("-o,--out", out_dir, "Output directory")->required();

    std::string model_out, history_out;
    auto* tr = app.add_subcommand("train", "Train a UDNet model on the training CIRs");
    add_common(tr, common);
    tr->add_option("-d,--dataset", common.dataset, "Manifest from gen-dataset (default: synthesize)");
    tr->add_option("-o,--out", model_out, "Model checkpoint path")->required();
    tr->add_option("--history", history_out, "Write per-epoch loss and accuracy as CSV");

    std::string model_in, csv_out, plot_out;
    std::vector<double> snr_list;
    std::vector<std::string> methods;
    auto* ev = app.add_subcommand("evaluate", "SER of a trained model next to sliding MMSE");
    add_common(ev, common);
    ev->add_option("-d,--dataset", common.dataset, "Manifest from gen-dataset (default: synthesize)");
    ev->add_option("-m,--model", model_in, "Model checkpoint")->required()->check(CLI::ExistingFile);
    ev->add_option("-o,--out", csv_out, "CSV output");
    ev->add_option("--snr", snr_list, "SNR list in dB")->delimiter(',');

    auto* sw = app.add_subcommand("sweep", "SER sweep over SNR for several equalizers");
    add_common(sw, common);
    sw->add_option("-d,--dataset", common.dataset, "Manifest from gen-dataset (default: synthesize)");
    sw->add_option("-m,--model", model_in, "Model checkpoint, needed for the udnet method")->check(CLI::ExistingFile);
    sw->add_option("--snr", snr_list, "SNR list in dB")->delimiter(',');
    sw->add_option("--methods", methods, "zf, mmse, dfe, ml, zf-full, mmse-full, udnet")->delimiter(',');
    sw->add_option("-o,--out", csv_out, "CSV output")->required();
    sw->add_option("--plot", plot_out, "gnuplot script output (default: CSV path with .gp)");

    std::vector<std::size_t> sizes{512, 1024, 2048};
    std::size_t min_symbols = 1000;
    auto* tm = app.add_subcommand("timing", "Median equalization time per symbol versus N");
    add_common(tm, common);
    tm->add_option("--subcarriers", sizes, "Subcarrier counts")->delimiter(',');
    tm->add_option("--methods", methods, "Methods to time (default mmse-full,mmse,udnet)")->delimiter(',');
    tm->add_option("-m,--model", model_in, "Model checkpoint, needed for the udnet method")->check(CLI::ExistingFile);
    tm->add_option("--min-symbols", min_symbols, "Data symbols timed per point");
    tm->add_option("-o,--out", csv_out, "CSV output");

    std::string cir_file;
    std::size_t cir_index = 0, offset = 0;
    auto* ic = app.add_subcommand("inspect-channel", "Band-energy statistics of the frequency-domain channel matrix");
    add_common(ic, common);
    ic->add_option("--cir", cir_file, "UCIR1 or CSV response (default: synthetic pool)")->check(CLI::ExistingFile);
    ic->add_option("--index", cir_index, "Index into the synthetic pool");
    ic->add_option("--offset", offset, "First time sample of the analysed window");

    CLI11_PARSE(app, argc, argv);

    try {
        spdlog::set_level(spdlog::level::from_str(common.log_level));
        spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
        if (!snr_list.empty()) common.overrides.insert(common.overrides.begin(), "sweep.snr=" + [&] {
            std::string s;
            for (double v : snr_list) s += (s.empty() ? "" : ",") + std::to_string(v);
            return s;
        }());
        if (!methods.empty() && (sw->parsed())) common.overrides.insert(common.overrides.begin(), "sweep.methods=" + join(methods));

        if (gen->parsed()) {
            const auto cfg = resolve(common);
            const auto manifest = gen_dataset(cfg, out_dir);
            std::cout << manifest["train"].size() << " train / " << manifest["test"].size() << " test CIRs in "
                      << out_dir << '\n';
        } else if (tr->parsed()) {
            const auto cfg = resolve(common);
            const CirPool pool = pool_for(common, cfg);
            TrainResult history;
            const UdnetModel model = train_model(cfg, pool.train, &history);
            save_model(model, model_out);
            if (!history_out.empty()) {
                std::ofstream h(history_out);
                h << "epoch,loss,accuracy\n" << std::setprecision(17);
                for (std::size_t e = 0; e < history.epoch_loss.size(); ++e)
                    h << e << ',' << history.epoch_loss[e] << ',' << history.epoch_accuracy[e] << '\n';
                if (!h) throw Error("failed writing " + history_out);
            }
            std::cout << "saved " << model_out << " (M=" << model.layer_count() << ", B=" << model.block_size
                      << ", hidden=" << model.hidden_dim << ", final loss " << history.epoch_loss.back() << ")\n";
        } else if (ev->parsed()) {
            common.overrides.insert(common.overrides.begin(), "sweep.methods=udnet,mmse");
            const auto cfg = resolve(common);
            const UdnetModel model = load_model(model_in);
            const CirPool pool = pool_for(common, cfg);
            const auto result = run_sweep(cfg, pool.test, &model);
            print_rows(result);
            if (!csv_out.empty()) emit_csv(result, csv_out);
        } else if (sw->parsed()) {
            const auto cfg = resolve(common);
            std::optional<UdnetModel> model;
            if (!model_in.empty()) model = load_model(model_in);
            else if (!cfg.model_path.empty()) model = load_model(cfg.model_path);
            const CirPool pool = pool_for(common, cfg);
            const auto result = run_sweep(cfg, pool.test, model ? &*model : nullptr);
            emit_csv(result, csv_out);
            std::filesystem::path plot = plot_out.empty() ? std::filesystem::path(csv_out).replace_extension(".gp")
                                                          : std::filesystem::path(plot_out);
            emit_plot_script(result, csv_out, plot);
            print_rows(result);
            std::cout << "wrote " << csv_out << " and " << plot.string() << '\n';
        } else if (tm->parsed()) {
            const auto cfg = resolve(common);
            if (methods.empty()) methods = {"mmse-full", "mmse", "udnet"};
            std::optional<UdnetModel> model;
            if (!model_in.empty()) model = load_model(model_in);
            else if (!cfg.model_path.empty()) model = load_model(cfg.model_path);
            const auto rows = run_timing(cfg, sizes, methods, model ? &*model : nullptr, min_symbols);
            std::ostream* out = &std::cout;
            std::ofstream file;
            if (!csv_out.empty()) {
                file.open(csv_out);
                if (!file) throw Error("cannot write " + csv_out);
                out = &file;
            }
            *out << "method,n_subcarriers,repetitions,seconds_per_ofdm_symbol,seconds_per_symbol\n"
                 << std::setprecision(17);
            for (const auto& r : rows)
                *out << r.method << ',' << r.n_subcarriers << ',' << r.repetitions << ','
                     << r.median_seconds_per_ofdm_symbol << ',' << r.median_seconds_per_symbol << '\n';
        } else if (ic->parsed()) {
            const auto cfg = resolve(common);
            Cir cir = cir_file.empty() ? [&] {
                const CirPool pool = build_cir_pool(cfg);
                std::vector<Cir> all = pool.train;
                all.insert(all.end(), pool.test.begin(), pool.test.end());
                if (cir_index >= all.size())
                    throw ParameterError("--index " + std::to_string(cir_index) + " out of range (" +
                                         std::to_string(all.size()) + " CIRs)");
                return all[cir_index];
            }()
                                       : load_cir(cir_file);
            const std::size_t window = cfg.ofdm.n_subcarriers + cfg.ofdm.cp_len;
            if (offset + window > cir.sample_count())
                throw ParameterError("window [" + std::to_string(offset) + ", " + std::to_string(offset + window) +
                                     ") exceeds the " + std::to_string(cir.sample_count()) + "-sample response");
            const auto h = freq_matrix(cir.window(offset, window), cfg.ofdm);
            std::cout << "N = " << cfg.ofdm.n_subcarriers << ", block size " << cfg.block_size << '\n'
                      << format_band_stats(band_statistics(h, cfg.block_size));
        }
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
