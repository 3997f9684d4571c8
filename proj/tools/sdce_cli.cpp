// Command-line front end: Monte Carlo sweeps, a single traced frame, and the
// oracle selftest.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdce/experiment.hpp"
#include "sdce/selection.hpp"
#include "sdce/selftest.hpp"

namespace {

const std::vector<std::string> kConfigKeys = {
    "n_tx",     "n_rx",     "t_p",       "t_u",   "t_d",     "constellation", "ebn0_db",
    "estimators", "tree_depth", "n_sample", "eta_roll", "gamma", "channel_mode",  "epsilon",
    "evolve_during_pilots", "seed", "trials", "threads",
};

struct CommonOptions {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    std::map<std::string, std::string> overrides;
    std::map<std::string, CLI::Option*> handles;
};

void add_common(CLI::App* app, CommonOptions& opts)
{
    app->add_option("--config", opts.config_path, "key = value configuration file");
    app->add_option("--out", opts.out_path, "output path (stdout when omitted)");
    app->add_option("--format", opts.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    for (const auto& key : kConfigKeys) {
        opts.handles[key] = app->add_option("--" + key, opts.overrides[key], "overrides config key " + key);
    }
}

sdce::ExperimentConfig resolve_config(const CommonOptions& opts)
{
    sdce::ExperimentConfig config = opts.config_path.empty() ? sdce::ExperimentConfig{}
                                                              : sdce::load_config(opts.config_path);
    for (const auto& [key, option] : opts.handles) {
        if (option->count() > 0) {
            sdce::apply_config_entry(config, key, opts.overrides.at(key));
        }
    }
    config.validate();
    return config;
}

void write_output(const std::string& text, const std::string& path)
{
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    file << text;
}

std::vector<double> parse_values(const std::string& text)
{
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            values.push_back(std::stod(item));
        }
    }
    return values;
}

void log_cell(const sdce::ResultRecord& r)
{
    std::cerr << r.estimator << " ebn0=" << sdce::format_number(r.ebn0_db) << " nmse="
              << sdce::format_number(r.nmse_mean) << " +- " << sdce::format_number(r.nmse_stderr)
              << " sve=" << sdce::format_number(r.sve_rate_initial) << "->" << sdce::format_number(r.sve_rate_final)
              << " selected=" << sdce::format_number(r.selected_fraction) << '\n';
}

int run_sweep_command(const CommonOptions& opts, sdce::SweepKind kind, const std::string& values_text)
{
    const sdce::ExperimentConfig config = resolve_config(opts);
    std::cerr << "note: sve_rate_* are uncoded symbol-vector error rates over data slots 1..t_u (no channel code)\n";
    const auto records = sdce::run_sweep(config, kind, parse_values(values_text), log_cell);
    const auto format = sdce::parse_format(opts.format);
    if (opts.out_path.empty()) {
        std::cout << (format == sdce::OutputFormat::csv ? sdce::format_csv(records) : sdce::format_json(records));
    } else {
        sdce::emit_results(records, format, opts.out_path);
    }
    return 0;
}

int run_single_frame(const CommonOptions& opts, bool trace, const std::string& policy_name, std::uint64_t stream)
{
    const sdce::ExperimentConfig config = resolve_config(opts);
    const sdce::SymbolBook book =
        sdce::enumerate_symbol_vectors(sdce::make_constellation(config.constellation), config.n_tx);
    const double ebn0 = config.ebn0_db_list.front();
    const double sigma2 = sdce::ebn0_to_sigma2(ebn0, config.constellation);
    const sdce::StreamKey stream_key{config.master_seed, stream};
    const sdce::FrameRealization frame = sdce::generate_frame(config.frame_config(sigma2), book, stream_key);
    const sdce::SelectionContext ctx = sdce::prepare_context(frame, book);

    sdce::PolicyParams params = config.policy;
    params.kind = policy_name == "optimal" ? sdce::PolicyKind::optimal : sdce::PolicyKind::low_complexity;
    sdce::Rng rng = sdce::make_rng(stream_key, sdce::StreamPurpose::policy);
    sdce::SelectionOutcome outcome = sdce::run_selection(ctx, params, rng, trace);
    const auto final_detections = sdce::redetect_unselected(outcome, ctx);

    std::ostringstream out;
    for (const auto& rec : outcome.trace) {
        nlohmann::ordered_json line;
        line["slot"] = rec.slot;
        line["detected_index"] = rec.detected_index;
        line["correct"] = rec.detected_index == frame.tx_index(rec.slot);
        line["app"] = rec.reliability;
        line["action"] = rec.action;
        line["score"] = rec.score;
        line["depth"] = rec.depth;
        line["gram_refreshes"] = rec.gram_refreshes;
        out << line.dump() << '\n';
    }
    int errors_before = 0;
    int errors_after = 0;
    for (int n = 1; n <= ctx.t_u; ++n) {
        errors_before += ctx.detection(n).index != frame.tx_index(n);
        errors_after += final_detections[static_cast<std::size_t>(n - 1)].index != frame.tx_index(n);
    }
    const auto& reference = frame.channel_at(frame.t_u);
    nlohmann::ordered_json summary;
    summary["summary"] = true;
    summary["ebn0_db"] = ebn0;
    summary["policy"] = policy_name;
    summary["nmse_pilot"] = sdce::nmse(ctx.pilot_estimate, reference);
    summary["nmse_final"] = sdce::nmse(outcome.final_estimate.matrix, reference);
    summary["selected"] = outcome.selected_count();
    summary["t_u"] = ctx.t_u;
    summary["symbol_errors_initial"] = errors_before;
    summary["symbol_errors_final"] = errors_after;
    summary["gram_refresh_events"] = outcome.refresh_events.size();
    out << summary.dump() << '\n';
    write_output(out.str(), opts.out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Semi-data-aided MIMO channel estimation simulator"};
    app.require_subcommand(1);

    struct SweepCommand {
        std::string name;
        sdce::SweepKind kind;
        std::string help;
        CommonOptions opts;
        std::string values;
        CLI::App* app = nullptr;
    };
    std::vector<SweepCommand> sweeps;
    sweeps.push_back({"sweep-snr", sdce::SweepKind::snr, "vary Eb/N0 (dB)", {}, {}, nullptr});
    sweeps.push_back({"sweep-pilot", sdce::SweepKind::pilot, "vary the pilot length T_p", {}, {}, nullptr});
    sweeps.push_back({"sweep-tu", sdce::SweepKind::tu, "vary the selection block length T_u", {}, {}, nullptr});
    sweeps.push_back({"sweep-depth", sdce::SweepKind::depth, "vary the tree depth N", {}, {}, nullptr});
    sweeps.push_back({"sweep-doppler", sdce::SweepKind::doppler, "vary the Gauss-Markov epsilon", {}, {}, nullptr});
    for (auto& s : sweeps) {
        s.app = app.add_subcommand(s.name, s.help);
        add_common(s.app, s.opts);
        s.app->add_option("--values", s.values, "comma-separated values of the swept parameter");
    }

    CommonOptions single_opts;
    bool trace = false;
    std::string policy_name = "low_complexity";
    std::uint64_t stream = 0;
    auto* single = app.add_subcommand("single-frame", "run one frame and print its selection summary");
    add_common(single, single_opts);
    single->add_flag("--trace", trace, "emit one JSON record per slot");
    single->add_option("--policy", policy_name, "optimal or low_complexity")
        ->check(CLI::IsMember({"optimal", "low_complexity"}));
    single->add_option("--stream", stream, "trial stream index");

    sdce::SelftestOptions selftest_opts;
    auto* selftest = app.add_subcommand("selftest", "run the oracle-equivalence checks");
    selftest->add_option("--seed", selftest_opts.seed, "instance seed");

    CLI11_PARSE(app, argc, argv);

    try {
        for (auto& s : sweeps) {
            if (s.app->parsed()) {
                return run_sweep_command(s.opts, s.kind, s.values);
            }
        }
        if (single->parsed()) {
            return run_single_frame(single_opts, trace, policy_name, stream);
        }
        if (selftest->parsed()) {
            return sdce::run_selftest(std::cout, selftest_opts) ? 0 : 1;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 2;
    }
    return 0;
}
