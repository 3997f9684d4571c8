#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sdce/mimo_core.hpp"
#include "sdce/policy.hpp"
#include "sdce/symbols.hpp"

namespace sdce {

enum class EstimatorKind { pcsi, pilot_ce, semi_opt, semi_pro_opt, semi_pro_low, semi_all };

EstimatorKind parse_estimator(const std::string& name);
std::string to_string(EstimatorKind kind);
std::vector<EstimatorKind> all_estimators();

struct ExperimentConfig {
    int n_tx = 2;
    int n_rx = 4;
    int t_p = 4;
    int t_u = 200;
    /// 0 means t_d = t_u.
    int t_d = 0;
    ConstellationKind constellation = ConstellationKind::qam4;
    std::vector<double> ebn0_db_list{0.0};
    std::vector<EstimatorKind> estimators = all_estimators();
    PolicyParams policy;
    int trials = 100;
    ChannelMode channel_mode = ChannelMode::block;
    double epsilon = 0.0;
    bool evolve_during_pilots = true;
    std::uint64_t master_seed = 1;
    int threads = 1;

    int data_slots() const { return t_d == 0 ? t_u : t_d; }
    void validate() const;
    FrameConfig frame_config(double noise_variance) const;
};

/// Parses one `key = value` entry into the config. Lists are comma separated.
void apply_config_entry(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Flat key-value file: one `key = value` per line, `#` starts a comment.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

struct ResultRecord {
    std::string estimator;
    double ebn0_db = 0.0;
    double nmse_mean = 0.0;
    double nmse_stderr = 0.0;
    double sve_rate_initial = 0.0;
    double sve_rate_final = 0.0;
    double selected_fraction = 0.0;
    double selection_precision = 0.0;
    int trials = 0;
};

/// sigma2 = 1 / (log2|X| 10^(ebn0_db / 10)).
double ebn0_to_sigma2(double ebn0_db, ConstellationKind constellation);

/// |H^ - H|_F^2 / |H|_F^2.
double nmse(const ComplexMatrix& h_hat, const ComplexMatrix& h);

/// Outcome of one estimator on one frame.
struct TrialMetrics {
    double nmse = 0.0;
    int initial_errors = 0;
    int final_errors = 0;
    int selected = 0;
    int correct_selected = 0;
    /// Errors on the unselected slots before and after re-detection.
    int unselected_errors_before = 0;
    int unselected_errors_after = 0;
};

/// Runs one estimator on one frame. The frame's ground truth is used only to
/// score the outcome and by the genie-aided semi_opt baseline.
TrialMetrics evaluate_estimator(EstimatorKind kind, const FrameRealization& frame, const SymbolBook& book,
                                const PolicyParams& policy, const StreamKey& stream_key);

using ProgressSink = std::function<void(const ResultRecord&)>;

/// Per-trial metrics for every (SNR point, estimator), laid out as
/// [point][estimator][trial]. Independent of the thread count.
std::vector<std::vector<std::vector<TrialMetrics>>> run_trials(const ExperimentConfig& config);

std::vector<ResultRecord> run_experiment(const ExperimentConfig& config, const ProgressSink& progress = {});

enum class SweepKind { snr, pilot, tu, depth, doppler };

SweepKind parse_sweep(const std::string& name);

/// Runs the experiment once per value of the swept parameter. For every sweep
/// except snr the value is appended to the estimator label, e.g.
/// `semi_pro_low[t_p=8]`.
std::vector<ResultRecord> run_sweep(const ExperimentConfig& config, SweepKind kind, const std::vector<double>& values,
                                    const ProgressSink& progress = {});

enum class OutputFormat { csv, json };

OutputFormat parse_format(const std::string& name);

std::string format_number(double value);
std::string format_csv(const std::vector<ResultRecord>& records);
std::string format_json(const std::vector<ResultRecord>& records);
void emit_results(const std::vector<ResultRecord>& records, OutputFormat format, const std::string& path);

}  // namespace sdce
