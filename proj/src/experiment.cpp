#include "sdce/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sdce/estimator.hpp"
#include "sdce/mdp.hpp"
#include "sdce/selection.hpp"

namespace sdce {

EstimatorKind parse_estimator(const std::string& name)
{
    for (auto kind : all_estimators()) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    throw InvalidArgument("unknown estimator: " + name);
}

std::string to_string(EstimatorKind kind)
{
    switch (kind) {
    case EstimatorKind::pcsi: return "pcsi";
    case EstimatorKind::pilot_ce: return "pilot_ce";
    case EstimatorKind::semi_opt: return "semi_opt";
    case EstimatorKind::semi_pro_opt: return "semi_pro_opt";
    case EstimatorKind::semi_pro_low: return "semi_pro_low";
    case EstimatorKind::semi_all: return "semi_all";
    }
    return "unknown";
}

std::vector<EstimatorKind> all_estimators()
{
    return {EstimatorKind::pcsi,         EstimatorKind::pilot_ce,     EstimatorKind::semi_opt,
            EstimatorKind::semi_pro_opt, EstimatorKind::semi_pro_low, EstimatorKind::semi_all};
}

void ExperimentConfig::validate() const
{
    require(n_tx >= 1 && n_rx >= 1 && t_p >= 1 && t_u >= 1, "config: counts must be positive");
    require(t_d >= 0, "config: t_d must be nonnegative");
    require(t_u <= data_slots(), "config: t_u must not exceed t_d");
    require(trials >= 1, "config: trials must be at least 1");
    require(threads >= 1, "config: threads must be at least 1");
    require(!ebn0_db_list.empty(), "config: empty Eb/N0 list");
    require(!estimators.empty(), "config: empty estimator list");
    require(epsilon >= 0.0 && epsilon <= 1.0, "config: epsilon must lie in [0, 1]");
    policy.validate();
    frame_config(1.0).validate();
}

FrameConfig ExperimentConfig::frame_config(double noise_variance) const
{
    FrameConfig f;
    f.n_tx = n_tx;
    f.n_rx = n_rx;
    f.t_p = t_p;
    f.t_u = t_u;
    f.t_d = data_slots();
    f.noise_variance = noise_variance;
    f.channel_mode = channel_mode;
    f.epsilon = epsilon;
    f.evolve_during_pilots = evolve_during_pilots;
    return f;
}

double ebn0_to_sigma2(double ebn0_db, ConstellationKind constellation)
{
    require(std::isfinite(ebn0_db), "ebn0_to_sigma2: Eb/N0 must be finite");
    const double bits = make_constellation(constellation).bits_per_symbol;
    return 1.0 / (bits * std::pow(10.0, ebn0_db / 10.0));
}

double nmse(const ComplexMatrix& h_hat, const ComplexMatrix& h)
{
    require(h_hat.rows() == h.rows() && h_hat.cols() == h.cols(), "nmse: shape mismatch");
    const double reference = h.squaredNorm();
    require(reference > 0.0, "nmse: zero reference channel");
    return (h_hat - h).squaredNorm() / reference;
}

namespace {

int count_errors(const std::vector<Detection>& detections, const FrameRealization& frame)
{
    int errors = 0;
    for (int n = 1; n <= static_cast<int>(detections.size()); ++n) {
        errors += detections[static_cast<std::size_t>(n - 1)].index != frame.tx_index(n);
    }
    return errors;
}

const ComplexMatrix& nmse_reference(const FrameRealization& frame)
{
    return frame.channel_at(frame.t_u);
}

/// Fills the selection statistics, the final estimate metrics and the
/// re-detection counts for an estimator described by its selection mask.
TrialMetrics score_selection(SelectionOutcome& outcome, const SelectionContext& ctx, const FrameRealization& frame)
{
    TrialMetrics m;
    m.nmse = nmse(outcome.final_estimate.matrix, nmse_reference(frame));
    m.initial_errors = count_errors(ctx.detections, frame);
    const std::vector<Detection> final_detections = redetect_unselected(outcome, ctx);
    m.final_errors = count_errors(final_detections, frame);
    for (int n = 1; n <= ctx.t_u; ++n) {
        const auto i = static_cast<std::size_t>(n - 1);
        const bool correct_before = ctx.detections[i].index == frame.tx_index(n);
        if (outcome.selection_mask[i]) {
            ++m.selected;
            m.correct_selected += correct_before;
        } else {
            m.unselected_errors_before += !correct_before;
            m.unselected_errors_after += final_detections[i].index != frame.tx_index(n);
        }
    }
    return m;
}

TrialMetrics evaluate_with_context(EstimatorKind kind, const SelectionContext& ctx, const FrameRealization& frame,
                                   const SymbolBook& book, const PolicyParams& policy, const StreamKey& stream_key)
{
    switch (kind) {
    case EstimatorKind::pcsi:
    case EstimatorKind::pilot_ce: {
        const ComplexMatrix& estimate = kind == EstimatorKind::pcsi ? frame.channel_at(1) : ctx.pilot_estimate;
        TrialMetrics m;
        m.nmse = nmse(estimate, nmse_reference(frame));
        const CandidateProjection projection(estimate, book);
        for (int n = 1; n <= ctx.t_u; ++n) {
            const Detection d = map_detect(projection.app(ctx.y(n), ctx.sigma2), book);
            m.initial_errors += d.index != frame.tx_index(n);
        }
        m.final_errors = m.initial_errors;
        return m;
    }
    case EstimatorKind::semi_opt: {
        // Genie: keep exactly the correctly detected slots, with the true symbols.
        SelectionOutcome outcome;
        AugmentedBlocks blocks{ctx.pilot_observations, ctx.pilot_matrix, ctx.sigma2,
                               static_cast<int>(ctx.pilot_matrix.cols())};
        for (int n = 1; n <= ctx.t_u; ++n) {
            const bool keep = ctx.detection(n).index == frame.tx_index(n);
            outcome.selection_mask.push_back(keep ? 1 : 0);
            if (keep) {
                blocks.append(ctx.y(n), book.vector(frame.tx_index(n)));
            }
        }
        outcome.final_estimate = lmmse_augmented_estimate(blocks);
        return score_selection(outcome, ctx, frame);
    }
    case EstimatorKind::semi_all: {
        SelectionOutcome outcome;
        AugmentedBlocks blocks{ctx.pilot_observations, ctx.pilot_matrix, ctx.sigma2,
                               static_cast<int>(ctx.pilot_matrix.cols())};
        for (int n = 1; n <= ctx.t_u; ++n) {
            outcome.selection_mask.push_back(1);
            blocks.append(ctx.y(n), ctx.expected_at(n));
        }
        outcome.final_estimate = lmmse_augmented_estimate(blocks);
        return score_selection(outcome, ctx, frame);
    }
    case EstimatorKind::semi_pro_opt:
    case EstimatorKind::semi_pro_low: {
        PolicyParams params = policy;
        params.kind = kind == EstimatorKind::semi_pro_opt ? PolicyKind::optimal : PolicyKind::low_complexity;
        Rng rng = make_rng(stream_key, StreamPurpose::policy);
        SelectionOutcome outcome = run_selection(ctx, params, rng);
        return score_selection(outcome, ctx, frame);
    }
    }
    throw InvalidArgument("unknown estimator");
}

double stderr_of(const std::vector<double>& values, double mean)
{
    if (values.size() < 2) {
        return 0.0;
    }
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    const double n = static_cast<double>(values.size());
    return std::sqrt(ss / (n - 1.0) / n);
}

}  // namespace

TrialMetrics evaluate_estimator(EstimatorKind kind, const FrameRealization& frame, const SymbolBook& book,
                                const PolicyParams& policy, const StreamKey& stream_key)
{
    const SelectionContext ctx = prepare_context(frame, book);
    return evaluate_with_context(kind, ctx, frame, book, policy, stream_key);
}

std::vector<std::vector<std::vector<TrialMetrics>>> run_trials(const ExperimentConfig& config)
{
    config.validate();
    const SymbolBook book = enumerate_symbol_vectors(make_constellation(config.constellation), config.n_tx);
    const std::size_t points = config.ebn0_db_list.size();
    const std::size_t kinds = config.estimators.size();
    const auto trials = static_cast<std::size_t>(config.trials);

    std::vector<std::vector<std::vector<TrialMetrics>>> results(
        points, std::vector<std::vector<TrialMetrics>>(kinds, std::vector<TrialMetrics>(trials)));

    std::atomic<std::size_t> next{0};
    std::mutex failure_mutex;
    std::string failure;
    auto worker = [&]() {
        for (std::size_t trial = next++; trial < trials; trial = next++) {
            const StreamKey stream_key{config.master_seed, trial};
            try {
                for (std::size_t p = 0; p < points; ++p) {
                    const double sigma2 = ebn0_to_sigma2(config.ebn0_db_list[p], config.constellation);
                    const FrameRealization frame = generate_frame(config.frame_config(sigma2), book, stream_key);
                    const SelectionContext ctx = prepare_context(frame, book);
                    for (std::size_t e = 0; e < kinds; ++e) {
                        results[p][e][trial] =
                            evaluate_with_context(config.estimators[e], ctx, frame, book, config.policy, stream_key);
                    }
                }
            } catch (const std::exception& ex) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (failure.empty()) {
                    failure = "trial failed (seed " + std::to_string(stream_key.master_seed) + ", stream " +
                              std::to_string(stream_key.stream_id) + "): " + ex.what();
                }
                next = trials;
                return;
            }
        }
    };

    const auto thread_count = static_cast<std::size_t>(std::min<int>(config.threads, config.trials));
    if (thread_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < thread_count; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (!failure.empty()) {
        throw std::runtime_error(failure);
    }
    return results;
}

std::vector<ResultRecord> run_experiment(const ExperimentConfig& config, const ProgressSink& progress)
{
    const auto results = run_trials(config);
    std::vector<ResultRecord> records;
    const double slots = config.t_u;
    for (std::size_t p = 0; p < config.ebn0_db_list.size(); ++p) {
        for (std::size_t e = 0; e < config.estimators.size(); ++e) {
            const auto& cell = results[p][e];
            ResultRecord r;
            r.estimator = to_string(config.estimators[e]);
            r.ebn0_db = config.ebn0_db_list[p];
            r.trials = config.trials;
            std::vector<double> values;
            values.reserve(cell.size());
            double initial_errors = 0.0;
            double final_errors = 0.0;
            double selected = 0.0;
            double correct = 0.0;
            for (const auto& m : cell) {
                values.push_back(m.nmse);
                initial_errors += m.initial_errors;
                final_errors += m.final_errors;
                selected += m.selected;
                correct += m.correct_selected;
            }
            double sum = 0.0;
            for (double v : values) {
                sum += v;
            }
            const double n = static_cast<double>(cell.size());
            r.nmse_mean = sum / n;
            r.nmse_stderr = stderr_of(values, r.nmse_mean);
            r.sve_rate_initial = initial_errors / (n * slots);
            r.sve_rate_final = final_errors / (n * slots);
            r.selected_fraction = selected / (n * slots);
            r.selection_precision = selected > 0.0 ? correct / selected : 0.0;
            if (progress) {
                progress(r);
            }
            records.push_back(std::move(r));
        }
    }
    return records;
}

SweepKind parse_sweep(const std::string& name)
{
    if (name == "snr") return SweepKind::snr;
    if (name == "pilot") return SweepKind::pilot;
    if (name == "tu") return SweepKind::tu;
    if (name == "depth") return SweepKind::depth;
    if (name == "doppler") return SweepKind::doppler;
    throw InvalidArgument("unknown sweep: " + name);
}

std::vector<ResultRecord> run_sweep(const ExperimentConfig& config, SweepKind kind, const std::vector<double>& values,
                                    const ProgressSink& progress)
{
    if (kind == SweepKind::snr) {
        ExperimentConfig c = config;
        if (!values.empty()) {
            c.ebn0_db_list = values;
        }
        return run_experiment(c, progress);
    }
    require(!values.empty(), "sweep: no values given");
    std::vector<ResultRecord> out;
    for (double value : values) {
        ExperimentConfig c = config;
        std::string tag;
        const auto as_count = [&](const char* name) {
            const double rounded = std::round(value);
            require(rounded == value && rounded >= 0.0, std::string("sweep: ") + name + " values must be integers");
            tag = std::string(name) + "=" + std::to_string(static_cast<long long>(rounded));
            return static_cast<int>(rounded);
        };
        switch (kind) {
        case SweepKind::pilot: c.t_p = as_count("t_p"); break;
        case SweepKind::tu: c.t_u = as_count("t_u"); if (c.t_d != 0 && c.t_d < c.t_u) c.t_d = c.t_u; break;
        case SweepKind::depth: c.policy.tree_depth = as_count("tree_depth"); break;
        case SweepKind::doppler:
            c.channel_mode = ChannelMode::gauss_markov;
            c.epsilon = value;
            tag = "epsilon=" + format_number(value);
            break;
        case SweepKind::snr: break;
        }
        auto records = run_experiment(c, [&](const ResultRecord& r) {
            if (progress) {
                ResultRecord tagged = r;
                tagged.estimator += "[" + tag + "]";
                progress(tagged);
            }
        });
        for (auto& r : records) {
            r.estimator += "[" + tag + "]";
            out.push_back(std::move(r));
        }
    }
    return out;
}

OutputFormat parse_format(const std::string& name)
{
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    throw InvalidArgument("unknown output format: " + name);
}

std::string format_number(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

std::string format_csv(const std::vector<ResultRecord>& records)
{
    std::ostringstream out;
    out << "estimator,ebn0_db,nmse_mean,nmse_stderr,sve_rate_initial,sve_rate_final,selected_fraction,"
           "selection_precision,trials\n";
    for (const auto& r : records) {
        out << r.estimator << ',' << format_number(r.ebn0_db) << ',' << format_number(r.nmse_mean) << ','
            << format_number(r.nmse_stderr) << ',' << format_number(r.sve_rate_initial) << ','
            << format_number(r.sve_rate_final) << ',' << format_number(r.selected_fraction) << ','
            << format_number(r.selection_precision) << ',' << r.trials << '\n';
    }
    return out.str();
}

std::string format_json(const std::vector<ResultRecord>& records)
{
    // Round through the 9-digit text form so the emitted doubles carry
    // exactly the serialised precision.
    const auto rounded = [](double v) { return std::strtod(format_number(v).c_str(), nullptr); };
    nlohmann::ordered_json array = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        nlohmann::ordered_json o;
        o["estimator"] = r.estimator;
        o["ebn0_db"] = rounded(r.ebn0_db);
        o["nmse_mean"] = rounded(r.nmse_mean);
        o["nmse_stderr"] = rounded(r.nmse_stderr);
        o["sve_rate_initial"] = rounded(r.sve_rate_initial);
        o["sve_rate_final"] = rounded(r.sve_rate_final);
        o["selected_fraction"] = rounded(r.selected_fraction);
        o["selection_precision"] = rounded(r.selection_precision);
        o["trials"] = r.trials;
        array.push_back(std::move(o));
    }
    return array.dump(2) + "\n";
}

void emit_results(const std::vector<ResultRecord>& records, OutputFormat format, const std::string& path)
{
    require(!records.empty(), "emit_results: no records");
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw std::runtime_error("emit_results: cannot open " + path + " for writing");
    }
    file << (format == OutputFormat::csv ? format_csv(records) : format_json(records));
    if (!file) {
        throw std::runtime_error("emit_results: write to " + path + " failed");
    }
}

}  // namespace sdce
