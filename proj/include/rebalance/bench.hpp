#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <tuple>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "rebalance/common.hpp"
#include "rebalance/da_smote.hpp"
#include "rebalance/data.hpp"
#include "rebalance/deep_smote.hpp"
#include "rebalance/metrics.hpp"
#include "rebalance/nn.hpp"
#include "rebalance/samplers.hpp"
#include "rebalance/tree.hpp"

namespace rebalance::bench {

enum class Method { none, smote, borderline_smote, adasyn, gan, deep_smote, da_smote };

inline const std::vector<std::pair<Method, std::string>>& method_names() {
    static const std::vector<std::pair<Method, std::string>> table = {
        {Method::none, "none"},
        {Method::smote, "smote"},
        {Method::borderline_smote, "borderline_smote"},
        {Method::adasyn, "adasyn"},
        {Method::gan, "gan"},
        {Method::deep_smote, "deep_smote"},
        {Method::da_smote, "da_smote"},
    };
    return table;
}

inline std::string method_name(Method m) {
    for (const auto& [k, v] : method_names())
        if (k == m) return v;
    return "?";
}

inline Method method_from_string(const std::string& s) {
    for (const auto& [k, v] : method_names())
        if (v == s) return k;
    throw InputError("unknown method: " + s);
}

// Per-method hyperparameters for one dataset. Architecture defaults follow
// the per-dataset registry tables; unknown datasets get width heuristics
// scaled by the feature count.
struct MethodHyperparams {
    // classic samplers
    std::size_t k_neighbors = 5;
    std::size_t m_neighbors = 5;

    // deep smote regressor
    std::size_t deep_t_count = 2000;
    std::vector<std::size_t> deep_hidden = {32, 16};
    std::size_t deep_epochs = 100;
    std::size_t deep_batch_size = 32;
    double deep_learning_rate = 1e-3;
    bool deep_neighborhood_mode = false;

    // adversarial (da_smote and gan baseline)
    std::size_t adv_iterations = 2000;
    std::size_t adv_disc_steps_k = 1;
    std::size_t adv_minibatch_m = 32;
    double adv_gen_learning_rate = 2e-4;
    double adv_disc_learning_rate = 2e-4;
    da_smote::GenLossMode gen_loss_mode = da_smote::GenLossMode::non_saturating;
    std::vector<std::size_t> da_gen_widths;    // first = 2n, last = n
    std::vector<std::size_t> da_disc_widths;   // first = n, last = 1
    std::vector<std::size_t> gan_gen_widths;   // first = noise_dim, last = n
    std::vector<std::size_t> gan_disc_widths;  // first = n, last = 1
};

namespace detail {

struct ArchRow {
    const char* name;
    std::vector<std::size_t> da_gen, da_disc, deep_hidden;
    std::size_t deep_t_count;
    std::vector<std::size_t> gan_gen, gan_disc;
};

inline const std::vector<ArchRow>& registry_architectures() {
    static const std::vector<ArchRow> table = {
        {"WBC", {18, 64, 48, 24, 12, 9}, {9, 4, 2, 1}, {48, 32, 16}, 12000,
         {9, 36, 18, 9}, {9, 20, 8, 1}},
        {"Pima", {16, 64, 48, 24, 12, 8}, {8, 4, 2, 1}, {32, 24, 16}, 7000,
         {8, 24, 16, 8}, {8, 6, 4, 1}},
        {"Haberman", {6, 64, 48, 24, 6, 3}, {3, 12, 8, 6, 2, 1}, {3}, 1500,
         {3, 9, 6, 3}, {3, 10, 8, 1}},
        {"Ionosphere", {68, 136, 112, 86, 64, 52, 34}, {34, 16, 8, 1}, {138, 96, 72, 38}, 7000,
         {34, 106, 53, 34}, {34, 64, 32, 16, 8, 1}},
        {"Parkinson", {44, 112, 96, 82, 64, 32, 22}, {22, 16, 8, 1}, {40, 36, 32, 28}, 1500,
         {22, 88, 44, 22}, {22, 44, 22, 11, 1}},
        {"Blood", {8, 32, 24, 16, 12, 8, 4}, {4, 3, 2, 1}, {16, 6}, 7000,
         {4, 16, 8, 4}, {4, 16, 8, 1}},
        {"Bankruptcy-1", {128, 512, 256, 128, 100, 82, 64}, {64, 48, 24, 16, 8, 1},
         {112, 86, 72}, 2000, {64, 16, 8, 64}, {64, 32, 16, 8, 1}},
        {"Bankruptcy-2", {128, 512, 256, 128, 100, 82, 64}, {64, 48, 24, 16, 8, 1},
         {112, 86, 72}, 8000, {64, 16, 8, 64}, {64, 32, 16, 8, 1}},
        {"Bankruptcy-3", {128, 512, 256, 128, 100, 82, 64}, {64, 48, 24, 16, 8, 1},
         {112, 86, 72}, 10000, {64, 16, 8, 64}, {64, 32, 16, 8, 1}},
        {"Bankruptcy-5", {128, 512, 256, 128, 100, 82, 64}, {64, 48, 24, 16, 8, 1},
         {112, 86, 72}, 2000, {64, 16, 8, 64}, {64, 32, 16, 8, 1}},
    };
    return table;
}

}  // namespace detail

inline MethodHyperparams default_hyperparams(const std::string& dataset_name,
                                             std::size_t feature_dim_n) {
    MethodHyperparams hp;
    for (const auto& row : detail::registry_architectures()) {
        if (dataset_name == row.name) {
            hp.deep_hidden = row.deep_hidden;
            hp.deep_t_count = row.deep_t_count;
            hp.da_gen_widths = row.da_gen;
            hp.da_disc_widths = row.da_disc;
            hp.gan_gen_widths = row.gan_gen;
            hp.gan_disc_widths = row.gan_disc;
            return hp;
        }
    }
    const std::size_t n = feature_dim_n;
    hp.deep_hidden = {std::max<std::size_t>(16, 4 * n), std::max<std::size_t>(8, 2 * n)};
    hp.da_gen_widths = {2 * n, 8 * n, 4 * n, n};
    hp.da_disc_widths = {n, 4 * n, 2 * n, 1};
    hp.gan_gen_widths = {n, 4 * n, 2 * n, n};
    hp.gan_disc_widths = {n, 4 * n, 2 * n, 1};
    return hp;
}

// Index bookkeeping for the no-leakage audit: every original dataset row
// index handed to the scaler, the sampler, or the tree trainer in one fold.
struct FoldAudit {
    std::string dataset;
    Method method;
    std::size_t repeat_index = 0;
    std::size_t fold_index = 0;
    std::vector<std::size_t> scaler_rows;
    std::vector<std::size_t> sampler_rows;
    std::vector<std::size_t> trainer_rows;
    std::vector<std::size_t> test_rows;
};

struct FoldOutcome {
    metrics::FoldMetrics metrics;
    bool sampler_warning = false;
};

namespace detail {

struct TrainFold {
    Matrix minority;  // scaled
    Matrix majority;  // scaled
};

inline TrainFold split_scaled_train(const data::Dataset& ds, const data::MinMaxScaler& scaler,
                                    const std::vector<std::size_t>& train_rows) {
    TrainFold tf;
    tf.minority = Matrix(0, ds.features.cols());
    tf.majority = Matrix(0, ds.features.cols());
    for (std::size_t r : train_rows) {
        const Vec scaled = scaler.transform(ds.features.row(r));
        (ds.labels[r] == 1 ? tf.minority : tf.majority).push_row(scaled);
    }
    return tf;
}

inline da_smote::AdversarialConfig adversarial_config(const MethodHyperparams& hp,
                                                      bool pair_mode, std::uint64_t seed) {
    da_smote::AdversarialConfig cfg;
    cfg.iterations = hp.adv_iterations;
    cfg.disc_steps_k = hp.adv_disc_steps_k;
    cfg.minibatch_m = hp.adv_minibatch_m;
    cfg.gen_learning_rate = hp.adv_gen_learning_rate;
    cfg.disc_learning_rate = hp.adv_disc_learning_rate;
    cfg.gen_loss_mode = hp.gen_loss_mode;
    cfg.rng_seed = seed;
    cfg.gen_arch = da_smote::generator_arch(pair_mode ? hp.da_gen_widths : hp.gan_gen_widths);
    cfg.disc_arch =
        da_smote::discriminator_arch(pair_mode ? hp.da_disc_widths : hp.gan_disc_widths);
    return cfg;
}

}  // namespace detail

// Over-samples the scaled minority to exact balance with the given method.
// Returns the full minority block (originals plus synthetic), deficit rows
// appended; `none` returns the minority unchanged.
inline Matrix balance_minority(Method method, const Matrix& minority, const Matrix& majority,
                               const MethodHyperparams& hp, std::uint64_t seed,
                               bool* sampler_warning = nullptr) {
    const std::size_t deficit =
        majority.rows() > minority.rows() ? majority.rows() - minority.rows() : 0;
    auto merge = [&](const Matrix& synthetic) {
        Matrix out(0, minority.cols());
        for (std::size_t r = 0; r < minority.rows(); ++r)
            out.push_row(minority.row_ptr(r), minority.cols());
        for (std::size_t r = 0; r < synthetic.rows(); ++r)
            out.push_row(synthetic.row_ptr(r), synthetic.cols());
        return out;
    };
    if (method == Method::none || deficit == 0) return merge(Matrix(0, minority.cols()));

    switch (method) {
        case Method::smote: {
            samplers::SamplerRequest req{minority, majority, deficit, hp.k_neighbors, seed};
            return merge(samplers::smote(req).synthetic);
        }
        case Method::borderline_smote: {
            samplers::SamplerRequest req{minority, majority, deficit, hp.k_neighbors, seed};
            auto res = samplers::borderline_smote(req, hp.m_neighbors);
            if (sampler_warning && res.fallback_warning) *sampler_warning = true;
            return merge(res.synthetic);
        }
        case Method::adasyn: {
            samplers::SamplerRequest req{minority, majority, deficit, hp.k_neighbors, seed};
            auto res = samplers::adasyn(req);
            if (sampler_warning && res.fallback_warning) *sampler_warning = true;
            return merge(res.synthetic);
        }
        case Method::deep_smote: {
            deep_smote::DeepSmoteConfig cfg;
            cfg.t_count = hp.deep_t_count;
            cfg.hidden = hp.deep_hidden;
            cfg.train.epochs = hp.deep_epochs;
            cfg.train.batch_size = hp.deep_batch_size;
            cfg.train.learning_rate = hp.deep_learning_rate;
            cfg.neighborhood_mode = hp.deep_neighborhood_mode;
            cfg.k_neighbors = hp.k_neighbors;
            const auto model =
                deep_smote::train_deep_smote(minority, cfg, derive_seed(seed, "train"));
            return deep_smote::oversample_deep_smote(minority, model, deficit,
                                                     derive_seed(seed, "oversample"));
        }
        case Method::da_smote: {
            auto cfg = detail::adversarial_config(hp, true, derive_seed(seed, "train"));
            const auto gen = da_smote::train_da_smote(minority, cfg);
            return da_smote::oversample_da_smote(minority, gen, deficit,
                                                 derive_seed(seed, "oversample"));
        }
        case Method::gan: {
            auto cfg = detail::adversarial_config(hp, false, derive_seed(seed, "train"));
            const std::size_t noise_dim = cfg.gen_arch.front().input_width;
            const auto gen = da_smote::train_gan_baseline(minority, cfg, noise_dim);
            return da_smote::oversample_gan(minority, gen, deficit,
                                            derive_seed(seed, "oversample"));
        }
        default:
            throw InputError("balance_minority: unhandled method");
    }
}

// One fold of the train/test protocol: fit the scaler on the training rows,
// over-sample the scaled training minority to balance, train the tree on the
// balanced set, evaluate on the untouched test rows.
inline FoldOutcome evaluate_fold(const data::Dataset& ds, const metrics::FoldSplit& split,
                                 Method method, const MethodHyperparams& hp, std::uint64_t seed,
                                 std::size_t repeat_index, std::size_t fold_index,
                                 tree::TreeParams tree_params = {}, FoldAudit* audit = nullptr) {
    const auto scaler = data::MinMaxScaler::fit(ds.features, &split.train_indices);
    const auto tf = detail::split_scaled_train(ds, scaler, split.train_indices);

    FoldOutcome outcome;
    const Matrix minority_block =
        balance_minority(method, tf.minority, tf.majority, hp, seed, &outcome.sampler_warning);

    Matrix train_features(0, ds.features.cols());
    std::vector<int> train_labels;
    for (std::size_t r = 0; r < minority_block.rows(); ++r) {
        train_features.push_row(minority_block.row_ptr(r), minority_block.cols());
        train_labels.push_back(1);
    }
    for (std::size_t r = 0; r < tf.majority.rows(); ++r) {
        train_features.push_row(tf.majority.row_ptr(r), tf.majority.cols());
        train_labels.push_back(0);
    }

    const auto model = tree::train_tree(train_features, train_labels, tree_params);

    std::vector<int> y_true, y_pred;
    Vec scores;
    for (std::size_t r : split.test_indices) {
        const Vec x = scaler.transform(ds.features.row(r));
        const double p = tree::predict_proba(model, x);
        scores.push_back(p);
        y_pred.push_back(p >= 0.5 ? 1 : 0);
        y_true.push_back(ds.labels[r]);
    }
    const auto prf = metrics::precision_recall_f1(metrics::confusion(y_true, y_pred));
    outcome.metrics = {prf.precision, prf.recall, prf.f1, metrics::auc(y_true, scores),
                       fold_index, repeat_index};

    if (audit) {
        audit->dataset = ds.name;
        audit->method = method;
        audit->repeat_index = repeat_index;
        audit->fold_index = fold_index;
        audit->scaler_rows = split.train_indices;
        audit->sampler_rows = split.train_indices;  // sampler input built from these rows only
        audit->trainer_rows = split.train_indices;
        audit->test_rows = split.test_indices;
    }
    return outcome;
}

struct DatasetRef {
    // either a CSV path or a synthetic spec
    std::string name;
    std::string path;
    std::string label_column = "label";
    std::string positive_label = "1";
    bool synthetic = false;
    data::SyntheticKind kind = data::SyntheticKind::two_gaussians;
    std::size_t n_major = 500;
    std::size_t n_minor = 50;
    double overlap = 0.5;
};

struct RunConfig {
    std::vector<DatasetRef> datasets;
    std::vector<Method> methods;
    std::size_t k_folds = 10;
    std::size_t repeats = 3;
    std::uint64_t global_seed = 1;
    std::string out_dir = "bench_out";
    std::size_t threads = 1;
    tree::TreeParams tree_params;
    std::map<std::string, MethodHyperparams> hyper_overrides;  // keyed by dataset name
    bool audit = false;
};

inline void validate_run_config(const RunConfig& cfg) {
    if (cfg.methods.empty()) throw ConfigError("RunConfig: methods must be non-empty");
    if (cfg.k_folds < 2) throw ConfigError("RunConfig: k_folds must be >= 2");
    if (cfg.repeats < 1) throw ConfigError("RunConfig: repeats must be >= 1");
    if (cfg.datasets.empty()) throw ConfigError("RunConfig: no datasets");
}

struct ResultRow {
    std::string dataset;
    Method method;
    std::size_t repeat_index;
    std::size_t fold_index;
    metrics::FoldMetrics fold_metrics;
};

struct SignificanceCell {
    std::string proposed;  // deep_smote or da_smote
    std::string baseline;
    std::string metric;
    double t_stat;
    double p_value;
    bool significant;  // p < alpha and mean difference favors the proposed method
};

struct BenchmarkReport {
    std::vector<ResultRow> rows;  // canonical order: dataset, method, repeat, fold
    std::map<std::string, std::map<Method, metrics::AggregateMetrics>> summaries;
    std::map<std::string, std::vector<SignificanceCell>> significance;  // per dataset
    std::vector<FoldAudit> audits;
    std::vector<std::string> warnings;
};

inline data::Dataset resolve_dataset(const DatasetRef& ref) {
    if (ref.synthetic) {
        auto ds = data::make_synthetic(ref.kind, ref.n_major, ref.n_minor, ref.overlap,
                                       derive_seed(0x5eed, ref.name));
        ds.name = ref.name.empty() ? ds.name : ref.name;
        return ds;
    }
    return data::load_csv(ref.path, ref.label_column, ref.positive_label, ref.name);
}

inline std::uint64_t fold_job_seed(std::uint64_t global_seed, const std::string& dataset,
                                   std::size_t repeat, std::size_t fold, Method method) {
    return derive_seed(global_seed, dataset + "/" + std::to_string(repeat) + "/" +
                                        std::to_string(fold) + "/" + method_name(method));
}

inline BenchmarkReport run_benchmark(const RunConfig& cfg) {
    validate_run_config(cfg);
    BenchmarkReport report;

    struct Job {
        std::size_t dataset_idx, repeat, fold;
        Method method;
    };
    std::vector<data::Dataset> datasets;
    std::vector<std::vector<std::vector<metrics::FoldSplit>>> splits;  // [ds][repeat][fold]
    std::vector<MethodHyperparams> hyper;
    std::vector<Job> jobs;

    for (std::size_t d = 0; d < cfg.datasets.size(); ++d) {
        datasets.push_back(resolve_dataset(cfg.datasets[d]));
        const auto& ds = datasets.back();
        for (const auto& w : ds.warnings) report.warnings.push_back(ds.name + ": " + w);
        auto it = cfg.hyper_overrides.find(ds.name);
        hyper.push_back(it != cfg.hyper_overrides.end()
                            ? it->second
                            : default_hyperparams(ds.name, ds.features.cols()));
        splits.emplace_back();
        for (std::size_t rep = 0; rep < cfg.repeats; ++rep) {
            // identical folds across methods; reshuffled per repeat
            const auto fold_seed =
                derive_seed(cfg.global_seed, ds.name + "/folds/" + std::to_string(rep));
            splits.back().push_back(metrics::stratified_kfold(ds.labels, cfg.k_folds, fold_seed));
            for (std::size_t f = 0; f < cfg.k_folds; ++f)
                for (Method m : cfg.methods) jobs.push_back({d, rep, f, m});
        }
    }

    std::vector<ResultRow> results(jobs.size());
    std::vector<FoldAudit> audits(cfg.audit ? jobs.size() : 0);
    std::vector<std::string> errors(jobs.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const std::size_t j = next.fetch_add(1);
            if (j >= jobs.size()) return;
            const Job& job = jobs[j];
            const auto& ds = datasets[job.dataset_idx];
            try {
                const auto outcome = evaluate_fold(
                    ds, splits[job.dataset_idx][job.repeat][job.fold], job.method,
                    hyper[job.dataset_idx],
                    fold_job_seed(cfg.global_seed, ds.name, job.repeat, job.fold, job.method),
                    job.repeat, job.fold, cfg.tree_params,
                    cfg.audit ? &audits[j] : nullptr);
                results[j] = {ds.name, job.method, job.repeat, job.fold, outcome.metrics};
            } catch (const std::exception& e) {
                errors[j] = ds.name + "/" + method_name(job.method) + "/repeat " +
                            std::to_string(job.repeat) + "/fold " + std::to_string(job.fold) +
                            ": " + e.what();
            }
        }
    };

    std::size_t thread_count = cfg.threads;
    if (const char* env = std::getenv("REBALANCE_THREADS")) {
        const unsigned long v = std::strtoul(env, nullptr, 10);
        if (v >= 1) thread_count = v;
    }
    if (thread_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < thread_count; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error("benchmark job failed: " + e);

    // jobs were generated in canonical (dataset, repeat, fold, method) order;
    // re-sort rows to (dataset, method, repeat, fold) for stable output.
    std::sort(results.begin(), results.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tie(a.dataset, a.method, a.repeat_index, a.fold_index) <
               std::tie(b.dataset, b.method, b.repeat_index, b.fold_index);
    });
    report.rows = std::move(results);
    report.audits = std::move(audits);

    // aggregates
    std::map<std::string, std::map<Method, std::vector<metrics::FoldMetrics>>> grouped;
    for (const auto& row : report.rows)
        grouped[row.dataset][row.method].push_back(row.fold_metrics);
    for (const auto& [ds_name, per_method] : grouped)
        for (const auto& [m, folds] : per_method)
            report.summaries[ds_name][m] = metrics::aggregate(folds);

    // paired t-tests: each proposed method against every other method, same
    // (repeat, fold) observations, per metric
    const std::vector<Method> proposed = {Method::deep_smote, Method::da_smote};
    for (const auto& [ds_name, per_method] : grouped) {
        auto metric_vec = [&](Method m, int which) {
            Vec v;
            for (const auto& fm : per_method.at(m))
                v.push_back(which == 0   ? fm.precision
                            : which == 1 ? fm.recall
                            : which == 2 ? fm.f1
                                         : fm.auc);
            return v;
        };
        static const char* metric_tag[4] = {"precision", "recall", "f1", "auc"};
        for (Method p : proposed) {
            if (!per_method.count(p)) continue;
            for (const auto& [other, _] : per_method) {
                if (other == p) continue;
                for (int which = 0; which < 4; ++which) {
                    const Vec a = metric_vec(p, which);
                    const Vec b = metric_vec(other, which);
                    const auto tt = metrics::paired_t_test(a, b);
                    double mean_diff = 0.0;
                    for (std::size_t i = 0; i < a.size(); ++i) mean_diff += a[i] - b[i];
                    report.significance[ds_name].push_back(
                        {method_name(p), method_name(other), metric_tag[which], tt.t_stat,
                         tt.p_value, tt.significant && mean_diff > 0.0});
                }
            }
        }
    }
    return report;
}

namespace detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt4(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace detail

inline void emit_report(const BenchmarkReport& report, const std::string& out_dir) {
    if (report.rows.empty()) throw InputError("emit_report: empty results");
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);

    {
        std::ofstream csv(fs::path(out_dir) / "results.csv");
        if (!csv) throw std::runtime_error("emit_report: cannot write results.csv in " + out_dir);
        csv << "dataset,method,repeat,fold,precision,recall,f1,auc\n";
        for (const auto& row : report.rows) {
            csv << row.dataset << "," << method_name(row.method) << "," << row.repeat_index << ","
                << row.fold_index << "," << detail::fmt(row.fold_metrics.precision) << ","
                << detail::fmt(row.fold_metrics.recall) << "," << detail::fmt(row.fold_metrics.f1)
                << "," << detail::fmt(row.fold_metrics.auc) << "\n";
        }
    }

    {
        std::ofstream js(fs::path(out_dir) / "summary.json");
        if (!js) throw std::runtime_error("emit_report: cannot write summary.json");
        js << "{\n  \"datasets\": {\n";
        bool first_ds = true;
        for (const auto& [ds_name, per_method] : report.summaries) {
            if (!first_ds) js << ",\n";
            first_ds = false;
            js << "    \"" << ds_name << "\": {\n      \"methods\": {\n";
            bool first_m = true;
            for (const auto& [m, agg] : per_method) {
                if (!first_m) js << ",\n";
                first_m = false;
                auto one = [&](const char* tag, const metrics::MetricSummary& s,
                               bool last = false) {
                    js << "          \"" << tag << "\": {\"mean\": " << detail::fmt(s.mean)
                       << ", \"std\": " << (s.std_dev ? detail::fmt(*s.std_dev) : "null") << "}"
                       << (last ? "\n" : ",\n");
                };
                js << "        \"" << method_name(m) << "\": {\n";
                one("precision", agg.precision);
                one("recall", agg.recall);
                one("f1", agg.f1);
                one("auc", agg.auc, true);
                js << "        }";
            }
            js << "\n      },\n      \"significance\": [\n";
            bool first_s = true;
            auto it = report.significance.find(ds_name);
            if (it != report.significance.end()) {
                for (const auto& cell : it->second) {
                    if (!first_s) js << ",\n";
                    first_s = false;
                    js << "        {\"proposed\": \"" << cell.proposed << "\", \"baseline\": \""
                       << cell.baseline << "\", \"metric\": \"" << cell.metric
                       << "\", \"t\": " << detail::fmt(cell.t_stat)
                       << ", \"p\": " << detail::fmt(cell.p_value)
                       << ", \"significant\": " << (cell.significant ? "true" : "false") << "}";
                }
            }
            js << "\n      ]\n    }";
        }
        js << "\n  }\n}\n";
    }

    {
        std::ofstream md(fs::path(out_dir) / "summary.md");
        if (!md) throw std::runtime_error("emit_report: cannot write summary.md");
        md << "# Benchmark summary\n";
        for (const auto& [ds_name, per_method] : report.summaries) {
            md << "\n## " << ds_name << "\n\n";
            md << "| method | precision | recall | F1 | AUC | F1 std | AUC std |\n";
            md << "|---|---|---|---|---|---|---|\n";
            for (const auto& [m, agg] : per_method) {
                auto std_or_dash = [](const metrics::MetricSummary& s) {
                    return s.std_dev ? detail::fmt4(*s.std_dev) : std::string("-");
                };
                md << "| " << method_name(m) << " | " << detail::fmt4(agg.precision.mean) << " | "
                   << detail::fmt4(agg.recall.mean) << " | " << detail::fmt4(agg.f1.mean) << " | "
                   << detail::fmt4(agg.auc.mean) << " | " << std_or_dash(agg.f1) << " | "
                   << std_or_dash(agg.auc) << " |\n";
            }
            auto it = report.significance.find(ds_name);
            if (it != report.significance.end() && !it->second.empty()) {
                md << "\nSignificant wins (paired t-test, p < 0.05):\n\n";
                bool any = false;
                for (const auto& cell : it->second) {
                    if (!cell.significant) continue;
                    any = true;
                    md << "- " << cell.proposed << " > " << cell.baseline << " on " << cell.metric
                       << " (p = " << detail::fmt4(cell.p_value) << ")\n";
                }
                if (!any) md << "- none\n";
            }
        }
        if (!report.warnings.empty()) {
            md << "\n## Warnings\n\n";
            for (const auto& w : report.warnings) md << "- " << w << "\n";
        }
    }
}

// Re-runs one method across seeds through a fixed CV protocol, varying only
// the sampler stream. Model-based methods train once per fold with a fixed
// seed and vary only the over-sampling seed, so the dispersion isolates the
// synthesis randomness.
struct StabilityReport {
    std::vector<metrics::AggregateMetrics> per_seed;  // one aggregate per seed
    metrics::MetricSummary f1_across_seeds;
    metrics::MetricSummary auc_across_seeds;
    bool synthetic_outputs_differ = false;  // first fold, first two seeds
};

inline StabilityReport stability_report(const data::Dataset& ds, Method method,
                                        const std::vector<std::uint64_t>& seeds,
                                        std::size_t k_folds, std::uint64_t protocol_seed,
                                        const MethodHyperparams& hp,
                                        tree::TreeParams tree_params = {}) {
    if (seeds.size() < 2) throw InputError("stability_report: need at least 2 seeds");
    const auto splits = metrics::stratified_kfold(ds.labels, k_folds, protocol_seed);

    // Per fold: fixed scaler and (for model methods) one frozen model.
    struct FoldContext {
        data::MinMaxScaler scaler;
        detail::TrainFold tf;
        std::optional<deep_smote::DeepSmoteModel> deep_model;
        std::optional<nn::MlpModel> generator;
    };
    std::vector<FoldContext> contexts;
    for (std::size_t f = 0; f < splits.size(); ++f) {
        auto scaler = data::MinMaxScaler::fit(ds.features, &splits[f].train_indices);
        auto tf = detail::split_scaled_train(ds, scaler, splits[f].train_indices);
        FoldContext ctx{std::move(scaler), std::move(tf), std::nullopt, std::nullopt};
        const auto model_seed = derive_seed(protocol_seed, ds.name + "/model/" + std::to_string(f));
        if (method == Method::deep_smote) {
            deep_smote::DeepSmoteConfig cfg;
            cfg.t_count = hp.deep_t_count;
            cfg.hidden = hp.deep_hidden;
            cfg.train.epochs = hp.deep_epochs;
            cfg.train.batch_size = hp.deep_batch_size;
            cfg.train.learning_rate = hp.deep_learning_rate;
            ctx.deep_model = deep_smote::train_deep_smote(ctx.tf.minority, cfg, model_seed);
        } else if (method == Method::da_smote) {
            ctx.generator = da_smote::train_da_smote(
                ctx.tf.minority, detail::adversarial_config(hp, true, model_seed));
        } else if (method == Method::gan) {
            auto cfg = detail::adversarial_config(hp, false, model_seed);
            ctx.generator = da_smote::train_gan_baseline(ctx.tf.minority, cfg,
                                                         cfg.gen_arch.front().input_width);
        }
        contexts.push_back(std::move(ctx));
    }

    auto minority_block = [&](FoldContext& ctx, std::uint64_t seed) {
        const std::size_t deficit = ctx.tf.majority.rows() > ctx.tf.minority.rows()
                                        ? ctx.tf.majority.rows() - ctx.tf.minority.rows()
                                        : 0;
        if (ctx.deep_model)
            return deep_smote::oversample_deep_smote(ctx.tf.minority, *ctx.deep_model, deficit,
                                                     seed);
        if (ctx.generator) {
            if (method == Method::da_smote)
                return da_smote::oversample_da_smote(ctx.tf.minority, *ctx.generator, deficit,
                                                     seed);
            return da_smote::oversample_gan(ctx.tf.minority, *ctx.generator, deficit, seed);
        }
        return balance_minority(method, ctx.tf.minority, ctx.tf.majority, hp, seed);
    };

    StabilityReport report;
    std::vector<Matrix> first_fold_blocks;
    Vec f1_means, auc_means;
    for (std::uint64_t seed : seeds) {
        std::vector<metrics::FoldMetrics> fold_metrics;
        for (std::size_t f = 0; f < splits.size(); ++f) {
            auto& ctx = contexts[f];
            const Matrix block = minority_block(ctx, derive_seed(seed, std::to_string(f)));
            if (f == 0) first_fold_blocks.push_back(block);

            Matrix train_features(0, ds.features.cols());
            std::vector<int> train_labels;
            for (std::size_t r = 0; r < block.rows(); ++r) {
                train_features.push_row(block.row_ptr(r), block.cols());
                train_labels.push_back(1);
            }
            for (std::size_t r = 0; r < ctx.tf.majority.rows(); ++r) {
                train_features.push_row(ctx.tf.majority.row_ptr(r), ctx.tf.majority.cols());
                train_labels.push_back(0);
            }
            const auto model = tree::train_tree(train_features, train_labels, tree_params);
            std::vector<int> y_true, y_pred;
            Vec scores;
            for (std::size_t r : splits[f].test_indices) {
                const double p = tree::predict_proba(model, ctx.scaler.transform(ds.features.row(r)));
                scores.push_back(p);
                y_pred.push_back(p >= 0.5 ? 1 : 0);
                y_true.push_back(ds.labels[r]);
            }
            const auto prf = metrics::precision_recall_f1(metrics::confusion(y_true, y_pred));
            fold_metrics.push_back(
                {prf.precision, prf.recall, prf.f1, metrics::auc(y_true, scores), f, 0});
        }
        const auto agg = metrics::aggregate(fold_metrics);
        f1_means.push_back(agg.f1.mean);
        auc_means.push_back(agg.auc.mean);
        report.per_seed.push_back(agg);
    }
    report.synthetic_outputs_differ = !(first_fold_blocks[0] == first_fold_blocks[1]);
    report.f1_across_seeds = metrics::aggregate_values(f1_means);
    report.auc_across_seeds = metrics::aggregate_values(auc_means);
    return report;
}

}  // namespace rebalance::bench
