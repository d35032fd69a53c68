#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "tspe/curation.hpp"
#include "tspe/encoder.hpp"
#include "tspe/ensemble.hpp"
#include "tspe/manifest.hpp"
#include "tspe/taxonomy.hpp"

namespace tspe {

enum class Condition { Vanilla, Tspe };

std::string_view condition_name(Condition c);
std::optional<Condition> condition_from_name(std::string_view s);

struct EvaluationReport {
    std::string dataset_id;
    std::string backend_id;
    Condition condition = Condition::Vanilla;
    double accuracy = 0.0;  // mean of per_run_accuracies, exactly
    int n_clips = 0;
    int runs = 0;
    std::vector<double> per_run_accuracies;
    std::string promptset_hash;  // empty under the vanilla condition
    std::string split;
    // Embeddings are pure functions of content for such backends, so the
    // five runs are identical by construction.
    bool deterministic_backend = true;
    std::uint64_t seed = 0;
    std::string averaging;
    std::string timestamp;
};

struct EvaluateOptions {
    int runs = 5;
    std::uint64_t seed = 0;
    int jobs = 1;
    AveragingOrder order = AveragingOrder::NormalizeThenAverage;
    // When set, the evaluation owns this directory for the duration of the
    // run (lock file) and leaves manifest copy, config snapshot, per-run
    // predictions and the report behind.
    std::filesystem::path out_dir;
    // Extra key/value pairs merged into the config snapshot (CLI flags,
    // config-file path, ...).
    std::map<std::string, std::string> snapshot_extras;
};

// Zero-shot evaluation of one dataset under one condition. The TSPE
// condition scores clips against the prompt-set ensembles; vanilla scores
// against single generic-template embeddings.
EvaluationReport evaluate(const DatasetManifest& manifest, const Taxonomy& taxonomy,
                          Encoder& encoder, Condition condition,
                          const PromptSet* promptset = nullptr,
                          const EvaluateOptions& options = {});

struct CompareResult {
    std::string dataset_id;
    std::string backend_id;
    double delta = 0.0;  // tspe.accuracy − vanilla.accuracy, percentage points
    EvaluationReport vanilla;
    EvaluationReport tspe;
};

// Throws MismatchedRuns when the reports cover different datasets/backends.
CompareResult compare(const EvaluationReport& vanilla, const EvaluationReport& tspe);

struct AblationPoint {
    int k = 0;
    double accuracy = 0.0;
};

struct AblationResult {
    std::string dataset_id;
    std::string backend_id;
    std::vector<AblationPoint> points;  // one per requested K, ascending
};

// Sweeps the ensemble size: for each K, auto-curates the first K rule
// survivors (prefixes nest, so K=5 ⊂ K=10 ⊂ ...) and evaluates. Requires Ks
// strictly increasing. Writes a plot-ready "k<TAB>accuracy" file when
// options.out_dir is set.
AblationResult ablate_k(const DatasetManifest& manifest, const Taxonomy& taxonomy,
                        Encoder& encoder, const std::vector<PromptCandidate>& candidate_pool,
                        const RuleTable& rules,
                        const std::vector<int>& ks = {5, 10, 15, 20, 25, 30},
                        const EvaluateOptions& options = {});

struct ReportTable {
    std::string human;  // fixed-width text grouped by task category
    std::string csv;    // machine-readable, one row per report
};

// Lays the reports out dataset × (backend, condition), grouped into task
// category blocks; the best condition per (dataset, backend) pair is starred
// (both on a tie).
ReportTable report_table(const std::vector<EvaluationReport>& reports, const Taxonomy& taxonomy);

void save_report(const std::filesystem::path& path, const EvaluationReport& report);
EvaluationReport load_report(const std::filesystem::path& path);

void save_ablation(const std::filesystem::path& path, const AblationResult& result);

}  // namespace tspe
