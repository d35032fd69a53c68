#include "tspe/evalharness.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>
#include <utility>

#include "tspe/errors.hpp"

namespace tspe {
namespace {

using nlohmann::json;

constexpr std::string_view kReportFormat = "tspe-report-v1";

std::string timestamp_utc() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string format_accuracy(double accuracy) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", accuracy);
    return buf;
}

std::string_view averaging_name(AveragingOrder order) {
    return order == AveragingOrder::NormalizeThenAverage ? "normalize_then_average"
                                                         : "average_raw_then_normalize";
}

// Owns the run directory for the duration of one evaluation.
class RunLock {
public:
    explicit RunLock(const std::filesystem::path& dir) : lock_path_(dir / "run.lock") {
        if (std::filesystem::exists(lock_path_))
            throw RunLockError("run directory is already owned: " + lock_path_.string());
        std::ofstream out(lock_path_);
        if (!out) throw RunLockError("cannot create lock file: " + lock_path_.string());
        out << "pid " << ::getpid() << '\n';
    }
    ~RunLock() {
        std::error_code ec;
        std::filesystem::remove(lock_path_, ec);
    }
    RunLock(const RunLock&) = delete;
    RunLock& operator=(const RunLock&) = delete;

private:
    std::filesystem::path lock_path_;
};

struct Prediction {
    std::string predicted;
    double top_cosine = 0.0;
};

// Classifies every clip against the ensembles, `jobs`-way parallel.
std::vector<Prediction> classify_all(const std::vector<Embedding>& clip_embeddings,
                                     const std::vector<ClassEnsemble>& ensembles, int jobs) {
    std::vector<Prediction> predictions(clip_embeddings.size());
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto [label, scores] = classify(clip_embeddings[i], ensembles);
            double top = scores.empty() ? 0.0 : scores.front().cosine;
            for (const ScoreEntry& s : scores) top = std::max(top, s.cosine);
            predictions[i] = {std::move(label), top};
        }
    };
    const std::size_t n = clip_embeddings.size();
    if (jobs <= 1 || n < 2) {
        work(0, n);
        return predictions;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    std::vector<std::thread> threads;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back(work, begin, end);
    }
    for (std::thread& t : threads) t.join();
    return predictions;
}

void write_predictions(const std::filesystem::path& path, const DatasetManifest& manifest,
                       const std::vector<Prediction>& predictions) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write predictions: " + path.string());
    out << "clip\tgold\tpredicted\ttop_cosine\n";
    char cos_buf[32];
    for (std::size_t i = 0; i < manifest.rows.size(); ++i) {
        std::snprintf(cos_buf, sizeof cos_buf, "%.6f", predictions[i].top_cosine);
        out << manifest.rows[i].clip_path.generic_string() << '\t' << manifest.rows[i].label_id
            << '\t' << predictions[i].predicted << '\t' << cos_buf << '\n';
    }
}

void write_manifest_copy(const std::filesystem::path& path, const DatasetManifest& manifest) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write manifest copy: " + path.string());
    out << "clip_path\tlabel\n";
    for (const ManifestRow& row : manifest.rows)
        out << row.clip_path.generic_string() << '\t' << row.label_id << '\n';
}

json report_to_json(const EvaluationReport& r) {
    json j;
    j["format"] = kReportFormat;
    j["dataset_id"] = r.dataset_id;
    j["backend_id"] = r.backend_id;
    j["condition"] = condition_name(r.condition);
    j["accuracy"] = r.accuracy;
    j["n_clips"] = r.n_clips;
    j["runs"] = r.runs;
    j["per_run_accuracies"] = r.per_run_accuracies;
    j["promptset_hash"] = r.promptset_hash;
    j["split"] = r.split;
    j["deterministic_backend"] = r.deterministic_backend;
    j["seed"] = r.seed;
    j["averaging"] = r.averaging;
    j["timestamp"] = r.timestamp;
    return j;
}

}  // namespace

std::string_view condition_name(Condition c) {
    return c == Condition::Vanilla ? "vanilla" : "tspe";
}

std::optional<Condition> condition_from_name(std::string_view s) {
    if (s == "vanilla") return Condition::Vanilla;
    if (s == "tspe") return Condition::Tspe;
    return std::nullopt;
}

EvaluationReport evaluate(const DatasetManifest& manifest, const Taxonomy& taxonomy,
                          Encoder& encoder, Condition condition, const PromptSet* promptset,
                          const EvaluateOptions& options) {
    if (options.runs <= 0) throw UsageError("evaluate: runs must be positive");
    if (manifest.rows.empty()) throw ManifestError("manifest has no rows");
    const BackendInfo& backend = encoder.info();
    if (!backend.text_capable || !backend.audio_capable)
        throw EncodeError("backend '" + backend.backend_id +
                          "' lacks text or audio capability");
    const CategoryId category = taxonomy.category_of(manifest.dataset_id);
    if (condition == Condition::Tspe) {
        if (promptset == nullptr)
            throw UsageError("the tspe condition needs a prompt set for category '" +
                             std::string(category_id_string(category)) + "'");
        if (promptset->category != category)
            throw CategoryMismatch("prompt set is for category '" +
                                   std::string(category_id_string(promptset->category)) +
                                   "' but dataset '" + manifest.dataset_id + "' is '" +
                                   std::string(category_id_string(category)) + "'");
    }

    std::vector<std::filesystem::path> missing;
    for (const ManifestRow& row : manifest.rows)
        if (!std::filesystem::exists(row.clip_path)) missing.push_back(row.clip_path);
    if (!missing.empty())
        throw ManifestError(std::to_string(missing.size()) + " clips missing, first: " +
                            missing.front().string());

    // Class representations in the dataset's stable label order.
    std::vector<std::pair<std::string, std::string>> labels;
    for (const std::string& label_id : taxonomy.labels_of(manifest.dataset_id))
        labels.emplace_back(label_id, taxonomy.display_text(manifest.dataset_id, label_id));
    std::vector<ClassEnsemble> ensembles;
    if (condition == Condition::Tspe) {
        ensembles.reserve(labels.size());
        for (const auto& [label_id, text] : labels)
            ensembles.push_back(
                ensemble_class(*promptset, label_id, text, encoder, options.order));
    } else {
        ensembles = vanilla_ensembles(labels, encoder);
    }

    std::unique_ptr<RunLock> lock;
    if (!options.out_dir.empty()) {
        std::filesystem::create_directories(options.out_dir);
        lock = std::make_unique<RunLock>(options.out_dir);
    }

    std::vector<std::filesystem::path> clips;
    clips.reserve(manifest.rows.size());
    for (const ManifestRow& row : manifest.rows) clips.push_back(row.clip_path);
    const std::vector<Embedding> clip_embeddings = encoder.embed_audio(clips);

    EvaluationReport report;
    report.dataset_id = manifest.dataset_id;
    report.backend_id = backend.backend_id;
    report.condition = condition;
    report.n_clips = static_cast<int>(manifest.rows.size());
    report.runs = options.runs;
    if (condition == Condition::Tspe) report.promptset_hash = promptset_hash(*promptset);
    report.split = manifest.split;
    report.deterministic_backend = !backend.seed_sensitive;
    report.seed = options.seed;
    report.averaging = std::string(averaging_name(options.order));
    report.timestamp = timestamp_utc();

    double accuracy_sum = 0.0;
    for (int run = 0; run < options.runs; ++run) {
        const std::vector<Prediction> predictions =
            classify_all(clip_embeddings, ensembles, options.jobs);
        int correct = 0;
        for (std::size_t i = 0; i < manifest.rows.size(); ++i)
            if (predictions[i].predicted == manifest.rows[i].label_id) ++correct;
        const double accuracy =
            100.0 * static_cast<double>(correct) / static_cast<double>(manifest.rows.size());
        report.per_run_accuracies.push_back(accuracy);
        accuracy_sum += accuracy;
        if (!options.out_dir.empty())
            write_predictions(options.out_dir /
                                  ("run" + std::to_string(run + 1) + ".predictions.tsv"),
                              manifest, predictions);
    }
    report.accuracy = accuracy_sum / static_cast<double>(options.runs);

    if (!options.out_dir.empty()) {
        write_manifest_copy(options.out_dir / "manifest.tsv", manifest);
        json snapshot;
        snapshot["dataset_id"] = manifest.dataset_id;
        snapshot["split"] = manifest.split;
        snapshot["backend_id"] = backend.backend_id;
        snapshot["backend_dimension"] = backend.dimension;
        snapshot["backend_preprocessing"] = backend.preprocessing;
        snapshot["deterministic_backend"] = !backend.seed_sensitive;
        snapshot["condition"] = condition_name(condition);
        snapshot["runs"] = options.runs;
        snapshot["seed"] = options.seed;
        snapshot["jobs"] = options.jobs;
        snapshot["averaging"] = averaging_name(options.order);
        snapshot["promptset_hash"] = report.promptset_hash;
        snapshot["n_clips"] = report.n_clips;
        json label_order = json::array();
        for (const auto& [label_id, text] : labels) label_order.push_back(label_id);
        snapshot["label_order"] = label_order;
        for (const auto& [key, value] : options.snapshot_extras) snapshot[key] = value;
        std::ofstream out(options.out_dir / "config.json");
        if (!out)
            throw ConfigError("cannot write config snapshot in " + options.out_dir.string());
        out << snapshot.dump(2) << '\n';
        save_report(options.out_dir / "report.json", report);
    }
    return report;
}

CompareResult compare(const EvaluationReport& vanilla, const EvaluationReport& tspe) {
    if (vanilla.dataset_id != tspe.dataset_id || vanilla.backend_id != tspe.backend_id)
        throw MismatchedRuns("cannot compare " + vanilla.dataset_id + "/" + vanilla.backend_id +
                             " against " + tspe.dataset_id + "/" + tspe.backend_id);
    CompareResult result;
    result.dataset_id = vanilla.dataset_id;
    result.backend_id = vanilla.backend_id;
    result.delta = tspe.accuracy - vanilla.accuracy;
    result.vanilla = vanilla;
    result.tspe = tspe;
    return result;
}

AblationResult ablate_k(const DatasetManifest& manifest, const Taxonomy& taxonomy,
                        Encoder& encoder, const std::vector<PromptCandidate>& candidate_pool,
                        const RuleTable& rules, const std::vector<int>& ks,
                        const EvaluateOptions& options) {
    if (ks.empty()) throw UsageError("ablate_k: no K values requested");
    for (std::size_t i = 1; i < ks.size(); ++i)
        if (ks[i] <= ks[i - 1]) throw UsageError("ablate_k: K values must be strictly increasing");
    if (std::cmp_less(candidate_pool.size(), ks.back()))
        throw InsufficientCandidates("candidate pool holds " +
                                     std::to_string(candidate_pool.size()) +
                                     " prompts; largest K is " + std::to_string(ks.back()));

    AblationResult result;
    result.dataset_id = manifest.dataset_id;
    result.backend_id = encoder.info().backend_id;
    for (int k : ks) {
        CurationOptions curation;
        curation.k = k;
        curation.mode = CurationMode::Auto;
        curation.reviewer = "ablation";
        const PromptSet set = curate(candidate_pool, rules, curation);
        EvaluateOptions point_options = options;
        point_options.out_dir.clear();  // per-point runs stay in memory
        const EvaluationReport report =
            evaluate(manifest, taxonomy, encoder, Condition::Tspe, &set, point_options);
        result.points.push_back({k, report.accuracy});
    }
    if (!options.out_dir.empty()) {
        std::filesystem::create_directories(options.out_dir);
        save_ablation(options.out_dir / "ablation.tsv", result);
    }
    return result;
}

ReportTable report_table(const std::vector<EvaluationReport>& reports, const Taxonomy& taxonomy) {
    if (reports.empty()) throw UsageError("report_table: no reports");

    // Backends in first-seen order; datasets grouped by category.
    std::vector<std::string> backends;
    for (const EvaluationReport& r : reports)
        if (std::find(backends.begin(), backends.end(), r.backend_id) == backends.end())
            backends.push_back(r.backend_id);
    std::vector<std::string> dataset_ids;
    for (const EvaluationReport& r : reports) {
        if (!taxonomy.has_dataset(r.dataset_id))
            throw UnknownDataset("report covers unregistered dataset '" + r.dataset_id + "'");
        if (std::find(dataset_ids.begin(), dataset_ids.end(), r.dataset_id) ==
            dataset_ids.end())
            dataset_ids.push_back(r.dataset_id);
    }

    auto find_report = [&](const std::string& dataset, const std::string& backend,
                           Condition condition) -> const EvaluationReport* {
        for (const EvaluationReport& r : reports)
            if (r.dataset_id == dataset && r.backend_id == backend && r.condition == condition)
                return &r;
        return nullptr;
    };

    std::ostringstream csv;
    csv << "category,dataset,backend,condition,accuracy,runs,n_clips,best\n";
    std::ostringstream human;

    const std::size_t name_width = 24;
    std::size_t cell_width = 16;
    for (const std::string& b : backends) cell_width = std::max(cell_width, b.size() + 7);

    auto pad = [](const std::string& s, std::size_t width) {
        return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
    };

    for (CategoryId category : kAllCategories) {
        // Keep the category block only if it has datasets with reports.
        std::vector<std::string> in_block;
        for (const DatasetDescriptor& d : taxonomy.datasets())
            if (d.category == category &&
                std::find(dataset_ids.begin(), dataset_ids.end(), d.dataset_id) !=
                    dataset_ids.end())
                in_block.push_back(d.dataset_id);
        if (in_block.empty()) continue;

        human << "== " << category_info(category).name << " ==\n";
        human << pad("dataset", name_width);
        for (const std::string& b : backends) {
            human << pad(b + " van", cell_width);
            human << pad(b + " tspe", cell_width);
        }
        human << '\n';
        for (const std::string& dataset : in_block) {
            human << pad(dataset, name_width);
            for (const std::string& backend : backends) {
                const EvaluationReport* van = find_report(dataset, backend, Condition::Vanilla);
                const EvaluationReport* tsp = find_report(dataset, backend, Condition::Tspe);
                const double best = std::max(van ? van->accuracy : -1.0,
                                             tsp ? tsp->accuracy : -1.0);
                auto cell = [&](const EvaluationReport* r) {
                    if (r == nullptr) return std::string("-");
                    std::string s = format_accuracy(r->accuracy);
                    if (r->accuracy == best) s += "*";
                    return s;
                };
                human << pad(cell(van), cell_width) << pad(cell(tsp), cell_width);
                for (const EvaluationReport* r : {van, tsp}) {
                    if (r == nullptr) continue;
                    csv << category_id_string(category) << ',' << dataset << ',' << backend
                        << ',' << condition_name(r->condition) << ','
                        << format_accuracy(r->accuracy) << ',' << r->runs << ',' << r->n_clips
                        << ',' << (r->accuracy == best ? 1 : 0) << '\n';
                }
            }
            human << '\n';
        }
        human << '\n';
    }
    return {human.str(), csv.str()};
}

void save_report(const std::filesystem::path& path, const EvaluationReport& report) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write report: " + path.string());
    out << report_to_json(report).dump(2) << '\n';
}

EvaluationReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open report: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("report " + path.string() + ": " + e.what());
    }
    if (j.value("format", "") != kReportFormat)
        throw ConfigError("report " + path.string() + ": unexpected format tag");
    EvaluationReport r;
    r.dataset_id = j.value("dataset_id", "");
    r.backend_id = j.value("backend_id", "");
    const auto condition = condition_from_name(j.value("condition", ""));
    if (!condition)
        throw ConfigError("report " + path.string() + ": unknown condition '" +
                          j.value("condition", "") + "'");
    r.condition = *condition;
    r.accuracy = j.value("accuracy", 0.0);
    r.n_clips = j.value("n_clips", 0);
    r.runs = j.value("runs", 0);
    r.per_run_accuracies = j.value("per_run_accuracies", std::vector<double>{});
    r.promptset_hash = j.value("promptset_hash", "");
    r.split = j.value("split", "");
    r.deterministic_backend = j.value("deterministic_backend", true);
    r.seed = j.value("seed", std::uint64_t{0});
    r.averaging = j.value("averaging", "");
    r.timestamp = j.value("timestamp", "");
    return r;
}

void save_ablation(const std::filesystem::path& path, const AblationResult& result) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write ablation file: " + path.string());
    out << "k\taccuracy\n";
    for (const AblationPoint& p : result.points)
        out << p.k << '\t' << format_accuracy(p.accuracy) << '\n';
}

}  // namespace tspe
