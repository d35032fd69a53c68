#include <algorithm>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"
#include "tspe/curation.hpp"
#include "tspe/errors.hpp"
#include "tspe/evalharness.hpp"
#include "tspe/mock_backend.hpp"

using namespace tspe;
using tspe_test::PlantedFixture;

namespace {

std::vector<PromptCandidate> attr_candidates(int n, CategoryId cat) {
    std::vector<PromptCandidate> out;
    for (int i = 0; i < n; ++i)
        out.push_back(make_candidate(cat, Grammar::Attr, "tone" + std::to_string(i),
                                     std::nullopt, Provenance::Offline));
    return out;
}

PromptSet curated_set(int k, CategoryId cat) {
    CurationOptions options;
    options.k = k;
    return curate(attr_candidates(k, cat), RuleTable{}, options);
}

EvaluationReport stub_report(const std::string& dataset, const std::string& backend,
                             Condition condition, double accuracy) {
    EvaluationReport r;
    r.dataset_id = dataset;
    r.backend_id = backend;
    r.condition = condition;
    r.accuracy = accuracy;
    r.n_clips = 400;
    r.runs = 5;
    r.per_run_accuracies.assign(5, accuracy);
    r.split = "eval";
    r.averaging = "normalize_then_average";
    r.timestamp = "2024-01-01T00:00:00Z";
    return r;
}

}  // namespace

TEST_CASE("a separable planted dataset scores 100% under both conditions") {
    PlantedFixture fixture;
    Encoder encoder(fixture.backend());
    EvaluateOptions options;
    options.runs = 5;
    options.seed = 123;

    const EvaluationReport vanilla = evaluate(fixture.manifest, fixture.taxonomy, encoder,
                                              Condition::Vanilla, nullptr, options);
    CHECK(vanilla.accuracy == 100.0);
    CHECK(vanilla.n_clips == 100);
    CHECK(vanilla.runs == 5);
    REQUIRE(vanilla.per_run_accuracies.size() == 5);
    for (double a : vanilla.per_run_accuracies) CHECK(a == 100.0);
    CHECK(vanilla.accuracy == vanilla.per_run_accuracies[0]);  // mean of equals, exactly
    CHECK(vanilla.promptset_hash.empty());
    CHECK(vanilla.deterministic_backend);
    CHECK(vanilla.seed == 123);
    CHECK(vanilla.backend_id == "mock");
    CHECK(vanilla.dataset_id == "synthvocal");
    CHECK(vanilla.split == "eval");
    CHECK(vanilla.averaging == "normalize_then_average");

    const PromptSet set = curated_set(8, CategoryId::NonVerbalVocal);
    const EvaluationReport tspe = evaluate(fixture.manifest, fixture.taxonomy, encoder,
                                           Condition::Tspe, &set, options);
    CHECK(tspe.accuracy == 100.0);
    CHECK(tspe.condition == Condition::Tspe);
    CHECK(tspe.promptset_hash == promptset_hash(set));
}

TEST_CASE("an ensemble over the single generic template is the baseline") {
    PlantedFixture fixture(4);
    // Hash-seeded space (no planted labels): predictions are arbitrary but
    // deterministic, so any divergence between the two paths would show.
    MockBackendConfig config;
    config.dimension = 24;
    config.seed = 9;
    Encoder encoder(std::make_shared<MockBackend>(config));
    EvaluateOptions options;
    options.runs = 2;

    const EvaluationReport vanilla = evaluate(fixture.manifest, fixture.taxonomy, encoder,
                                              Condition::Vanilla, nullptr, options);
    const PromptSet single = vanilla_promptset(CategoryId::NonVerbalVocal);
    const EvaluationReport reduced = evaluate(fixture.manifest, fixture.taxonomy, encoder,
                                              Condition::Tspe, &single, options);
    CHECK(reduced.accuracy == vanilla.accuracy);
    CHECK(reduced.per_run_accuracies == vanilla.per_run_accuracies);
}

TEST_CASE("whole evaluations replay bit-identically across processes-worth of state") {
    PlantedFixture fixture(3);
    MockBackendConfig config;
    config.dimension = 12;
    config.seed = 21;
    EvaluateOptions options;
    options.runs = 3;
    const PromptSet set = curated_set(4, CategoryId::NonVerbalVocal);

    Encoder first(std::make_shared<MockBackend>(config));
    const EvaluationReport a = evaluate(fixture.manifest, fixture.taxonomy, first,
                                        Condition::Tspe, &set, options);
    Encoder second(std::make_shared<MockBackend>(config));  // fresh caches, same content
    const EvaluationReport b = evaluate(fixture.manifest, fixture.taxonomy, second,
                                        Condition::Tspe, &set, options);
    CHECK(a.accuracy == b.accuracy);
    CHECK(a.per_run_accuracies == b.per_run_accuracies);
    for (double run : a.per_run_accuracies) CHECK(run == a.per_run_accuracies[0]);

    // Parallel classification must not change a single prediction.
    Encoder third(std::make_shared<MockBackend>(config));
    EvaluateOptions parallel = options;
    parallel.jobs = 4;
    const EvaluationReport c = evaluate(fixture.manifest, fixture.taxonomy, third,
                                        Condition::Tspe, &set, parallel);
    CHECK(c.accuracy == a.accuracy);
    CHECK(c.per_run_accuracies == a.per_run_accuracies);
}

TEST_CASE("the run directory captures everything needed to rerun") {
    PlantedFixture fixture(2);
    Encoder encoder(fixture.backend());
    const auto out = fixture.root() / "runs" / "demo";
    EvaluateOptions options;
    options.runs = 2;
    options.seed = 7;
    options.jobs = 2;
    options.snapshot_extras = {{"config_file", "conf/tspe.json"}};
    options.out_dir = out;

    const PromptSet set = curated_set(3, CategoryId::NonVerbalVocal);
    const EvaluationReport report = evaluate(fixture.manifest, fixture.taxonomy, encoder,
                                             Condition::Tspe, &set, options);

    CHECK_FALSE(std::filesystem::exists(out / "run.lock"));  // released on success
    CHECK(std::filesystem::exists(out / "run1.predictions.tsv"));
    CHECK(std::filesystem::exists(out / "run2.predictions.tsv"));
    CHECK_FALSE(std::filesystem::exists(out / "run3.predictions.tsv"));

    const std::string predictions = tspe_test::read_file(out / "run1.predictions.tsv");
    CHECK(predictions.rfind("clip\tgold\tpredicted\ttop_cosine\n", 0) == 0);
    CHECK(predictions.find("laughter\tlaughter\t") != std::string::npos);

    // Identical inputs, identical classification: the per-run files match.
    CHECK(predictions == tspe_test::read_file(out / "run2.predictions.tsv"));

    const DatasetManifest copy = load_manifest(out / "manifest.tsv", "synthvocal",
                                               fixture.taxonomy, "/");
    CHECK(copy.rows.size() == fixture.manifest.rows.size());

    const auto snapshot = nlohmann::json::parse(tspe_test::read_file(out / "config.json"));
    CHECK(snapshot.at("dataset_id") == "synthvocal");
    CHECK(snapshot.at("backend_id") == "mock");
    CHECK(snapshot.at("condition") == "tspe");
    CHECK(snapshot.at("runs") == 2);
    CHECK(snapshot.at("seed") == 7);
    CHECK(snapshot.at("jobs") == 2);
    CHECK(snapshot.at("averaging") == "normalize_then_average");
    CHECK(snapshot.at("promptset_hash") == promptset_hash(set));
    CHECK(snapshot.at("config_file") == "conf/tspe.json");
    CHECK(snapshot.at("label_order") ==
          nlohmann::json(std::vector<std::string>{"laughter", "sigh", "cough", "sneeze",
                                                  "sniff"}));

    const EvaluationReport loaded = load_report(out / "report.json");
    CHECK(loaded.dataset_id == report.dataset_id);
    CHECK(loaded.backend_id == report.backend_id);
    CHECK(loaded.condition == Condition::Tspe);
    CHECK(loaded.accuracy == report.accuracy);
    CHECK(loaded.per_run_accuracies == report.per_run_accuracies);
    CHECK(loaded.promptset_hash == report.promptset_hash);
    CHECK(loaded.seed == report.seed);
    CHECK(loaded.deterministic_backend == report.deterministic_backend);
}

TEST_CASE("a second evaluation cannot claim an owned run directory") {
    PlantedFixture fixture(1);
    Encoder encoder(fixture.backend());
    const auto out = fixture.root() / "runs" / "locked";
    std::filesystem::create_directories(out);
    tspe_test::write_file(out / "run.lock", "pid 12345\n");

    EvaluateOptions options;
    options.runs = 1;
    options.out_dir = out;
    CHECK_THROWS_AS(evaluate(fixture.manifest, fixture.taxonomy, encoder, Condition::Vanilla,
                             nullptr, options),
                    RunLockError);
    CHECK(std::filesystem::exists(out / "run.lock"));  // the foreign lock stays
}

TEST_CASE("evaluate validates its inputs up front") {
    PlantedFixture fixture(1);
    Encoder encoder(fixture.backend());
    EvaluateOptions options;
    options.runs = 1;

    EvaluateOptions zero_runs = options;
    zero_runs.runs = 0;
    CHECK_THROWS_AS(evaluate(fixture.manifest, fixture.taxonomy, encoder, Condition::Vanilla,
                             nullptr, zero_runs),
                    UsageError);

    DatasetManifest empty = fixture.manifest;
    empty.rows.clear();
    CHECK_THROWS_AS(
        evaluate(empty, fixture.taxonomy, encoder, Condition::Vanilla, nullptr, options),
        ManifestError);

    CHECK_THROWS_WITH_AS(evaluate(fixture.manifest, fixture.taxonomy, encoder, Condition::Tspe,
                                  nullptr, options),
                         doctest::Contains("NonVerbalVocal"), UsageError);

    const PromptSet wrong = vanilla_promptset(CategoryId::MusicGenre);
    CHECK_THROWS_AS(evaluate(fixture.manifest, fixture.taxonomy, encoder, Condition::Tspe,
                             &wrong, options),
                    CategoryMismatch);

    DatasetManifest missing = fixture.manifest;
    missing.rows.push_back({fixture.root() / "clips/ghost.clip", "sigh"});
    CHECK_THROWS_WITH_AS(evaluate(missing, fixture.taxonomy, encoder, Condition::Vanilla,
                                  nullptr, options),
                         doctest::Contains("1 clips missing"), ManifestError);
}

TEST_CASE("compare pairs conditions and reports the delta") {
    const auto vanilla = stub_report("esc50", "msclap2022", Condition::Vanilla, 92.85);
    const auto tspe = stub_report("esc50", "msclap2022", Condition::Tspe, 94.55);
    const CompareResult result = compare(vanilla, tspe);
    CHECK(result.dataset_id == "esc50");
    CHECK(result.backend_id == "msclap2022");
    CHECK(result.delta == doctest::Approx(1.70));
    CHECK(result.vanilla.accuracy == 92.85);
    CHECK(result.tspe.accuracy == 94.55);

    const CompareResult swapped = compare(tspe, vanilla);
    CHECK(swapped.delta == doctest::Approx(-result.delta));

    CHECK_THROWS_AS(compare(stub_report("esc50", "a", Condition::Vanilla, 1),
                            stub_report("gtzan", "a", Condition::Tspe, 2)),
                    MismatchedRuns);
    CHECK_THROWS_AS(compare(stub_report("esc50", "a", Condition::Vanilla, 1),
                            stub_report("esc50", "b", Condition::Tspe, 2)),
                    MismatchedRuns);
}

TEST_CASE("the K sweep reuses nested prefixes and records one point per K") {
    PlantedFixture fixture(2);
    Encoder encoder(fixture.backend());
    const auto pool = attr_candidates(8, CategoryId::NonVerbalVocal);

    EvaluateOptions options;
    options.runs = 1;
    options.out_dir = fixture.root() / "runs" / "sweep";
    const AblationResult result = ablate_k(fixture.manifest, fixture.taxonomy, encoder, pool,
                                           RuleTable{}, {1, 2, 4, 8}, options);
    CHECK(result.dataset_id == "synthvocal");
    CHECK(result.backend_id == "mock");
    REQUIRE(result.points.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(result.points[i].k == std::vector<int>{1, 2, 4, 8}[i]);
        CHECK(result.points[i].accuracy == 100.0);  // planted: separable at every K
    }

    const std::string tsv = tspe_test::read_file(options.out_dir / "ablation.tsv");
    CHECK(tsv ==
          "k\taccuracy\n"
          "1\t100.00\n"
          "2\t100.00\n"
          "4\t100.00\n"
          "8\t100.00\n");
    CHECK_FALSE(std::filesystem::exists(options.out_dir / "run.lock"));

    CHECK_THROWS_AS(ablate_k(fixture.manifest, fixture.taxonomy, encoder, pool, RuleTable{},
                             {5, 5}, options),
                    UsageError);
    CHECK_THROWS_AS(ablate_k(fixture.manifest, fixture.taxonomy, encoder, pool, RuleTable{},
                             {10, 5}, options),
                    UsageError);
    CHECK_THROWS_AS(ablate_k(fixture.manifest, fixture.taxonomy, encoder, pool, RuleTable{}, {},
                             options),
                    UsageError);
    CHECK_THROWS_AS(ablate_k(fixture.manifest, fixture.taxonomy, encoder, pool, RuleTable{},
                             {4, 9}, options),
                    InsufficientCandidates);
}

TEST_CASE("the report table groups by category and stars the best condition") {
    const Taxonomy taxonomy = Taxonomy::load(tspe_test::data_dir() / "taxonomy.json");
    std::vector<EvaluationReport> reports;
    const std::vector<std::pair<std::string, std::string>> cells = {
        {"beijing_opera", "MusicalInstruments"},
        {"esc50", "AcousticScene"},
        {"gtzan", "MusicGenre"},
        {"sesa", "ImpactEmergency"},
        {"vocalsound", "NonVerbalVocal"},
    };
    for (const auto& [dataset, category] : cells) {
        for (const std::string backend : {"msclap2022", "msclap2023"}) {
            double vanilla = 70.0, tspe = 80.0;
            if (dataset == "esc50" && backend == "msclap2022") {
                vanilla = 92.85;
                tspe = 94.55;
            }
            if (dataset == "gtzan") vanilla = tspe = 50.0;  // tie: both get the star
            reports.push_back(stub_report(dataset, backend, Condition::Vanilla, vanilla));
            reports.push_back(stub_report(dataset, backend, Condition::Tspe, tspe));
        }
    }

    const ReportTable table = report_table(reports, taxonomy);

    const auto mi = table.human.find("== Musical Instruments Recognition ==");
    const auto as = table.human.find("== Acoustic Scene Understanding ==");
    const auto mg = table.human.find("== Music Genre Classification ==");
    REQUIRE(mi != std::string::npos);
    REQUIRE(as != std::string::npos);
    REQUIRE(mg != std::string::npos);
    CHECK(mi < as);
    CHECK(as < mg);
    CHECK(table.human.find("msclap2022 van") != std::string::npos);
    CHECK(table.human.find("msclap2023 tspe") != std::string::npos);
    CHECK(table.human.find("94.55*") != std::string::npos);
    CHECK(table.human.find("92.85*") == std::string::npos);  // loser stays unstarred

    // The tie row stars both conditions.
    const auto gtzan_row = table.human.find("\ngtzan");
    REQUIRE(gtzan_row != std::string::npos);
    const std::string row = table.human.substr(gtzan_row, table.human.find('\n', gtzan_row + 1) -
                                                              gtzan_row);
    CHECK(row.find("50.00*") != std::string::npos);
    CHECK(row.find("50.00 ") == std::string::npos);

    CHECK(table.csv.rfind("category,dataset,backend,condition,accuracy,runs,n_clips,best\n", 0) ==
          0);
    CHECK(table.csv.find("AcousticScene,esc50,msclap2022,tspe,94.55,5,400,1\n") !=
          std::string::npos);
    CHECK(table.csv.find("AcousticScene,esc50,msclap2022,vanilla,92.85,5,400,0\n") !=
          std::string::npos);
    CHECK(table.csv.find("MusicGenre,gtzan,msclap2022,vanilla,50.00,5,400,1\n") !=
          std::string::npos);
    // Header plus one row per report.
    CHECK(static_cast<std::size_t>(std::count(table.csv.begin(), table.csv.end(), '\n')) ==
          1 + reports.size());

    CHECK_THROWS_AS(report_table({}, taxonomy), UsageError);
    CHECK_THROWS_AS(report_table({stub_report("madeup", "b", Condition::Vanilla, 1)}, taxonomy),
                    UnknownDataset);
}

TEST_CASE("reports round-trip through disk and reject foreign files") {
    tspe_test::TempDir tmp;
    EvaluationReport report = stub_report("esc50", "mock", Condition::Tspe, 93.3);
    report.promptset_hash = "abc123";
    report.seed = 42;
    report.deterministic_backend = false;

    const auto path = tmp.path() / "report.json";
    save_report(path, report);
    const EvaluationReport back = load_report(path);
    CHECK(back.dataset_id == report.dataset_id);
    CHECK(back.condition == report.condition);
    CHECK(back.accuracy == report.accuracy);
    CHECK(back.per_run_accuracies == report.per_run_accuracies);
    CHECK(back.promptset_hash == "abc123");
    CHECK(back.seed == 42);
    CHECK(back.deterministic_backend == false);
    CHECK(back.timestamp == report.timestamp);

    tspe_test::write_file(path, R"({"format": "tspe-promptset-v1"})");
    CHECK_THROWS_AS(load_report(path), ConfigError);
    CHECK_THROWS_AS(load_report(tmp.path() / "none.json"), ConfigError);

    CHECK(condition_from_name("vanilla") == Condition::Vanilla);
    CHECK(condition_from_name("tspe") == Condition::Tspe);
    CHECK_FALSE(condition_from_name("baseline").has_value());
    CHECK(condition_name(Condition::Tspe) == "tspe");
}
