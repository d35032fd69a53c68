#include "tspe/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

#include "CLI11.hpp"
#include "tspe/backends.hpp"
#include "tspe/config.hpp"
#include "tspe/curation.hpp"
#include "tspe/errors.hpp"
#include "tspe/evalharness.hpp"
#include "tspe/hash.hpp"
#include "tspe/promptgen.hpp"
#include "tspe/remote_generator.hpp"

namespace tspe {
namespace {

// Options shared by every subcommand.
struct GlobalArgs {
    std::string config_path;
    std::string cache_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 0;
    bool verbose = false;
};

void vlog(const GlobalArgs& global, const std::string& line) {
    if (global.verbose) std::cerr << "tspe " << line << '\n';
}

RunConfig effective_config(const GlobalArgs& global) {
    RunConfig config;
    if (!global.config_path.empty()) config = RunConfig::load(global.config_path);
    if (!global.cache_dir.empty()) config.cache_dir = global.cache_dir;
    if (global.seed_set) config.seed = global.seed;
    if (global.jobs > 0) config.jobs = global.jobs;
    if (config.jobs <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        config.jobs = hw == 0 ? 1 : static_cast<int>(hw);
    }
    return config;
}

CategoryId parse_category(const std::string& raw) {
    const auto id = category_from_string(raw);
    if (!id) {
        std::string known;
        for (CategoryId c : kAllCategories) {
            if (!known.empty()) known += ", ";
            known += category_id_string(c);
        }
        throw ConfigError("unknown category '" + raw + "' (known: " + known + ")");
    }
    return *id;
}

std::unique_ptr<GeneratorBackend> make_generator(const std::string& kind,
                                                 const RunConfig& config, std::uint64_t seed) {
    if (kind == "offline") return std::make_unique<OfflineGenerator>(seed);
    if (kind == "remote") {
        if (config.generator.endpoint.empty())
            throw ConfigError("remote generation needs generator.endpoint in the config "
                              "or --endpoint");
        RemoteGeneratorConfig remote;
        remote.endpoint = config.generator.endpoint;
        remote.model = config.generator.model;
        remote.api_key_env = config.generator.api_key_env;
        return std::make_unique<RemoteGenerator>(remote);
    }
    throw ConfigError("unknown generator backend '" + kind + "' (known: offline, remote)");
}

struct DatasetContext {
    Taxonomy taxonomy;
    DatasetManifest manifest;
};

DatasetContext load_dataset_context(const RunConfig& config, const std::string& dataset_arg,
                                    const std::string& manifest_flag,
                                    const std::string& root_flag, const std::string& split) {
    config.validate_paths();
    DatasetContext ctx{Taxonomy::load(config.taxonomy_path), {}};
    if (!ctx.taxonomy.has_dataset(dataset_arg))
        throw UnknownDataset("dataset '" + dataset_arg + "' is not in the taxonomy");
    const DatasetDescriptor& descriptor = ctx.taxonomy.dataset(dataset_arg);

    std::filesystem::path root;
    if (!root_flag.empty()) {
        root = root_flag;
    } else if (auto it = config.dataset_roots.find(descriptor.dataset_id);
               it != config.dataset_roots.end()) {
        root = it->second;
    } else {
        throw ConfigError("no dataset root configured for '" + descriptor.dataset_id +
                          "'; set dataset_roots in the config or pass --dataset-root");
    }

    std::filesystem::path manifest_path;
    if (!manifest_flag.empty()) {
        manifest_path = manifest_flag;
    } else {
        manifest_path = descriptor.manifest_path;
        if (manifest_path.is_relative()) manifest_path = root / manifest_path;
    }
    ctx.manifest =
        load_manifest(manifest_path, descriptor.dataset_id, ctx.taxonomy, root, split);
    return ctx;
}

AveragingOrder parse_averaging(const std::string& raw) {
    if (raw == "normalized") return AveragingOrder::NormalizeThenAverage;
    if (raw == "raw") return AveragingOrder::AverageRawThenNormalize;
    throw ConfigError("unknown averaging order '" + raw + "' (known: normalized, raw)");
}

void add_gen_pools(CLI::App& gen, GlobalArgs& global) {
    auto* cmd = gen.add_subcommand("pools", "generate the global attribute and source pools");
    cmd->fallthrough();
    auto backend = std::make_shared<std::string>("offline");
    auto out = std::make_shared<std::string>();
    auto n_attributes = std::make_shared<int>(30);
    auto n_sources = std::make_shared<int>(30);
    auto endpoint = std::make_shared<std::string>();
    auto model = std::make_shared<std::string>();
    cmd->add_option("--backend", *backend, "generator: offline or remote")
        ->check(CLI::IsMember({"offline", "remote"}));
    cmd->add_option("--out", *out, "pool file to write")->required();
    cmd->add_option("--n-attributes", *n_attributes, "attribute pool size");
    cmd->add_option("--n-sources", *n_sources, "source pool size");
    cmd->add_option("--endpoint", *endpoint, "remote generator endpoint");
    cmd->add_option("--model", *model, "remote generator model name");
    cmd->callback([&global, backend, out, n_attributes, n_sources, endpoint, model] {
        RunConfig config = effective_config(global);
        if (!endpoint->empty()) config.generator.endpoint = *endpoint;
        if (!model->empty()) config.generator.model = *model;
        const auto generator = make_generator(*backend, config, config.seed);
        std::vector<std::string> descriptions;
        for (CategoryId c : kAllCategories) descriptions.push_back(category_info(c).description);
        GenerationReport report;
        PoolPair pools = generate_pools(descriptions, *generator, *n_attributes, *n_sources,
                                        &report);
        pools.seed = config.seed;
        save_pools(*out, pools);
        vlog(global, "event=pools_written rounds=" + std::to_string(report.rounds));
        std::cout << "pools written out=" << *out
                  << " attributes=" << pools.attributes.attributes.size()
                  << " sources=" << pools.sources.sources.size() << " rounds=" << report.rounds
                  << '\n';
    });
}

void add_gen_prompts(CLI::App& gen, GlobalArgs& global) {
    auto* cmd = gen.add_subcommand("prompts", "generate prompt candidates for one category");
    cmd->fallthrough();
    auto category = std::make_shared<std::string>();
    auto pools_path = std::make_shared<std::string>();
    auto count = std::make_shared<int>(40);
    auto backend = std::make_shared<std::string>("offline");
    auto out = std::make_shared<std::string>();
    auto endpoint = std::make_shared<std::string>();
    auto model = std::make_shared<std::string>();
    cmd->add_option("--category", *category, "task category id")->required();
    cmd->add_option("--pools", *pools_path, "category pools file")->required();
    cmd->add_option("--n", *count, "number of candidates");
    cmd->add_option("--backend", *backend, "generator: offline or remote")
        ->check(CLI::IsMember({"offline", "remote"}));
    cmd->add_option("--out", *out, "candidate file to write")->required();
    cmd->add_option("--endpoint", *endpoint, "remote generator endpoint");
    cmd->add_option("--model", *model, "remote generator model name");
    cmd->callback([&global, category, pools_path, count, backend, out, endpoint, model] {
        RunConfig config = effective_config(global);
        if (!endpoint->empty()) config.generator.endpoint = *endpoint;
        if (!model->empty()) config.generator.model = *model;
        const CategoryId id = parse_category(*category);
        const PoolRegistry registry = PoolRegistry::load(*pools_path);
        const auto generator = make_generator(*backend, config, config.seed);
        GenerationReport report;
        CandidateFile file;
        file.category = id;
        file.backend = generator->name();
        file.seed = config.seed;
        file.candidates = generate_candidates(category_info(id), registry.for_category(id),
                                              *count, *generator, &report);
        file.report = report;
        save_candidates(*out, file);
        std::cout << "candidates written out=" << *out << " n=" << file.candidates.size()
                  << " rounds=" << report.rounds << " rejected_parse=" << report.rejected_parse
                  << " rejected_pool=" << report.rejected_pool << '\n';
    });
}

void add_curate(CLI::App& app, GlobalArgs& global) {
    auto* cmd = app.add_subcommand("curate", "filter candidates down to a prompt set");
    cmd->fallthrough();
    auto category = std::make_shared<std::string>();
    auto k = std::make_shared<int>(20);
    auto mode = std::make_shared<std::string>("interactive");
    auto in_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto rules_path = std::make_shared<std::string>();
    auto reviewer = std::make_shared<std::string>();
    cmd->add_option("--category", *category, "task category id")->required();
    cmd->add_option("--k", *k, "prompts to keep");
    cmd->add_option("--mode", *mode, "interactive (terminal review) or auto (first K survivors)")
        ->check(CLI::IsMember({"interactive", "auto"}));
    cmd->add_option("--in", *in_path, "candidate file")->required();
    cmd->add_option("--out", *out_path, "prompt set file to write")->required();
    cmd->add_option("--rules", *rules_path, "compatibility rule table");
    cmd->add_option("--reviewer", *reviewer, "reviewer name recorded in the prompt set");
    cmd->callback([&global, category, k, mode, in_path, out_path, rules_path, reviewer] {
        const CategoryId id = parse_category(*category);
        const CandidateFile candidates = load_candidates(*in_path);
        if (candidates.category != id)
            throw ConfigError("candidate file is for category '" +
                              std::string(category_id_string(candidates.category)) + "', not '" +
                              *category + "'");
        const RuleTable rules =
            rules_path->empty() ? RuleTable() : RuleTable::load(*rules_path);

        CurationOptions options;
        options.k = *k;
        options.mode = *mode == "auto" ? CurationMode::Auto : CurationMode::Interactive;
        options.created_from = sha256_hex_file(*in_path);
        if (!reviewer->empty()) {
            options.reviewer = *reviewer;
        } else if (options.mode == CurationMode::Interactive) {
            const char* user = std::getenv("USER");
            options.reviewer = (user != nullptr && *user != '\0') ? user : "reviewer";
        }
        options.input = &std::cin;
        options.output = &std::cout;
        const std::string transcript_path = *out_path + ".transcript.txt";
        std::ofstream transcript(transcript_path);
        if (!transcript) throw ConfigError("cannot write transcript: " + transcript_path);
        options.transcript = &transcript;

        const PromptSet set = curate(candidates.candidates, rules, options);
        save_promptset(*out_path, set);
        vlog(global, "event=promptset_written k=" + std::to_string(set.k));
        std::cout << "prompt set written out=" << *out_path << " k=" << set.k
                  << " hash=" << promptset_hash(set) << " transcript=" << transcript_path
                  << '\n';
    });
}

void add_eval(CLI::App& app, GlobalArgs& global) {
    auto* cmd = app.add_subcommand("eval", "zero-shot evaluation of one dataset");
    cmd->fallthrough();
    auto dataset = std::make_shared<std::string>();
    auto backend_id = std::make_shared<std::string>("mock");
    auto condition_raw = std::make_shared<std::string>();
    auto promptset_path = std::make_shared<std::string>();
    auto runs = std::make_shared<int>(5);
    auto out_dir = std::make_shared<std::string>();
    auto manifest_flag = std::make_shared<std::string>();
    auto root_flag = std::make_shared<std::string>();
    auto split = std::make_shared<std::string>("eval");
    auto averaging = std::make_shared<std::string>("normalized");
    cmd->add_option("--dataset", *dataset, "dataset id")->required();
    cmd->add_option("--backend", *backend_id, "encoder backend id");
    cmd->add_option("--condition", *condition_raw, "vanilla or tspe")
        ->required()
        ->check(CLI::IsMember({"vanilla", "tspe"}));
    cmd->add_option("--promptset", *promptset_path, "prompt set file (tspe condition)");
    cmd->add_option("--runs", *runs, "number of runs to average");
    cmd->add_option("--out", *out_dir, "run directory");
    cmd->add_option("--manifest", *manifest_flag, "manifest path override");
    cmd->add_option("--dataset-root", *root_flag, "dataset root override");
    cmd->add_option("--split", *split, "split name recorded in the report");
    cmd->add_option("--averaging", *averaging, "ensemble averaging order: normalized or raw")
        ->check(CLI::IsMember({"normalized", "raw"}));
    cmd->callback([&global, dataset, backend_id, condition_raw, promptset_path, runs, out_dir,
                   manifest_flag, root_flag, split, averaging] {
        const RunConfig config = effective_config(global);
        const DatasetContext ctx =
            load_dataset_context(config, *dataset, *manifest_flag, *root_flag, *split);
        const Condition condition = *condition_from_name(*condition_raw);

        Encoder encoder(make_backend(*backend_id, config), config.cache_dir);
        std::optional<PromptSet> promptset;
        if (!promptset_path->empty()) promptset = load_promptset(*promptset_path);

        EvaluateOptions options;
        options.runs = *runs;
        options.seed = config.seed;
        options.jobs = config.jobs;
        options.order = parse_averaging(*averaging);
        options.out_dir = out_dir->empty()
                              ? config.out_dir / (ctx.manifest.dataset_id + "-" + *backend_id +
                                                  "-" + *condition_raw)
                              : std::filesystem::path(*out_dir);
        if (!global.config_path.empty()) options.snapshot_extras["config_file"] = global.config_path;
        if (!promptset_path->empty()) options.snapshot_extras["promptset_file"] = *promptset_path;

        vlog(global, "event=eval_start dataset=" + ctx.manifest.dataset_id +
                         " backend=" + *backend_id + " condition=" + *condition_raw);
        const EvaluationReport report =
            evaluate(ctx.manifest, ctx.taxonomy, encoder, condition,
                     promptset ? &*promptset : nullptr, options);
        std::cout << "dataset=" << report.dataset_id << " backend=" << report.backend_id
                  << " condition=" << condition_name(report.condition) << " accuracy=";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", report.accuracy);
        std::cout << buf << " runs=" << report.runs << " n_clips=" << report.n_clips
                  << " out=" << options.out_dir.string() << '\n';
    });
}

void add_ablate(CLI::App& app, GlobalArgs& global) {
    auto* cmd = app.add_subcommand("ablate", "sweep the ensemble size K");
    cmd->fallthrough();
    auto dataset = std::make_shared<std::string>();
    auto backend_id = std::make_shared<std::string>("mock");
    auto candidates_path = std::make_shared<std::string>();
    auto rules_path = std::make_shared<std::string>();
    auto ks = std::make_shared<std::vector<int>>(std::vector<int>{5, 10, 15, 20, 25, 30});
    auto runs = std::make_shared<int>(5);
    auto out_dir = std::make_shared<std::string>();
    auto manifest_flag = std::make_shared<std::string>();
    auto root_flag = std::make_shared<std::string>();
    cmd->add_option("--dataset", *dataset, "dataset id")->required();
    cmd->add_option("--backend", *backend_id, "encoder backend id");
    cmd->add_option("--candidates", *candidates_path, "candidate pool file")->required();
    cmd->add_option("--rules", *rules_path, "compatibility rule table");
    cmd->add_option("--ks", *ks, "K values, ascending")->delimiter(',');
    cmd->add_option("--runs", *runs, "runs per point");
    cmd->add_option("--out", *out_dir, "output directory for the sweep file");
    cmd->add_option("--manifest", *manifest_flag, "manifest path override");
    cmd->add_option("--dataset-root", *root_flag, "dataset root override");
    cmd->callback([&global, dataset, backend_id, candidates_path, rules_path, ks, runs, out_dir,
                   manifest_flag, root_flag] {
        const RunConfig config = effective_config(global);
        const DatasetContext ctx =
            load_dataset_context(config, *dataset, *manifest_flag, *root_flag, "eval");
        const CandidateFile candidates = load_candidates(*candidates_path);
        const RuleTable rules =
            rules_path->empty() ? RuleTable() : RuleTable::load(*rules_path);
        Encoder encoder(make_backend(*backend_id, config), config.cache_dir);

        EvaluateOptions options;
        options.runs = *runs;
        options.seed = config.seed;
        options.jobs = config.jobs;
        options.out_dir = out_dir->empty()
                              ? config.out_dir / ("ablation-" + ctx.manifest.dataset_id + "-" +
                                                  *backend_id)
                              : std::filesystem::path(*out_dir);
        const AblationResult result = ablate_k(ctx.manifest, ctx.taxonomy, encoder,
                                               candidates.candidates, rules, *ks, options);
        for (const AblationPoint& p : result.points) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.2f", p.accuracy);
            std::cout << "k=" << p.k << " accuracy=" << buf << '\n';
        }
        std::cout << "sweep written out=" << (options.out_dir / "ablation.tsv").string() << '\n';
    });
}

void add_report(CLI::App& app, GlobalArgs& global) {
    auto* cmd = app.add_subcommand("report", "tabulate evaluation reports");
    cmd->fallthrough();
    auto in_dir = std::make_shared<std::string>();
    auto format = std::make_shared<std::string>("table");
    cmd->add_option("--in", *in_dir, "directory holding run directories")->required();
    cmd->add_option("--format", *format, "stdout format")
        ->check(CLI::IsMember({"table", "csv"}));
    cmd->callback([&global, in_dir, format] {
        const RunConfig config = effective_config(global);
        config.validate_paths();
        const Taxonomy taxonomy = Taxonomy::load(config.taxonomy_path);

        std::vector<EvaluationReport> reports;
        for (const auto& entry : std::filesystem::recursive_directory_iterator(*in_dir))
            if (entry.is_regular_file() && entry.path().filename() == "report.json")
                reports.push_back(load_report(entry.path()));
        if (reports.empty())
            throw ConfigError("no report.json files under " + *in_dir);

        const ReportTable table = report_table(reports, taxonomy);
        const std::filesystem::path base(*in_dir);
        std::ofstream human(base / "table.txt");
        human << table.human;
        std::ofstream csv(base / "table.csv");
        csv << table.csv;
        vlog(global, "event=report_written reports=" + std::to_string(reports.size()));
        std::cout << (*format == "csv" ? table.csv : table.human);
    });
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"task-specific prompt ensembles for zero-shot audio classification"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalArgs global;
    app.add_option("--config", global.config_path, "config file (tspe-config-v1)");
    app.add_option("--cache-dir", global.cache_dir, "embedding cache directory");
    app.add_option("--seed", global.seed, "64-bit seed")->each([&global](const std::string&) {
        global.seed_set = true;
    });
    app.add_option("--jobs", global.jobs, "parallelism for per-clip work");
    app.add_flag("--verbose", global.verbose, "structured key=value logging to stderr");

    auto* gen = app.add_subcommand("gen", "generation: term pools and prompt candidates");
    gen->require_subcommand(1);
    gen->fallthrough();
    add_gen_pools(*gen, global);
    add_gen_prompts(*gen, global);
    add_curate(app, global);
    add_eval(app, global);
    add_ablate(app, global);
    add_report(app, global);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "UsageError: " << e.what() << "\nrun 'tspe --help' for usage\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: InternalError: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace tspe
