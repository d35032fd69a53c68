#include "tspe/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "tspe/errors.hpp"

namespace tspe {

DatasetManifest load_manifest(const std::filesystem::path& manifest_path,
                              const std::string& dataset_id, const Taxonomy& taxonomy,
                              const std::filesystem::path& dataset_root,
                              const std::string& split) {
    if (!taxonomy.has_dataset(dataset_id))
        throw UnknownDataset("dataset '" + dataset_id + "' is not registered");
    std::ifstream in(manifest_path);
    if (!in) throw ManifestError("cannot open manifest: " + manifest_path.string());

    const std::vector<std::string>& labels = taxonomy.labels_of(dataset_id);
    const std::set<std::string> known_labels(labels.begin(), labels.end());

    DatasetManifest manifest;
    manifest.dataset_id = dataset_id;
    manifest.split = split;

    auto fail = [&](std::size_t line_no, const std::string& what) {
        throw ManifestError(manifest_path.string() + ":" + std::to_string(line_no) + ": " + what);
    };

    std::string line;
    std::size_t line_no = 0;
    std::set<std::string> seen_paths;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) fail(line_no, "expected two tab-separated columns");
        const std::string first = line.substr(0, tab);
        const std::string second = line.substr(tab + 1);
        if (!saw_header) {
            if (first != "clip_path" || second != "label")
                fail(line_no, "expected header 'clip_path<TAB>label'");
            saw_header = true;
            continue;
        }
        if (first.empty()) fail(line_no, "empty clip path");
        if (second.empty()) fail(line_no, "empty label");
        if (!known_labels.contains(second))
            fail(line_no, "label '" + second + "' is not registered for dataset '" + dataset_id +
                              "'");
        if (!seen_paths.insert(first).second) fail(line_no, "duplicate clip path: " + first);
        manifest.rows.push_back({dataset_root / first, second});
    }
    if (!saw_header) throw ManifestError(manifest_path.string() + ": empty manifest");
    return manifest;
}

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest,
                   const std::filesystem::path& dataset_root) {
    std::ofstream out(path);
    if (!out) throw ManifestError("cannot write manifest: " + path.string());
    out << "clip_path\tlabel\n";
    for (const ManifestRow& row : manifest.rows) {
        const std::string rel =
            std::filesystem::relative(row.clip_path, dataset_root).generic_string();
        out << rel << '\t' << row.label_id << '\n';
    }
}

}  // namespace tspe
