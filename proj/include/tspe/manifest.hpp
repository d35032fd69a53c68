#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tspe/taxonomy.hpp"

namespace tspe {

struct ManifestRow {
    std::filesystem::path clip_path;  // resolved against the dataset root
    std::string label_id;
};

struct DatasetManifest {
    std::string dataset_id;
    std::string split;
    std::vector<ManifestRow> rows;
};

// Reads a tab-separated manifest with header "clip_path<TAB>label". Paths
// are resolved against `dataset_root`; every label must be registered for
// the dataset and clip paths must be unique. Throws ManifestError with the
// offending line number.
DatasetManifest load_manifest(const std::filesystem::path& manifest_path,
                              const std::string& dataset_id, const Taxonomy& taxonomy,
                              const std::filesystem::path& dataset_root,
                              const std::string& split = "eval");

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest,
                   const std::filesystem::path& dataset_root);

}  // namespace tspe
