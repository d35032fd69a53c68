#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tspe/categories.hpp"

namespace tspe {

struct DatasetDescriptor {
    std::string dataset_id;
    CategoryId category = CategoryId::MusicalInstruments;
    std::string manifest_path;
    std::vector<std::string> class_labels;  // stable order; defines tie-breaking downstream
};

struct LabelEntry {
    std::string label_id;
    std::string display_text;  // normalized form used in prompts
    std::string dataset_id;
};

// Dataset -> category mapping plus the label registry, loaded once from the
// taxonomy configuration file. Read-only after load.
class Taxonomy {
public:
    static Taxonomy load(const std::filesystem::path& path);
    static Taxonomy from_json_text(std::string_view text, const std::string& source_name);

    CategoryId category_of(std::string_view dataset_id) const;
    const std::vector<std::string>& labels_of(std::string_view dataset_id) const;
    const DatasetDescriptor& dataset(std::string_view dataset_id) const;
    bool has_dataset(std::string_view dataset_id) const;

    // Normalized display text for a label of a dataset. Throws UnknownDataset
    // or ManifestError for an unregistered label.
    const std::string& display_text(std::string_view dataset_id, std::string_view label_id) const;

    const std::vector<DatasetDescriptor>& datasets() const { return datasets_; }
    const std::vector<LabelEntry>& registry() const { return registry_; }

private:
    std::vector<DatasetDescriptor> datasets_;            // configuration order
    std::map<std::string, std::size_t> index_;           // lowercase id -> datasets_ index
    std::vector<LabelEntry> registry_;
    std::map<std::pair<std::string, std::string>, std::size_t> label_index_;

    std::size_t find(std::string_view dataset_id) const;
};

}  // namespace tspe
