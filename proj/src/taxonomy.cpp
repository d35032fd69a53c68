#include "tspe/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "tspe/articles.hpp"
#include "tspe/errors.hpp"

namespace tspe {

namespace {

std::string lower_id(std::string_view id) {
    std::string out(id);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

Taxonomy Taxonomy::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open taxonomy file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str(), path.string());
}

Taxonomy Taxonomy::from_json_text(std::string_view text, const std::string& source_name) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // nlohmann reports line/column in the message.
        throw ConfigError(source_name + ": " + e.what());
    }

    Taxonomy t;
    try {
        if (j.at("format").get<std::string>() != "tspe-taxonomy-v1") {
            throw ConfigError(source_name + ": unexpected format field");
        }
        const auto& datasets = j.at("datasets");
        if (!datasets.is_array() || datasets.empty()) {
            throw ConfigError(source_name + ": 'datasets' must be a non-empty list");
        }
        for (std::size_t i = 0; i < datasets.size(); ++i) {
            const auto& d = datasets[i];
            const std::string where = source_name + ": datasets[" + std::to_string(i) + "]";
            DatasetDescriptor desc;
            desc.dataset_id = lower_id(d.at("dataset_id").get<std::string>());
            if (desc.dataset_id.empty()) {
                throw ConfigError(where + ".dataset_id is empty");
            }
            const std::string cat = d.at("category").get<std::string>();
            const auto id = category_from_string(cat);
            if (!id) {
                throw ConfigError(where + ".category unknown: '" + cat + "'");
            }
            desc.category = *id;
            desc.manifest_path = d.at("manifest_path").get<std::string>();
            desc.class_labels = d.at("labels").get<std::vector<std::string>>();
            if (desc.class_labels.empty()) {
                throw ConfigError(where + ".labels is empty");
            }
            std::unordered_set<std::string> seen;
            for (const auto& label : desc.class_labels) {
                if (!seen.insert(label).second) {
                    throw ConfigError(where + ".labels has duplicate: '" + label + "'");
                }
                const std::string display = normalize_label(label);
                if (display.empty()) {
                    throw ConfigError(where + ".labels has empty label");
                }
                if (display.find('<') != std::string::npos ||
                    display.find('>') != std::string::npos) {
                    throw ConfigError(where + ".labels contains slot markers: '" + label + "'");
                }
                t.label_index_.emplace(std::make_pair(desc.dataset_id, label),
                                       t.registry_.size());
                t.registry_.push_back(LabelEntry{label, display, desc.dataset_id});
            }
            if (t.index_.count(desc.dataset_id) > 0) {
                throw ConfigError(where + ".dataset_id duplicated: '" + desc.dataset_id + "'");
            }
            t.index_.emplace(desc.dataset_id, t.datasets_.size());
            t.datasets_.push_back(std::move(desc));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(source_name + ": " + e.what());
    }
    return t;
}

std::size_t Taxonomy::find(std::string_view dataset_id) const {
    const auto it = index_.find(lower_id(dataset_id));
    if (it == index_.end()) {
        throw UnknownDataset("dataset not registered in taxonomy: '" + std::string(dataset_id) +
                             "'");
    }
    return it->second;
}

CategoryId Taxonomy::category_of(std::string_view dataset_id) const {
    return datasets_[find(dataset_id)].category;
}

const std::vector<std::string>& Taxonomy::labels_of(std::string_view dataset_id) const {
    return datasets_[find(dataset_id)].class_labels;
}

const DatasetDescriptor& Taxonomy::dataset(std::string_view dataset_id) const {
    return datasets_[find(dataset_id)];
}

bool Taxonomy::has_dataset(std::string_view dataset_id) const {
    return index_.count(lower_id(dataset_id)) > 0;
}

const std::string& Taxonomy::display_text(std::string_view dataset_id,
                                          std::string_view label_id) const {
    const auto& desc = dataset(dataset_id);
    const auto it = label_index_.find(std::make_pair(desc.dataset_id, std::string(label_id)));
    if (it == label_index_.end()) {
        throw ManifestError("label '" + std::string(label_id) + "' not registered for dataset '" +
                            desc.dataset_id + "'");
    }
    return registry_[it->second].display_text;
}

}  // namespace tspe
