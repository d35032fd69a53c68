#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "tspe/manifest.hpp"
#include "tspe/mock_backend.hpp"
#include "tspe/taxonomy.hpp"

namespace tspe_test {

inline std::filesystem::path data_dir() { return TSPE_DATA_DIR; }

class TempDir {
public:
    TempDir() {
        static std::mt19937_64 rng(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() /
                ("tspe-test-" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// A five-class synthetic dataset wired for planted-mode evaluation: clip
// files mention their class label, so the planted mock backend scores them
// perfectly separable.
struct PlantedFixture {
    std::vector<std::string> labels = {"laughter", "sigh", "cough", "sneeze", "sniff"};
    TempDir dir;
    tspe::Taxonomy taxonomy;
    tspe::DatasetManifest manifest;
    tspe::MockBackendConfig mock;

    explicit PlantedFixture(int clips_per_class = 20) {
        const std::string json = R"({
          "format": "tspe-taxonomy-v1",
          "datasets": [{
            "dataset_id": "synthvocal",
            "category": "NonVerbalVocal",
            "manifest_path": "manifests/eval.tsv",
            "labels": ["laughter", "sigh", "cough", "sneeze", "sniff"]
          }]
        })";
        taxonomy = tspe::Taxonomy::from_json_text(json, "planted-fixture");

        std::string manifest_text = "clip_path\tlabel\n";
        for (const std::string& label : labels) {
            for (int i = 0; i < clips_per_class; ++i) {
                const std::string rel =
                    "clips/" + label + "_" + std::to_string(i) + ".clip";
                write_file(root() / rel, "synthetic recording " + std::to_string(i) +
                                             " of " + label + "\n");
                manifest_text += rel + "\t" + label + "\n";
            }
        }
        write_file(root() / "manifests/eval.tsv", manifest_text);
        manifest = tspe::load_manifest(root() / "manifests/eval.tsv", "synthvocal", taxonomy,
                                       root());

        mock.dimension = 16;
        mock.planted_labels = labels;
        mock.seed = 7;
    }

    const std::filesystem::path& root() const { return dir.path(); }
    std::shared_ptr<tspe::MockBackend> backend() const {
        return std::make_shared<tspe::MockBackend>(mock);
    }
};

}  // namespace tspe_test
