#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace tspe {

// The five task categories. Fixed at compile time; datasets map onto them
// through the taxonomy configuration.
enum class CategoryId {
    MusicalInstruments,
    AcousticScene,
    MusicGenre,
    ImpactEmergency,
    NonVerbalVocal,
};

inline constexpr std::array<CategoryId, 5> kAllCategories = {
    CategoryId::MusicalInstruments, CategoryId::AcousticScene,
    CategoryId::MusicGenre,         CategoryId::ImpactEmergency,
    CategoryId::NonVerbalVocal,
};

struct TaskCategory {
    CategoryId id;
    std::string name;         // display name
    std::string description;  // one-paragraph summary fed to prompt generators
    std::string attribute_pool_ref;
    std::string source_pool_ref;
};

std::string_view category_id_string(CategoryId id);
std::optional<CategoryId> category_from_string(std::string_view s);
const TaskCategory& category_info(CategoryId id);

}  // namespace tspe
