#include "tspe/categories.hpp"

namespace tspe {

namespace {

const std::array<TaskCategory, 5>& category_table() {
    static const std::array<TaskCategory, 5> table = {{
        {CategoryId::MusicalInstruments,
         "Musical Instruments Recognition",
         "Sounds of musical instruments such as piano, guitar, cymbals and "
         "drums, played in settings like operas, street performances and "
         "theaters.",
         "musical_instruments.attributes", "musical_instruments.sources"},
        {CategoryId::AcousticScene,
         "Acoustic Scene Understanding",
         "Common urban and everyday sounds: vehicles, jackhammers, dog barks, "
         "sirens, church bells, birds, offices, cafes, beaches and streets.",
         "acoustic_scene.attributes", "acoustic_scene.sources"},
        {CategoryId::MusicGenre,
         "Music Genre Classification",
         "Music samples from distinct genres such as classical, country, "
         "disco, hip-hop and blues.",
         "music_genre.attributes", "music_genre.sources"},
        {CategoryId::ImpactEmergency,
         "Impact and Emergency Sound",
         "Loud, sudden sounds such as explosions, gunshots and sirens.",
         "impact_emergency.attributes", "impact_emergency.sources"},
        {CategoryId::NonVerbalVocal,
         "Non-Verbal Vocalization Sound",
         "Non-verbal vocal sounds such as coughing, sneezing, throat "
         "clearing, sniffing, sighing and laughter.",
         "non_verbal_vocal.attributes", "non_verbal_vocal.sources"},
    }};
    return table;
}

}  // namespace

std::string_view category_id_string(CategoryId id) {
    switch (id) {
        case CategoryId::MusicalInstruments: return "MusicalInstruments";
        case CategoryId::AcousticScene: return "AcousticScene";
        case CategoryId::MusicGenre: return "MusicGenre";
        case CategoryId::ImpactEmergency: return "ImpactEmergency";
        case CategoryId::NonVerbalVocal: return "NonVerbalVocal";
    }
    return "";
}

std::optional<CategoryId> category_from_string(std::string_view s) {
    for (CategoryId id : kAllCategories) {
        if (category_id_string(id) == s) return id;
    }
    return std::nullopt;
}

const TaskCategory& category_info(CategoryId id) {
    return category_table()[static_cast<std::size_t>(id)];
}

}  // namespace tspe
