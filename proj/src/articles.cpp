#include "tspe/articles.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace tspe {

namespace {

// Vowel-letter words pronounced with a consonant onset.
const std::unordered_set<std::string>& a_overrides() {
    static const std::unordered_set<std::string> set = {
        "university", "unicorn", "uniform", "unique", "unit", "user",
        "utensil", "ukulele", "european", "one", "once", "eulogy", "ewe",
    };
    return set;
}

// Consonant-letter words pronounced with a vowel onset.
const std::unordered_set<std::string>& an_overrides() {
    static const std::unordered_set<std::string> set = {
        "hour", "honest", "honor", "heir", "heirloom",
    };
    return set;
}

// Phrases that take no indefinite article: music genres, mass nouns,
// gerunds and plurals that occur as class labels or sound sources.
const std::unordered_set<std::string>& zero_article_phrases() {
    static const std::unordered_set<std::string> set = {
        // genres
        "jazz", "rock", "blues", "classical", "country", "disco", "hiphop",
        "hip hop", "hip-hop", "pop", "metal", "reggae", "music",
        // mass nouns
        "laughter", "gunshot", "rain", "wind", "thunder", "applause",
        "static", "silence", "traffic", "pouring water", "street music",
        // gerund labels
        "sneezing", "coughing", "clapping", "breathing", "laughing",
        "snoring", "keyboard typing", "glass breaking", "brushing teeth",
        "drinking sipping", "throat clearing", "can opening",
        // plural labels
        "insects", "crickets", "chirping birds", "water drops", "sea waves",
        "footsteps", "church bells", "fireworks", "door wood creaks",
    };
    return set;
}

std::string first_word(std::string_view phrase) {
    std::string word;
    for (char c : phrase) {
        if (std::isspace(static_cast<unsigned char>(c))) break;
        word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return word;
}

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

Article article_for(std::string_view phrase) {
    if (phrase.empty()) return Article::A;
    if (zero_article_phrases().count(lowercase(phrase)) > 0) return Article::None;
    const std::string word = first_word(phrase);
    if (word.empty()) return Article::A;
    if (a_overrides().count(word) > 0) return Article::A;
    if (an_overrides().count(word) > 0) return Article::An;
    switch (word.front()) {
        case 'a': case 'e': case 'i': case 'o': case 'u':
            return Article::An;
        default:
            return Article::A;
    }
}

std::string with_article(std::string_view phrase, bool capitalize) {
    switch (article_for(phrase)) {
        case Article::A:
            return (capitalize ? "A " : "a ") + std::string(phrase);
        case Article::An:
            return (capitalize ? "An " : "an ") + std::string(phrase);
        case Article::None:
            return std::string(phrase);
    }
    return std::string(phrase);
}

std::string normalize_label(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char c : raw) {
        char mapped = (c == '_') ? ' ' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (std::isspace(static_cast<unsigned char>(mapped))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(mapped);
    }
    return out;
}

}  // namespace tspe
