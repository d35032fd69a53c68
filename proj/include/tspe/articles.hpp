#pragma once

#include <string>
#include <string_view>

namespace tspe {

enum class Article { A, An, None };

// Indefinite article for a phrase: vowel-initial heuristic on the first word,
// corrected by two override tables (vowel letter with consonant sound, e.g.
// "university" -> A) and a zero-article set for mass nouns, plurals and
// gerunds (e.g. "jazz", "laughter", "footsteps" -> None).
Article article_for(std::string_view phrase);

// "a cough", "an organ", "jazz"; capitalize=true yields "A ..."/"An ...".
std::string with_article(std::string_view phrase, bool capitalize);

// Canonical label text used in prompts: lowercased, underscores to spaces,
// whitespace collapsed.
std::string normalize_label(std::string_view raw);

}  // namespace tspe
