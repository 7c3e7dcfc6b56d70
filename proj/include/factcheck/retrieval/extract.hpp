#pragma once

#include <string>
#include <string_view>

#include "factcheck/retrieval/article.hpp"

namespace factcheck::retrieval {

// Parses a page into an Article: scripts, styles and markup are dropped, the
// text of <p> and <blockquote> blocks is sentence-segmented in document
// order, the title comes from <title> (else the first <h1>, else the search
// result title), and author/date come from the usual meta tags. Input with no
// markup at all is treated as plain body text. Throws ExtractionError when no
// body sentence survives.
Article extract_article(const SearchResult& result);

// All visible text of a page (markup, scripts and styles removed,
// entities decoded, whitespace collapsed).
std::string visible_text(std::string_view html);

// Decodes named and numeric character references.
std::string decode_entities(std::string_view s);

}  // namespace factcheck::retrieval
