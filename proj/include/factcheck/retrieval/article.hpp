#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "factcheck/text/sentence.hpp"

namespace factcheck::retrieval {

inline constexpr std::size_t kMaxSearchResults = 10;

struct SearchResult {
  std::string url;
  std::string title;
  std::string raw_html;  // page HTML, or plain body text for fixture entries
  std::size_t rank = 1;  // 1-based backend rank
};

struct Article {
  std::string url;
  std::string title;
  std::vector<text::Sentence> sentences;
  std::optional<std::string> publication_date;  // YYYY-MM-DD
  std::vector<std::string> authors;
  std::string domain;  // lowercase registrable host
};

struct Snippet {
  std::string url;
  std::size_t start = 0;  // first sentence index, inclusive
  std::size_t end = 0;    // last sentence index, inclusive
  std::string text;
  double similarity = 0.0;

  bool operator==(const Snippet&) const = default;
};

// Host of an http(s) URL with any "www." prefix removed, reduced to its
// registrable part ("news.bbc.co.uk" -> "bbc.co.uk"); lowercase. Empty when
// the URL has no host.
std::string registrable_domain(std::string_view url);

}  // namespace factcheck::retrieval
