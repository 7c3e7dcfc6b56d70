#include "factcheck/retrieval/extract.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <functional>
#include <map>

#include "factcheck/error.hpp"

namespace factcheck::retrieval {
namespace {

struct Tag {
  std::string name;  // lowercase
  bool closing = false;
  std::map<std::string, std::string> attrs;  // lowercase keys
};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool one_of(std::string_view name, std::initializer_list<std::string_view> names) {
  return std::find(names.begin(), names.end(), name) != names.end();
}

// Elements whose content is never visible text.
bool is_hidden_element(std::string_view name) {
  return one_of(name, {"script", "style", "noscript", "template", "iframe", "svg", "object"});
}

// Block-level starts that implicitly close an open paragraph.
bool closes_paragraph(std::string_view name) {
  return one_of(name, {"div", "section", "article", "ul", "ol", "li", "table", "h1", "h2", "h3", "h4",
                       "h5", "h6", "header", "footer", "nav", "aside", "form", "hr", "pre", "figure"});
}

// Containers whose paragraphs are page chrome rather than article body.
bool is_boilerplate_container(std::string_view name) {
  return one_of(name, {"nav", "header", "footer", "aside", "form"});
}

std::size_t find_ci(std::string_view hay, std::string_view needle, std::size_t from) {
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < needle.size() && match; ++k)
      match = std::tolower(static_cast<unsigned char>(hay[i + k])) == needle[k];
    if (match) return i;
  }
  return std::string_view::npos;
}

// Parses the tag starting at html[pos] == '<'. Returns the index just past
// '>' or npos when the tag never closes.
std::size_t parse_tag(std::string_view html, std::size_t pos, Tag& tag) {
  std::size_t i = pos + 1;
  if (i < html.size() && html[i] == '/') {
    tag.closing = true;
    ++i;
  }
  const std::size_t name_start = i;
  while (i < html.size() && (std::isalnum(static_cast<unsigned char>(html[i])) || html[i] == '-' || html[i] == ':')) ++i;
  tag.name = lower(html.substr(name_start, i - name_start));
  while (i < html.size()) {
    while (i < html.size() && (is_space(html[i]) || html[i] == '/')) ++i;
    if (i >= html.size()) break;
    if (html[i] == '>') return i + 1;
    const std::size_t key_start = i;
    while (i < html.size() && !is_space(html[i]) && html[i] != '=' && html[i] != '>' && html[i] != '/') ++i;
    std::string key = lower(html.substr(key_start, i - key_start));
    while (i < html.size() && is_space(html[i])) ++i;
    std::string value;
    if (i < html.size() && html[i] == '=') {
      ++i;
      while (i < html.size() && is_space(html[i])) ++i;
      if (i < html.size() && (html[i] == '"' || html[i] == '\'')) {
        const char quote = html[i++];
        const std::size_t end = html.find(quote, i);
        if (end == std::string_view::npos) return std::string_view::npos;
        value = std::string(html.substr(i, end - i));
        i = end + 1;
      } else {
        const std::size_t v_start = i;
        while (i < html.size() && !is_space(html[i]) && html[i] != '>') ++i;
        value = std::string(html.substr(v_start, i - v_start));
      }
    }
    if (!key.empty()) tag.attrs.emplace(std::move(key), decode_entities(value));
  }
  return std::string_view::npos;
}

// Walks the document emitting text runs and tags; comments, doctype and the
// content of hidden elements are skipped.
void scan_html(std::string_view html, const std::function<void(std::string_view)>& on_text,
               const std::function<void(const Tag&)>& on_tag) {
  std::size_t i = 0;
  while (i < html.size()) {
    const std::size_t lt = html.find('<', i);
    if (lt == std::string_view::npos) {
      on_text(html.substr(i));
      return;
    }
    if (lt > i) on_text(html.substr(i, lt - i));
    if (html.compare(lt, 4, "<!--") == 0) {
      const std::size_t end = html.find("-->", lt + 4);
      i = end == std::string_view::npos ? html.size() : end + 3;
      continue;
    }
    const char next = lt + 1 < html.size() ? html[lt + 1] : '\0';
    if (next == '!' || next == '?') {
      const std::size_t end = html.find('>', lt);
      i = end == std::string_view::npos ? html.size() : end + 1;
      continue;
    }
    if (!(std::isalpha(static_cast<unsigned char>(next)) || next == '/')) {
      on_text(html.substr(lt, 1));  // a literal '<'
      i = lt + 1;
      continue;
    }
    Tag tag;
    const std::size_t after = parse_tag(html, lt, tag);
    if (after == std::string_view::npos) return;
    i = after;
    if (!tag.closing && is_hidden_element(tag.name)) {
      const std::size_t close = find_ci(html, "</" + tag.name, i);
      if (close == std::string_view::npos) return;
      const std::size_t gt = html.find('>', close);
      i = gt == std::string_view::npos ? html.size() : gt + 1;
      continue;
    }
    on_tag(tag);
  }
}

void append_utf8(std::string& out, unsigned long cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    }
  }
  return out;
}

std::optional<std::string> iso_date(std::string_view value) {
  value = value.substr(0, std::min<std::size_t>(value.size(), 10));
  if (value.size() != 10 || value[4] != '-' || value[7] != '-') return std::nullopt;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9})
    if (!std::isdigit(static_cast<unsigned char>(value[i]))) return std::nullopt;
  const int month = std::stoi(std::string(value.substr(5, 2)));
  const int day = std::stoi(std::string(value.substr(8, 2)));
  if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;
  return std::string(value);
}

constexpr std::array<std::string_view, 3> kAuthorKeys = {"author", "article:author", "dc.creator"};
constexpr std::array<std::string_view, 7> kDateKeys = {
    "article:published_time", "datepublished", "pubdate", "publishdate", "date", "dc.date", "og:published_time"};

}  // namespace

std::string decode_entities(std::string_view s) {
  static const std::map<std::string, unsigned long, std::less<>> named = {
      {"amp", '&'},      {"lt", '<'},       {"gt", '>'},       {"quot", '"'},     {"apos", '\''},
      {"nbsp", 0xA0},    {"mdash", 0x2014}, {"ndash", 0x2013}, {"lsquo", 0x2018}, {"rsquo", 0x2019},
      {"ldquo", 0x201C}, {"rdquo", 0x201D}, {"hellip", 0x2026}, {"copy", 0xA9},   {"eacute", 0xE9}};
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    const std::size_t semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back('&');
      continue;
    }
    const std::string_view body = s.substr(i + 1, semi - i - 1);
    unsigned long cp = 0;
    bool ok = false;
    if (!body.empty() && body[0] == '#') {
      const bool hex = body.size() > 1 && (body[1] == 'x' || body[1] == 'X');
      const std::string digits(body.substr(hex ? 2 : 1));
      if (!digits.empty() &&
          std::all_of(digits.begin(), digits.end(), [&](char c) { return hex ? std::isxdigit(static_cast<unsigned char>(c)) != 0 : std::isdigit(static_cast<unsigned char>(c)) != 0; })) {
        cp = std::stoul(digits, nullptr, hex ? 16 : 10);
        ok = true;
      }
    } else if (auto it = named.find(body); it != named.end()) {
      cp = it->second;
      ok = true;
    }
    if (!ok) {
      out.push_back('&');
      continue;
    }
    // Non-breaking spaces become ordinary spaces so they collapse.
    if (cp == 0xA0) out.push_back(' ');
    else append_utf8(out, cp);
    i = semi;
  }
  return out;
}

std::string visible_text(std::string_view html) {
  std::string raw;
  scan_html(
      html, [&](std::string_view t) { raw.append(t); },
      [&](const Tag&) { raw.push_back(' '); });
  return collapse_whitespace(decode_entities(raw));
}

Article extract_article(const SearchResult& result) {
  Article article;
  article.url = result.url;
  article.domain = registrable_domain(result.url);

  std::vector<std::string> blocks;
  const std::string_view html = result.raw_html;
  if (html.find('<') == std::string_view::npos) {
    blocks.push_back(collapse_whitespace(decode_entities(html)));
  } else {
    std::string title, first_h1, block, body_text;
    bool in_title = false, in_h1 = false, in_block = false, in_head = false, seen_h1 = false;
    int chrome_depth = 0;
    std::size_t n_blocks = 0;

    auto finish_block = [&] {
      if (in_block && chrome_depth == 0) {
        blocks.push_back(collapse_whitespace(decode_entities(block)));
        ++n_blocks;
      }
      in_block = false;
      block.clear();
    };

    scan_html(
        html,
        [&](std::string_view t) {
          if (in_title) title.append(t);
          if (in_h1) first_h1.append(t);
          if (in_block) block.append(t);
          if (!in_head && !in_title && chrome_depth == 0) body_text.append(t);
        },
        [&](const Tag& tag) {
          const auto& n = tag.name;
          if (n == "head") in_head = !tag.closing;
          if (n == "body" && !tag.closing) in_head = false;
          if (n == "title") in_title = !tag.closing;
          if (n == "h1") {
            if (!tag.closing && !seen_h1) in_h1 = true;
            if (tag.closing && in_h1) {
              in_h1 = false;
              seen_h1 = true;
            }
          }
          if (n == "meta" && !tag.closing) {
            std::string key;
            for (const char* attr : {"name", "property", "itemprop"})
              if (auto it = tag.attrs.find(attr); it != tag.attrs.end()) key = lower(it->second);
            auto content = tag.attrs.find("content");
            if (!key.empty() && content != tag.attrs.end()) {
              const std::string value = collapse_whitespace(content->second);
              if (std::find(kAuthorKeys.begin(), kAuthorKeys.end(), key) != kAuthorKeys.end() && !value.empty() &&
                  std::find(article.authors.begin(), article.authors.end(), value) == article.authors.end())
                article.authors.push_back(value);
              if (std::find(kDateKeys.begin(), kDateKeys.end(), key) != kDateKeys.end() && !article.publication_date)
                article.publication_date = iso_date(value);
            }
          }
          if (is_boilerplate_container(n)) {
            if (!tag.closing) {
              finish_block();
              ++chrome_depth;
            } else if (chrome_depth > 0) {
              --chrome_depth;
            }
          }
          if (n == "p" || n == "blockquote") {
            finish_block();
            if (!tag.closing) in_block = true;
          } else if (!tag.closing && closes_paragraph(n)) {
            finish_block();
          } else if (n == "br" && in_block) {
            block.push_back(' ');
          }
          if (!in_head) body_text.push_back(' ');
        });
    finish_block();
    if (n_blocks == 0) blocks.push_back(collapse_whitespace(decode_entities(body_text)));

    article.title = collapse_whitespace(decode_entities(title));
    if (article.title.empty()) article.title = collapse_whitespace(decode_entities(first_h1));
  }
  if (article.title.empty()) article.title = result.title;

  for (const auto& b : blocks) {
    for (auto& s : text::segment_sentences(b)) {
      s.index = article.sentences.size();
      article.sentences.push_back(std::move(s));
    }
  }
  if (article.sentences.empty())
    throw ExtractionError("no article text extracted from '" + result.url + "'");
  return article;
}

std::string registrable_domain(std::string_view url) {
  const std::size_t scheme = url.find("://");
  std::string_view rest = scheme == std::string_view::npos ? url : url.substr(scheme + 3);
  const std::size_t end = rest.find_first_of("/?#");
  std::string_view host = rest.substr(0, end);
  if (const auto at = host.rfind('@'); at != std::string_view::npos) host = host.substr(at + 1);
  if (const auto colon = host.find(':'); colon != std::string_view::npos) host = host.substr(0, colon);
  std::string h = lower(host);
  const bool valid = std::all_of(h.begin(), h.end(), [](unsigned char c) { return std::isalnum(c) || c == '-' || c == '.'; });
  if (!valid) return {};
  while (!h.empty() && h.back() == '.') h.pop_back();
  if (h.rfind("www.", 0) == 0) h = h.substr(4);

  std::vector<std::string> labels;
  std::size_t start = 0;
  while (start <= h.size()) {
    const std::size_t dot = h.find('.', start);
    labels.push_back(h.substr(start, dot == std::string::npos ? std::string::npos : dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (labels.size() <= 2) return h;
  // Two-level public suffixes such as co.uk or com.au.
  const auto& sld = labels[labels.size() - 2];
  const bool country_tld = labels.back().size() == 2;
  const bool two_level = country_tld && one_of(sld, {"co", "com", "org", "net", "gov", "ac", "edu"});
  const std::size_t keep = two_level ? 3 : 2;
  std::string out;
  for (std::size_t i = labels.size() - keep; i < labels.size(); ++i) {
    if (!out.empty()) out.push_back('.');
    out += labels[i];
  }
  return out;
}

}  // namespace factcheck::retrieval
