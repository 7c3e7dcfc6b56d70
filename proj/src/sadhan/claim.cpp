#include "factcheck/sadhan/claim.hpp"

#include <stdexcept>

#include "factcheck/text/sentence.hpp"

namespace factcheck::sadhan {

std::string_view to_string(AspectKind kind) {
  switch (kind) {
    case AspectKind::kAuthor: return "author";
    case AspectKind::kTopic: return "topic";
    case AspectKind::kDomain: return "domain";
  }
  return "unknown";
}

AspectKind parse_aspect_kind(std::string_view name) {
  for (auto kind : kAspectKinds)
    if (to_string(kind) == name) return kind;
  throw std::invalid_argument("unknown aspect kind '" + std::string(name) + "'");
}

std::string_view to_string(Veracity v) { return v == Veracity::kTrue ? "true" : "false"; }

Veracity parse_veracity(std::string_view s) {
  if (s == "true") return Veracity::kTrue;
  if (s == "false") return Veracity::kFalse;
  throw std::invalid_argument("label must be 'true' or 'false', got '" + std::string(s) + "'");
}

Claim Claim::from_text(std::string text, std::map<AspectKind, std::string> aspects) {
  Claim c;
  c.tokens = text::tokenize(text);
  c.text = std::move(text);
  c.aspects = std::move(aspects);
  return c;
}

Document make_document(const std::vector<std::string>& sentences) {
  Document doc;
  doc.reserve(sentences.size());
  for (const auto& s : sentences) doc.push_back(text::tokenize(s));
  return doc;
}

}  // namespace factcheck::sadhan
