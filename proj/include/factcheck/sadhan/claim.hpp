#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace factcheck::sadhan {

// Latent claim attributes that condition attention.
enum class AspectKind : int { kAuthor = 0, kTopic = 1, kDomain = 2 };

inline constexpr std::array<AspectKind, 3> kAspectKinds = {AspectKind::kAuthor, AspectKind::kTopic,
                                                           AspectKind::kDomain};

std::string_view to_string(AspectKind kind);
// Throws std::invalid_argument for names other than author/topic/domain.
AspectKind parse_aspect_kind(std::string_view name);

// Output class order of the verdict head.
enum class Veracity : int { kTrue = 0, kFalse = 1 };

std::string_view to_string(Veracity v);
Veracity parse_veracity(std::string_view s);

struct Claim {
  std::string text;
  std::vector<std::string> tokens;  // tokenize(text)
  std::map<AspectKind, std::string> aspects;

  static Claim from_text(std::string text, std::map<AspectKind, std::string> aspects = {});
};

// One evidence document: the token list of each sentence, in order.
using Document = std::vector<std::vector<std::string>>;

Document make_document(const std::vector<std::string>& sentences);

}  // namespace factcheck::sadhan
