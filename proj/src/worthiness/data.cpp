#include <array>
#include <random>
#include <sstream>

#include "factcheck/error.hpp"
#include "factcheck/worthiness/model.hpp"

namespace factcheck::worthiness {

std::vector<LabeledSentence> read_tsv(std::istream& in) {
  std::vector<LabeledSentence> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos)
      throw LoadError("worthiness data line " + std::to_string(line_no) + ": expected sentence<TAB>label");
    try {
      out.push_back({line.substr(0, tab), parse_label(line.substr(tab + 1))});
    } catch (const std::invalid_argument& e) {
      throw LoadError("worthiness data line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_tsv(std::ostream& out, const std::vector<LabeledSentence>& data) {
  for (const auto& s : data) out << s.text << '\t' << to_string(s.label) << '\n';
}

std::vector<LabeledSentence> synthetic_corpus(std::size_t n, std::uint64_t seed) {
  static constexpr std::array<std::string_view, 12> subjects = {
      "Unemployment", "Inflation", "The deficit", "Violent crime", "Tax revenue", "Gas prices",
      "Exports", "Average wages", "College tuition", "Home prices", "Healthcare spending", "Factory output"};
  static constexpr std::array<std::string_view, 8> changes = {"rose", "fell", "increased", "dropped",
                                                              "doubled", "declined", "grew", "tripled"};
  static constexpr std::array<std::string_view, 6> spans = {"last year", "since 2010", "in 2015",
                                                            "over the decade", "this quarter", "under this administration"};
  static constexpr std::array<std::string_view, 8> openers = {"Thank you", "Well", "Look", "Listen",
                                                              "Folks", "Good evening", "Honestly", "You know"};
  static constexpr std::array<std::string_view, 10> remarks = {
      "it is great to be here tonight", "I appreciate the question", "let me be clear about my feelings",
      "we should talk about that later", "I want to thank everyone for coming", "that is a good point",
      "I hope you all enjoy the evening", "please welcome our wonderful guests", "my friend knows how I feel",
      "let us move on to the next topic"};

  std::mt19937_64 rng(seed);
  auto pick = [&](const auto& pool) { return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)]; };
  std::uniform_int_distribution<int> percent(2, 95);

  std::vector<LabeledSentence> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::ostringstream s;
    if (i % 2 == 0) {
      s << pick(subjects) << ' ' << pick(changes) << " by " << percent(rng) << " percent " << pick(spans) << '.';
      out.push_back({s.str(), Label::kClaim});
    } else {
      s << pick(openers) << ", " << pick(remarks) << '.';
      out.push_back({s.str(), Label::kNonClaim});
    }
  }
  return out;
}

}  // namespace factcheck::worthiness
