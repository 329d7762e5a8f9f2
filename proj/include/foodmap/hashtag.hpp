#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "foodmap/errors.hpp"

namespace foodmap {

// Venue name -> hashtag. Whitespace splits tokens; characters outside
// [A-Za-z0-9] are dropped; the first surviving character of each token is
// uppercased; tokens are concatenated after a leading '#'.
// "Sample Name" -> "#SampleName", "Joe's Pizza-Bar" -> "#JoesPizzaBar".
inline std::string derive_hashtag(std::string_view name) {
  std::string out = "#";
  bool at_token_start = true;
  for (char ch : name) {
    const unsigned char c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      at_token_start = true;
      continue;
    }
    if (!std::isalnum(c)) continue;
    out += at_token_start ? static_cast<char>(std::toupper(c)) : ch;
    at_token_start = false;
  }
  if (out.size() == 1) {
    throw EmptyName("no hashtag characters left in name: \"" + std::string(name) +
                    "\"");
  }
  return out;
}

}  // namespace foodmap
