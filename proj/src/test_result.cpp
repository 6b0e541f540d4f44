#include "nnreflex/test_result.hpp"

#include <string>

namespace nnreflex {

std::string_view to_string(Alternative alt) {
  switch (alt) {
    case Alternative::right:
      return "right";
    case Alternative::left:
      return "left";
    case Alternative::two_sided:
      break;
  }
  return "two-sided";
}

Alternative parse_alternative(std::string_view text) {
  if (text == "right" || text == "greater") return Alternative::right;
  if (text == "left" || text == "less") return Alternative::left;
  if (text == "two-sided" || text == "two_sided") return Alternative::two_sided;
  throw std::invalid_argument("unknown alternative: " + std::string(text));
}

}  // namespace nnreflex
