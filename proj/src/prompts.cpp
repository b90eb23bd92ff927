#include "coevo/prompts.hpp"

namespace coevo::prompts {

std::string fill_slots(const std::string& tmpl,
                       const std::map<std::string, std::string>& slots) {
  std::string out;
  out.reserve(tmpl.size());
  size_t pos = 0;
  while (pos < tmpl.size()) {
    size_t open = tmpl.find('{', pos);
    if (open == std::string::npos) {
      out.append(tmpl, pos, std::string::npos);
      break;
    }
    size_t close = tmpl.find('}', open + 1);
    if (close == std::string::npos) {
      out.append(tmpl, pos, std::string::npos);
      break;
    }
    std::string name = tmpl.substr(open + 1, close - open - 1);
    auto it = slots.find(name);
    if (it != slots.end()) {
      out.append(tmpl, pos, open - pos);
      out.append(it->second);
      pos = close + 1;
    } else {
      // Not a known slot (e.g. literal JSON braces); keep the brace.
      out.append(tmpl, pos, open - pos + 1);
      pos = open + 1;
    }
  }
  return out;
}

}  // namespace coevo::prompts
