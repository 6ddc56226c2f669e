#include "mvf/catalog_name.hpp"

#include <charconv>

#include "mvf/error.hpp"

namespace mvf {

CatalogName parse_catalog_name(const std::string& text) {
  CatalogName n;
  n.text = text;
  const auto colon = text.find(':');
  n.family = text.substr(0, colon);
  if (n.family.empty()) throw Error(ErrorKind::Config, "empty catalog name");
  if (colon == std::string::npos) return n;
  std::string rest = text.substr(colon + 1);
  const auto eq = rest.find('=');
  if (eq != std::string::npos) {
    n.key = rest.substr(0, eq);
    rest = rest.substr(eq + 1);
  }
  std::size_t start = 0;
  while (start <= rest.size()) {
    const auto comma = rest.find(',', start);
    const std::string item = rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    double v = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size()) {
      // Non-numeric tags such as "folland:h1" are kept as the key.
      if (n.key.empty() && n.values.empty() && comma == std::string::npos) {
        n.key = item;
        return n;
      }
      throw Error(ErrorKind::Config, "cannot parse '" + item + "' in catalog name '" + text + "'");
    }
    n.values.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return n;
}

}  // namespace mvf
