#pragma once

#include <string>
#include <vector>

namespace mvf {

// "family", "family:value" or "family:key=v1,v2,...".
struct CatalogName {
  std::string family;
  std::string key;
  std::vector<double> values;
  std::string text;
};

CatalogName parse_catalog_name(const std::string& text);

}  // namespace mvf
