#pragma once

#include <string_view>

// Copies of the files under data/, compiled in so the tools work without a
// data directory. The files on disk remain the editable source of truth.
namespace chefs::embedded {

std::string_view schema_json();
std::string_view synonyms_csv();
std::string_view grouping_dictionary_csv();
std::string_view param_catalogue_csv();
std::string_view foodex_catalogue_csv();
std::string_view foodex2_catalogue_csv();
std::string_view country_catalogue_csv();

}  // namespace chefs::embedded
