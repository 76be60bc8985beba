#pragma once

#include <string>
#include <vector>

#include "gbf/design.hpp"

namespace gbf {

// Header row required; the response column is extracted by name; remaining
// numeric columns become predictors unless dropped.  Dot-decimal floats,
// locale independent.
RawDataset load_csv(const std::string& path, const std::string& response,
                    const std::vector<std::string>& drop = {});

}  // namespace gbf
