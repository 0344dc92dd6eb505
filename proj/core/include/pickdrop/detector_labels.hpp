#pragma once

#include <string>
#include <vector>

namespace pickdrop {

// The bundled natural-language object queries used to configure
// open-vocabulary detectors during scanning. Order is meaningful and stable.
const std::vector<std::string>& default_detector_queries();

}  // namespace pickdrop
