#pragma once

#include <string>

namespace envpoison {

// Locale-independent decimal rendering at 12 significant digits; the one
// number format used in CSV output so reruns are byte-identical.
std::string csv_num(double v);

}  // namespace envpoison
