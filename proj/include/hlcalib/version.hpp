#pragma once

#include <string>

namespace hlcalib {
std::string version();
}
