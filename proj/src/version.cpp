#include "hlcalib/version.hpp"

namespace hlcalib {
std::string version() { return HLCALIB_VERSION; }
}  // namespace hlcalib
