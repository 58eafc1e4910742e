#include "dpinv/error.hpp"

namespace dpinv {

void require_dims(bool ok, const std::string& what) {
    if (!ok) throw DimensionError("dimension mismatch: " + what);
}

}  // namespace dpinv
