#include "lsr/error.hpp"

#include <sstream>

namespace lsr {

ShapeError shape_mismatch(const char* op, Index a_rows, Index a_cols,
                          Index b_rows, Index b_cols) {
    std::ostringstream msg;
    msg << op << ": incompatible shapes (" << a_rows << " x " << a_cols
        << ") and (" << b_rows << " x " << b_cols << ")";
    return ShapeError(msg.str());
}

}  // namespace lsr
