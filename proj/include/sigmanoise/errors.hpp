#pragma once

#include <stdexcept>
#include <string>

namespace sigmanoise {

// Precondition violations are reported as std::invalid_argument throughout the
// library. NumericError is reserved for procedures that ran but could not meet
// their accuracy contract (non-converging quadrature, undecidable RN values).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sigmanoise
