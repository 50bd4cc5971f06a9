#include "dce/errors.hpp"

#include <iostream>

namespace dce {

void warn(const std::string& message) {
    std::cerr << "warning: " << message << '\n';
}

}  // namespace dce
