#pragma once

#include <stdexcept>
#include <string>

namespace cavsim {

// bad caller input (maps to CAVSIM_ERR_INVALID_ARGUMENT)
struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// well-typed input outside the physical domain (maps to CAVSIM_ERR_DOMAIN)
struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// iterative solver ran out of budget; carries best-so-far by convention
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string &msg) {
    if (!ok) throw validation_error(msg);
}

} // namespace cavsim
