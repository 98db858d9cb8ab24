#include "hpvem/errors.hpp"

namespace hpvem {

int exit_code_for(const Error& e)
{
    if (dynamic_cast<const ArgumentError*>(&e) != nullptr) {
        return 2;
    }
    if (dynamic_cast<const IoError*>(&e) != nullptr) {
        return 4;
    }
    return 3;
}

} // namespace hpvem
