// fock.cpp

#include "sqzoms/fock.hpp"

namespace sqz {

std::string shape_string(const Shape& shape)
{
    std::string out = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(shape[i]);
    }
    return out + ")";
}

void SpaceDims::validate(int cap) const
{
    if (n_cav < 2 || n_mech < 2) {
        throw DimensionError("truncation must be >= 2 per mode, got " + shape_string(shape()));
    }
    if (static_cast<long>(n_cav) * n_mech > cap) {
        throw DimensionError("total dimension " + std::to_string(static_cast<long>(n_cav) * n_mech)
                             + " exceeds the cap " + std::to_string(cap));
    }
}

} // namespace sqz
